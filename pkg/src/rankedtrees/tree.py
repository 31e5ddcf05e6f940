"""Labeled plane trees shared by both ranked models.

A :class:`LabeledTree` is an index arena stored in CSR form: node ``v`` has
children ``child_idx[child_ptr[v]:child_ptr[v+1]]`` (left to right) and label
``labels[v]``.  Leaves carry label 0, internal nodes a label >= 1.  Trees
built by this package are numbered in preorder with the root at 0, which
makes the canonical encoding (preorder labels and arities) free to compute.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels


class ModelKind(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"

    @classmethod
    def parse(cls, value: "ModelKind | str") -> "ModelKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown model {value!r}; expected 'strong' or 'weak'") from None


@dataclass(frozen=True)
class Violation:
    node: int  # -1 for whole-tree rules
    rule: str
    message: str


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...] = field(default=())

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


class InvalidTreeError(ValueError):
    def __init__(self, report: ValidityReport, model: ModelKind):
        self.report = report
        first = report.violations[0]
        super().__init__(f"not a valid {model.value} tree: node {first.node}: {first.message}")


def _as_index_array(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class LabeledTree:
    """Immutable plane tree with unlabeled leaves and labeled internal nodes.

    Equality and hashing are canonical: two trees are equal when they have
    the same shape and labels, whatever their arena numbering.
    """

    __slots__ = ("labels", "child_ptr", "child_idx", "root", "_preordered", "_key")

    def __init__(self, labels, child_ptr, child_idx, root: int = 0, *, preordered: bool = False):
        self.labels = _as_index_array(labels)
        self.child_ptr = _as_index_array(child_ptr)
        self.child_idx = _as_index_array(child_idx)
        self.root = int(root)
        self._preordered = preordered
        self._key = None

    # construction ---------------------------------------------------------

    @classmethod
    def leaf(cls) -> "LabeledTree":
        return cls([0], [0, 0], [], 0, preordered=True)

    @classmethod
    def from_preorder(cls, labels, arity) -> "LabeledTree":
        """Build from preorder label and arity sequences (the canonical encoding)."""
        arity = np.ascontiguousarray(arity, dtype=np.int64)
        ptr = np.zeros(arity.shape[0] + 1, dtype=np.int64)
        np.cumsum(arity, out=ptr[1:])
        if ptr[-1] != arity.shape[0] - 1:
            raise ValueError("arity sequence does not describe a single tree")
        child_idx = kernels.preorder_children(arity, ptr)
        return cls(labels, ptr, child_idx, 0, preordered=True)

    @classmethod
    def from_children(cls, labels: Sequence[int], children: Sequence[Iterable[int]],
                      root: int = 0) -> "LabeledTree":
        """Build from an arbitrary arena given as per-node child lists."""
        ptr = [0]
        flat: list[int] = []
        for kids in children:
            flat.extend(int(c) for c in kids)
            ptr.append(len(flat))
        if len(ptr) - 1 != len(labels):
            raise ValueError("labels and children must have the same length")
        return cls(labels, ptr, flat, root)

    @classmethod
    def from_nested(cls, nested) -> "LabeledTree":
        """Build from nested tuples: ``None`` is a leaf, ``(label, [child, ...])`` a node."""
        labels: list[int] = []
        arity: list[int] = []
        stack = [nested]
        while stack:
            node = stack.pop()
            if node is None:
                labels.append(0)
                arity.append(0)
            else:
                lab, kids = node
                labels.append(int(lab))
                arity.append(len(kids))
                stack.extend(reversed(kids))
        return cls.from_preorder(labels, arity)

    def to_nested(self):
        """Inverse of :meth:`from_nested`."""
        t = self.canonical()
        arity = t.arity
        out = []
        stack: list[list] = []
        for v in range(t.num_nodes):
            node = None if arity[v] == 0 else (int(t.labels[v]), [])
            if stack:
                stack[-1][1][1].append(node)
                stack[-1][0] -= 1
                if stack[-1][0] == 0:
                    stack.pop()
            else:
                out.append(node)
            if node is not None:
                stack.append([int(arity[v]), node])
        return out[0]

    # structure ------------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return self.labels.shape[0]

    @property
    def arity(self) -> np.ndarray:
        return np.diff(self.child_ptr)

    def children(self, v: int) -> np.ndarray:
        return self.child_idx[self.child_ptr[v]:self.child_ptr[v + 1]]

    def preorder(self) -> np.ndarray:
        """Node indices in left-to-right depth-first preorder."""
        if self._preordered:
            return np.arange(self.num_nodes, dtype=np.int64)
        order, visits = kernels.walk(self.child_ptr, self.child_idx, self.root)
        if order.shape[0] != self.num_nodes or np.any(visits != 1):
            raise ValueError("arena is not a tree (unreachable, shared or cyclic nodes)")
        return order

    def canonical(self) -> "LabeledTree":
        """Same tree renumbered in preorder with the root at 0."""
        if self._preordered:
            return self
        order = self.preorder()
        return LabeledTree.from_preorder(self.labels[order], self.arity[order])

    def key(self) -> bytes:
        """Canonical encoding: preorder labels followed by preorder arities."""
        if self._key is None:
            t = self.canonical()
            self._key = t.labels.tobytes() + t.arity.tobytes()
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        from .formats import to_newick

        if self.num_nodes > 200:
            return f"<LabeledTree size={size(self)} internal={num_internal(self)}>"
        return f"LabeledTree({to_newick(self)!r})"


def canonical_equal(a: LabeledTree, b: LabeledTree) -> bool:
    return a.key() == b.key()


def size(tree: LabeledTree) -> int:
    """Number of leaves."""
    return int(np.count_nonzero(tree.arity == 0))


def num_internal(tree: LabeledTree) -> int:
    return int(np.count_nonzero(tree.arity))


def max_label(tree: LabeledTree) -> int:
    return int(tree.labels.max(initial=0))


def leaves_in_order(tree: LabeledTree) -> np.ndarray:
    """Leaf node indices in left-to-right depth-first order."""
    order = tree.preorder()
    return order[tree.arity[order] == 0]


def validate(tree: LabeledTree, model: ModelKind | str) -> ValidityReport:
    """Check shape and labeling rules of ``model``; never raises on bad arenas."""
    model = ModelKind.parse(model)
    out: list[Violation] = []
    m = tree.num_nodes
    if tree.child_ptr.shape[0] != m + 1 or m == 0:
        return ValidityReport((Violation(-1, "arena", "child pointer array does not match node count"),))
    if not 0 <= tree.root < m:
        return ValidityReport((Violation(-1, "root", f"root index {tree.root} out of range"),))
    ptr = tree.child_ptr
    if ptr[0] != 0 or np.any(np.diff(ptr) < 0) or ptr[-1] != tree.child_idx.shape[0]:
        return ValidityReport((Violation(-1, "arena", "child pointer array is not monotone"),))
    bad = np.flatnonzero((tree.child_idx < 0) | (tree.child_idx >= m))
    if bad.size:
        owners = np.searchsorted(ptr, bad, side="right") - 1
        return ValidityReport(tuple(
            Violation(int(v), "index", f"child index {int(tree.child_idx[j])} out of range")
            for v, j in zip(owners, bad)))

    order, visits = kernels.walk(ptr, tree.child_idx, tree.root)
    for v in np.flatnonzero(visits > 1):
        out.append(Violation(int(v), "cycle", "node reached more than once (cycle or shared child)"))
    reached = np.zeros(m, dtype=bool)
    reached[order] = True
    for v in np.flatnonzero(~reached):
        out.append(Violation(int(v), "unreachable", "node not reachable from the root"))

    arity = tree.arity
    labels = tree.labels
    for v in order[arity[order] == 1]:
        out.append(Violation(int(v), "arity", "internal node with a single child"))
    leaves = order[arity[order] == 0]
    for v in leaves[labels[leaves] != 0]:
        out.append(Violation(int(v), "leaf-label", f"leaf carries label {int(labels[v])}"))
    internal = order[arity[order] > 0]
    for v in internal[labels[internal] < 1]:
        out.append(Violation(int(v), "label-range", f"internal label {int(labels[v])} is not positive"))

    # chronology: every internal child is labeled above its parent
    owners = np.repeat(np.arange(m), arity)
    kids = tree.child_idx
    mask = reached[owners] & (arity[kids] > 0) & (labels[kids] <= labels[owners])
    for p, c in zip(owners[mask], kids[mask]):
        out.append(Violation(int(c), "increasing",
                             f"label {int(labels[c])} not above parent label {int(labels[p])}"))

    used = labels[internal]
    if model is ModelKind.STRONG:
        values, first_pos, counts = np.unique(used, return_index=True, return_counts=True)
        for val in values[counts > 1]:
            for v in internal[used == val][1:]:
                out.append(Violation(int(v), "duplicate-label", f"label {int(val)} used more than once"))
        expected = np.arange(1, internal.shape[0] + 1)
        if values.shape[0] != expected.shape[0] or np.any(values != expected):
            out.append(Violation(-1, "label-set",
                                 f"labels are not exactly 1..{internal.shape[0]}"))
    else:
        top = int(used.max(initial=0))
        present = np.zeros(top + 1, dtype=bool)
        present[used[used >= 1]] = True
        missing = np.flatnonzero(~present[1:]) + 1
        if missing.size:
            out.append(Violation(-1, "label-gap",
                                 f"labels {missing.tolist()[:10]} unused below the maximum {top}"))
    return ValidityReport(tuple(out))


def require_valid(tree: LabeledTree, model: ModelKind | str) -> None:
    model = ModelKind.parse(model)
    report = validate(tree, model)
    if not report.valid:
        raise InvalidTreeError(report, model)
