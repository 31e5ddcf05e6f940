"""Permutations <-> strong trees and ordered set partitions <-> weak trees.

Both maps are implemented on a small mutable node structure in plain
Python, deliberately independent of the array kernels used by the
samplers, so that each side can serve as an oracle for the other.  Leaf
positions always refer to the left-to-right depth-first leaf order.

Text forms: a permutation is ``4,1,2,5,3``; an ordered partition is
``3,4|1,5,7|2,6`` (blocks separated by ``|``).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .tree import InvalidTreeError, LabeledTree, ModelKind, require_valid

Permutation = tuple[int, ...]
OrderedPartition = tuple[tuple[int, ...], ...]


class ClassMembershipError(ValueError):
    """Input is well formed but outside the domain of the map."""


class _Node:
    __slots__ = ("label", "kids", "parent")

    def __init__(self, label: int = 0, parent: "_Node | None" = None):
        self.label = label
        self.kids: list[_Node] = []
        self.parent = parent


def _leaves(root: _Node) -> list[_Node]:
    out = []
    stack = [root]
    while stack:
        v = stack.pop()
        if v.kids:
            stack.extend(reversed(v.kids))
        else:
            out.append(v)
    return out


def _expand(leaf: _Node, label: int, arity: int) -> _Node:
    leaf.label = label
    leaf.kids = [_Node(0, leaf) for _ in range(arity)]
    return leaf


def _freeze(root: _Node) -> LabeledTree:
    labels, arity = [], []
    stack = [root]
    while stack:
        v = stack.pop()
        labels.append(v.label)
        arity.append(len(v.kids))
        stack.extend(reversed(v.kids))
    return LabeledTree.from_preorder(labels, arity)


def _thaw(tree: LabeledTree) -> _Node:
    t = tree.canonical()
    labels = t.labels.tolist()
    arity = t.arity.tolist()
    nodes = [_Node(lab) for lab in labels]
    stack: list[list] = []
    for v, node in enumerate(nodes):
        if stack:
            p = stack[-1]
            node.parent = p[0]
            p[0].kids.append(node)
            p[1] -= 1
            if p[1] == 0:
                stack.pop()
        if arity[v]:
            stack.append([node, arity[v]])
    return nodes[0]


# small helpers -------------------------------------------------------------

def _require(tree: LabeledTree, model: ModelKind) -> None:
    try:
        require_valid(tree, model)
    except InvalidTreeError as exc:
        raise ClassMembershipError(str(exc)) from None


def runs(block: Iterable[int]) -> list[tuple[int, ...]]:
    """Maximal runs of consecutive integers, ascending."""
    items = sorted(set(block))
    if not items:
        raise ValueError("runs of an empty block")
    out: list[list[int]] = [[items[0]]]
    for x in items[1:]:
        if x == out[-1][-1] + 1:
            out[-1].append(x)
        else:
            out.append([x])
    return [tuple(r) for r in out]


def normalize(p: Iterable[Iterable[int]]) -> OrderedPartition:
    """Order-preserving relabeling of the elements onto 1..total, keeping block order."""
    blocks = [tuple(sorted(set(b))) for b in p]
    flat = [x for b in blocks for x in b]
    if len(flat) != len(set(flat)):
        raise ValueError("blocks are not pairwise disjoint")
    rank = {x: i + 1 for i, x in enumerate(sorted(flat))}
    return tuple(tuple(rank[x] for x in b) for b in blocks)


def is_hp(sigma: Sequence[int]) -> bool:
    n = len(sigma)
    if n < 2 or sorted(sigma) != list(range(1, n + 1)):
        return False
    return list(sigma).index(1) < list(sigma).index(2)


def check_partition(p: Iterable[Iterable[int]]) -> OrderedPartition:
    blocks = [tuple(sorted(b)) for b in p]
    if not blocks:
        raise ClassMembershipError("ordered partition needs at least one block")
    if any(not b for b in blocks):
        raise ClassMembershipError("empty block")
    for b in blocks:
        if len(set(b)) != len(b):
            raise ClassMembershipError(f"repeated element inside block {list(b)}")
    flat = sorted(x for b in blocks for x in b)
    if len(flat) != len(set(flat)):
        raise ClassMembershipError("blocks overlap")
    if flat != list(range(1, len(flat) + 1)):
        raise ClassMembershipError(f"blocks do not cover exactly 1..{len(flat)}")
    return tuple(blocks)


# map M: permutations with 1 before 2 -> strong trees --------------------------

def perm_to_tree(sigma: Sequence[int]) -> LabeledTree:
    sigma = [int(x) for x in sigma]
    if not is_hp(sigma):
        raise ClassMembershipError("expected a permutation of 1..n (n >= 2) with 1 before 2")
    n = len(sigma)
    pos = [0] * (n + 1)
    for j, x in enumerate(sigma):
        pos[x] = j
    root = _expand(_Node(), 1, 2)
    last = root
    label = 1
    for i in range(3, n + 1):
        # position of i among the values 1..i
        k = 1 + sum(1 for x in range(1, i) if pos[x] < pos[i])
        if k == i:
            last.kids.append(_Node(0, last))
        else:
            label += 1
            last = _expand(_leaves(root)[k - 1], label, 2)
    return _freeze(root)


def tree_to_perm(tree: LabeledTree) -> Permutation:
    _require(tree, ModelKind.STRONG)
    root = _thaw(tree)
    if not root.kids:
        raise ClassMembershipError("the single leaf has no permutation (size must be >= 2)")
    by_label = {}
    stack = [root]
    while stack:
        v = stack.pop()
        if v.kids:
            by_label[v.label] = v
            stack.extend(v.kids)
    n = len(_leaves(root))
    steps: list[int] = []  # k_i for i = n down to 3
    top = max(by_label)
    for i in range(n, 2, -1):
        v = by_label[top]
        if len(v.kids) > 2 or top == 1:
            v.kids.pop()
            steps.append(i)
        else:
            k = 1 + _leaves(root).index(v.kids[0])
            v.kids = []
            v.label = 0
            del by_label[top]
            top -= 1
            steps.append(k)
    sigma = [1, 2]
    for i, k in zip(range(3, n + 1), reversed(steps)):
        sigma.insert(k - 1, i)
    return tuple(sigma)


# map M': ordered set partitions -> weak trees ----------------------------------

def partition_to_tree(p: Iterable[Iterable[int]]) -> LabeledTree:
    blocks = check_partition(p)
    root = _Node()
    for i in range(1, len(blocks) + 1):
        image = normalize(blocks[:i])[-1]
        for run in runs(image):
            # leaf indices refer to the tree as updated by earlier runs of this block
            _expand(_leaves(root)[run[0] - 1], i, len(run) + 1)
    return _freeze(root)


def tree_to_partition(tree: LabeledTree) -> OrderedPartition:
    """Element e goes to the block labeled by the lowest common ancestor of leaves e and e+1."""
    _require(tree, ModelKind.WEAK)
    t = tree.canonical()
    labels = t.labels.tolist()
    arity = t.arity.tolist()
    m = len(labels)
    if m == 1:
        raise ClassMembershipError("the single leaf has no partition (size must be >= 2)")
    leaves_below = [0] * m
    nxt_sibling_span = [0] * m  # preorder index just past the subtree
    for v in range(m - 1, -1, -1):
        if arity[v] == 0:
            leaves_below[v] = 1
            nxt_sibling_span[v] = v + 1
        else:
            c = v + 1
            total = 0
            for _ in range(arity[v]):
                total += leaves_below[c]
                c = nxt_sibling_span[c]
            leaves_below[v] = total
            nxt_sibling_span[v] = c
    blocks: dict[int, list[int]] = {}
    offset = 0  # leaves strictly before the current preorder node
    for v in range(m):
        if arity[v] == 0:
            offset += 1
            continue
        c = v + 1
        seen = offset
        for j in range(arity[v]):
            if j:
                blocks.setdefault(labels[v], []).append(seen)
            seen += leaves_below[c]
            c = nxt_sibling_span[c]
    return tuple(tuple(sorted(blocks[lab])) for lab in sorted(blocks))


# text forms ----------------------------------------------------------------

def parse_permutation(text: str) -> Permutation:
    try:
        return tuple(int(x) for x in text.strip().split(","))
    except ValueError:
        raise ValueError(f"malformed permutation {text!r}; expected e.g. 4,1,2,5,3") from None


def format_permutation(sigma: Sequence[int]) -> str:
    return ",".join(str(x) for x in sigma)


def parse_partition(text: str) -> OrderedPartition:
    try:
        return tuple(tuple(int(x) for x in blk.split(",")) for blk in text.strip().split("|"))
    except ValueError:
        raise ValueError(f"malformed partition {text!r}; expected e.g. 3,4|1,5,7|2,6") from None


def format_partition(p: Iterable[Iterable[int]]) -> str:
    return "|".join(",".join(str(x) for x in sorted(b)) for b in p)


def all_hp(n: int):
    """Permutations of 1..n with 1 before 2, in lexicographic order."""
    from itertools import permutations

    for sigma in permutations(range(1, n + 1)):
        if sigma.index(1) < sigma.index(2):
            yield sigma


def all_ordered_partitions(m: int):
    """Every ordered set partition of 1..m (m >= 1): set partitions by restricted growth, then block orders."""
    from itertools import permutations

    def rec(i: int, blocks: list[list[int]]):
        if i > m:
            yield [tuple(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    for blocks in rec(1, []):
        yield from permutations(blocks)
