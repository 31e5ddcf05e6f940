"""Exhaustive generators that replay the two evolution processes literally.

Trees are nested tuples while growing (``None`` is a leaf, ``(label,
kids)`` an internal node) and are only converted to :class:`LabeledTree`
on output.  Expansion is breadth-first by step and deduplicated on the
nested-tuple form, which is canonical for plane trees.
"""

from __future__ import annotations

from typing import Iterator

from .tree import LabeledTree, ModelKind

STRONG_BOUND = 8
WEAK_BOUND = 7


class OracleBoundError(ValueError):
    def __init__(self, model: ModelKind, n: int, bound: int):
        self.bound = bound
        super().__init__(f"exhaustive {model.value} enumeration refused for n={n}: "
                         f"bound is {bound} (combinatorial explosion)")


def _size(t) -> int:
    if t is None:
        return 1
    return sum(_size(c) for c in t[1])


def _variants(t, label: int, budget: int, single: bool):
    """Yield (new_subtree, leaves_added, expanded_count) for every leaf-replacement choice.

    ``single`` restricts to at most one expanded leaf (strong process).
    """
    if t is None:
        yield None, 0, 0
        for arity in range(2, budget + 2):
            yield (label, (None,) * arity), arity - 1, 1
        return
    lab, kids = t
    # fold over children, carrying the remaining budget
    partial = [((), 0, 0)]
    for kid in kids:
        nxt = []
        for acc, used, cnt in partial:
            for sub, add, c in _variants(kid, label, budget - used, single):
                if single and cnt + c > 1:
                    continue
                nxt.append((acc + (sub,), used + add, cnt + c))
        partial = nxt
    for acc, used, cnt in partial:
        yield (lab, acc), used, cnt


def _generate(n: int, single: bool) -> Iterator[tuple]:
    frontier = {None}
    label = 0
    seen_final = set()
    while frontier:
        label += 1
        nxt = set()
        for t in frontier:
            m = _size(t)
            if m == n:
                if t not in seen_final:
                    seen_final.add(t)
                    yield t
                continue
            for sub, added, cnt in _variants(t, label, n - m, single):
                if cnt:
                    nxt.add(sub)
        frontier = nxt


def _to_tree(t) -> LabeledTree:
    return LabeledTree.from_nested(t if t is None else _listify(t))


def _listify(t):
    if t is None:
        return None
    return (t[0], [_listify(c) for c in t[1]])


def exhaustive_strong(n: int, bound: int = STRONG_BOUND) -> Iterator[LabeledTree]:
    """Every strong tree of size n: one leaf replaced per step."""
    if n < 1:
        raise ValueError("size must be at least 1")
    if n > bound:
        raise OracleBoundError(ModelKind.STRONG, n, bound)
    for t in _generate(n, single=True):
        yield _to_tree(t)


def exhaustive_weak(n: int, bound: int = WEAK_BOUND) -> Iterator[LabeledTree]:
    """Every weak tree of size n: a nonempty subset of leaves replaced per step."""
    if n < 1:
        raise ValueError("size must be at least 1")
    if n > bound:
        raise OracleBoundError(ModelKind.WEAK, n, bound)
    for t in _generate(n, single=False):
        yield _to_tree(t)


def exhaustive(model, n: int, bound: int | None = None) -> Iterator[LabeledTree]:
    model = ModelKind.parse(model)
    if model is ModelKind.STRONG:
        return exhaustive_strong(n, STRONG_BOUND if bound is None else bound)
    return exhaustive_weak(n, WEAK_BOUND if bound is None else bound)


def exhaustive_count(model, n: int, bound: int | None = None) -> int:
    """Number of trees the generator produces, without building arenas."""
    model = ModelKind.parse(model)
    limit = bound if bound is not None else (STRONG_BOUND if model is ModelKind.STRONG else WEAK_BOUND)
    if n < 1:
        raise ValueError("size must be at least 1")
    if n > limit:
        raise OracleBoundError(model, n, limit)
    return sum(1 for _ in _generate(n, single=model is ModelKind.STRONG))
