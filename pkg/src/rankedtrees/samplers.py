"""Uniform samplers, and ranking/unranking for weak trees.

Strong trees are grown by replaying draws ``k_i`` uniform on ``{1..i}``:
``k_i = i`` adds a rightmost leaf to the last created internal node,
otherwise the ``k_i``-th leaf (left-to-right) becomes a binary node.

Weak trees are unranked.  The total order on size-n trees is: by
predecessor size k, descending; inside the block of k, by the rank of the
leaf-substitution composition; then by predecessor rank.  That is exactly
the ``r // g_k`` / ``r mod g_k`` split of the unranking loop.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import kernels
from .exact import weak_count, weak_counts
from .rng import RngHandle
from .tree import LabeledTree, ModelKind, require_valid

Composition = tuple[int, ...]


class RankError(ValueError):
    def __init__(self, rank: int, bound: int, what: str = "rank"):
        self.rank = rank
        self.bound = bound
        super().__init__(f"{what} {rank} out of range: must satisfy 0 <= {what} < {bound}")


# strong ----------------------------------------------------------------------

def _leaf_tree() -> LabeledTree:
    return LabeledTree.leaf()


def build_strong(draws: Sequence[int], n: int) -> LabeledTree:
    """Strong tree encoded by the draws ``k_3..k_n`` (``k_i`` in ``1..i``)."""
    if n == 1:
        return _leaf_tree()
    d = np.ascontiguousarray(draws, dtype=np.int64)
    if d.shape[0] != max(n - 2, 0):
        raise ValueError(f"expected {n - 2} draws for size {n}, got {d.shape[0]}")
    if d.size and (np.any(d < 1) or np.any(d > np.arange(3, n + 1))):
        raise ValueError("draw k_i must lie in 1..i")
    labels, arity = kernels.build_strong(d, n)
    return LabeledTree.from_preorder(labels, arity)


def sample_strong(n: int, rng: RngHandle) -> LabeledTree:
    """Uniform strong tree of size ``n``; uses exactly ``n - 2`` draws for n >= 2."""
    if n < 1:
        raise ValueError("size must be at least 1")
    if n == 1:
        return _leaf_tree()
    return build_strong(rng.strong_draws(n, 1)[0], n)


# compositions ------------------------------------------------------------------

def unrank_composition_reference(n: int, k: int, s: int) -> Composition:
    """Literal recursive form; the first branch grows the last part, the second appends [1]."""
    if n == k and s == 0:
        return (1,) * k
    below = math.comb(n - 2, k - 1)
    if s < below:
        c = list(unrank_composition_reference(n - 1, k, s))
        c[-1] += 1
        return tuple(c)
    return unrank_composition_reference(n - 1, k - 1, s - below) + (1,)


def _check_composition_args(n: int, k: int, s: int) -> int:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    total = math.comb(n - 1, k - 1)
    if not 0 <= s < total:
        raise RankError(s, total, "composition rank")
    return total


def unrank_joins(n: int, k: int, s: int) -> list[int]:
    """Joined gaps (1..n-1, ascending) of the composition of rank ``s``.

    The composition of n into k parts is the set of the n-k gaps between
    consecutive units that are *not* cut.  Reading the reference
    recursion from the top, gap n-1 is joined on the first branch and cut
    on the second, so its order is the reverse colexicographic order of
    join sets: unrank ``C(n-1, n-k) - 1 - s`` in colex with binary search
    per element, O((n-k) log n) binomials.
    """
    total = _check_composition_args(n, k, s)
    J = n - k
    rem = total - 1 - s
    out = []
    hi = n - 1  # exclusive bound on the 0-based element
    for i in range(J, 0, -1):
        # largest c < hi with C(c, i) <= rem; C(i-1, i) = 0 keeps c >= i-1
        lo_c, hi_c = i - 1, hi - 1
        while lo_c < hi_c:
            mid = (lo_c + hi_c + 1) // 2
            if math.comb(mid, i) <= rem:
                lo_c = mid
            else:
                hi_c = mid - 1
        rem -= math.comb(lo_c, i)
        out.append(lo_c + 1)
        hi = lo_c
    out.reverse()
    return out


def joins_to_parts(n: int, joins: Sequence[int]) -> Composition:
    parts = [1]
    jset = set(joins)
    for g in range(1, n):
        if g in jset:
            parts[-1] += 1
        else:
            parts.append(1)
    return tuple(parts)


def parts_to_joins(parts: Sequence[int]) -> list[int]:
    joins = []
    unit = 1
    for p in parts:
        joins.extend(range(unit, unit + p - 1))
        unit += p
    return joins


def unrank_composition(n: int, k: int, s: int) -> Composition:
    return joins_to_parts(n, unrank_joins(n, k, s))


def _rank_joins(n: int, joins: Sequence[int]) -> int:
    J = len(joins)
    colex = sum(math.comb(g - 1, i) for i, g in enumerate(sorted(joins), start=1))
    return math.comb(n - 1, J) - 1 - colex


def rank_composition(parts: Sequence[int]) -> int:
    parts = [int(p) for p in parts]
    if not parts or any(p < 1 for p in parts):
        raise ValueError("a composition needs at least one part, all parts positive")
    return _rank_joins(sum(parts), parts_to_joins(parts))


# weak unranking ------------------------------------------------------------------

def _chain(n: int, s: int) -> list[tuple[int, int, int]]:
    """Top-down list of (size, predecessor size, composition rank)."""
    g = weak_counts(n)
    out = []
    while n > 1:
        r = s
        k = n - 1
        while True:
            block = math.comb(n - 1, k - 1) * g[k]
            if r < block:
                break
            r -= block
            k -= 1
        c, s = divmod(r, g[k])
        out.append((n, k, c))
        n = k
    return out


def _expansions(n: int, k: int, c: int) -> list[tuple[int, int]]:
    """(leaf index, arity) pairs, ascending, for composition rank ``c`` of n into k parts."""
    joins = unrank_joins(n, k, c)
    out: list[tuple[int, int]] = []
    # leaf index of the part containing unit u is u - 1 - (#joins below u)
    before = 0
    prev = -2
    for g in joins:
        if g == prev + 1:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((g - 1 - before, 2))
        before += 1
        prev = g
    return out


def unrank_weak(n: int, s: int) -> LabeledTree:
    if n < 1:
        raise ValueError("size must be at least 1")
    bound = weak_count(n)
    if not 0 <= s < bound:
        raise RankError(s, bound)
    if n == 1:
        return _leaf_tree()
    chain = _chain(n, s)
    labels = [0]
    children: list[list[int]] = [[]]
    leaves = [0]
    for step, (size_, k, c) in enumerate(reversed(chain), start=1):
        for idx, arity in reversed(_expansions(size_, k, c)):
            v = leaves[idx]
            start = len(labels)
            new = list(range(start, start + arity))
            labels[v] = step
            children[v] = new
            labels.extend([0] * arity)
            children.extend([] for _ in range(arity))
            leaves[idx:idx + 1] = new
    return LabeledTree.from_children(labels, children, 0).canonical()


def weak_chain_length(n: int, s: int) -> int:
    """Number of steps (max label) of the tree of rank ``s``, without building it."""
    return len(_chain(n, s))


def _offset(n: int, k: int, g: list[int]) -> int:
    return sum(math.comb(n - 1, j - 1) * g[j] for j in range(k + 1, n))


def rank_weak(tree: LabeledTree) -> int:
    require_valid(tree, ModelKind.WEAK)
    t = tree.canonical()
    labels = t.labels.tolist()
    arity = t.arity.tolist()
    m = len(labels)
    if m == 1:
        return 0
    end = [0] * m  # preorder index just past each subtree
    for v in range(m - 1, -1, -1):
        c = v + 1
        for _ in range(arity[v]):
            c = end[c]
        end[v] = c
    steps = max(labels)
    g = weak_counts(arity.count(0))
    # frontier of the tree after step t: nodes with label > t (or leaves)
    # whose ancestors all have label <= t
    rank = 0
    levels = []
    for t_ in range(1, steps + 1):
        frontier = []
        v = 0
        while v < m:
            if arity[v] and labels[v] < t_:
                v += 1
            else:
                frontier.append(v)
                v = end[v]
        parts = [arity[v] if arity[v] and labels[v] == t_ else 1 for v in frontier]
        levels.append(parts)
    for parts in levels:
        k = len(parts)
        size_ = sum(parts)
        c = rank_composition(parts)
        rank = _offset(size_, k, g) + c * g[k] + rank
    return rank


def sample_weak(n: int, rng: RngHandle) -> LabeledTree:
    if n < 1:
        raise ValueError("size must be at least 1")
    return unrank_weak(n, rng.rand_below(weak_count(n)))


def sample(model, n: int, rng: RngHandle) -> LabeledTree:
    model = ModelKind.parse(model)
    return sample_strong(n, rng) if model is ModelKind.STRONG else sample_weak(n, rng)


__all__ = [
    "RankError", "build_strong", "sample_strong", "unrank_composition",
    "unrank_composition_reference", "rank_composition", "unrank_weak", "rank_weak",
    "sample_weak", "sample", "weak_chain_length",
]
