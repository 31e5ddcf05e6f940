"""Exact enumeration for strongly and weakly increasing Schröder trees.

All counts are Python ints and all moments are :class:`fractions.Fraction`;
floats appear only in the asymptotic helpers at the bottom of the module.
Distribution rows are indexed by the literal parameter value, leading zeros
included.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .combinat import (
    binomial,
    factorial,
    harmonic,
    poly_add,
    poly_deriv,
    poly_from_roots_shifted,
    poly_mul,
    poly_scale,
    poly_shift,
    poly_trim,
    stirling_partition,
)

INTERNAL_NODES = "internal-nodes"
ROOT_ARITY = "root-arity"
ROOT_LEAVES = "root-leaves"
BINARY_NODES = "binary-nodes"
STEPS = "steps"
WEAK_INTERNAL_NODES = "weak-internal-nodes"
STIRLING_CYCLE = "stirling-cycle"

EULER_GAMMA = 0.577215664901533
PI2_OVER_6 = 1.64493406684823
LN2 = 0.693147180559945
E = 2.71828182845905


@dataclass(frozen=True)
class DistRow:
    """Counts ``coeffs[k]`` of size-``n`` trees whose parameter equals ``k``."""

    n: int
    param: str
    coeffs: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.coeffs)

    def factorial_moment(self, r: int) -> Fraction:
        acc = 0
        for k, c in enumerate(self.coeffs):
            if c and k >= r:
                acc += c * math.perm(k, r)
        return Fraction(acc, self.total)

    def mean(self) -> Fraction:
        return self.factorial_moment(1)

    def variance(self) -> Fraction:
        m = self.mean()
        return self.factorial_moment(2) + m - m * m

    def probabilities(self) -> list[Fraction]:
        t = self.total
        return [Fraction(c, t) for c in self.coeffs]

    def to_csv(self) -> str:
        return "".join(f"{self.n},{k},{c}\n" for k, c in enumerate(self.coeffs))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "param": self.param, "coeffs": [str(c) for c in self.coeffs]},
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "DistRow":
        doc = json.loads(text)
        return cls(int(doc["n"]), str(doc["param"]), tuple(int(c) for c in doc["coeffs"]))


# strong model ------------------------------------------------------------------

_STRONG_COUNTS = [0, 1, 1]


def strong_count(n: int) -> int:
    """t_1 = t_2 = 1 and t_n = n t_{n-1}."""
    if n < 1:
        raise ValueError("size must be at least 1")
    while len(_STRONG_COUNTS) <= n:
        m = len(_STRONG_COUNTS)
        _STRONG_COUNTS.append(m * _STRONG_COUNTS[-1])
    return _STRONG_COUNTS[n]


def strong_internal_nodes_rows(limit: int) -> Iterator[DistRow]:
    """Rows n = 1..limit of t_{n,k} = t_{n-1,k} + (n-1) t_{n-1,k-1}."""
    row = [1]
    for n in range(1, limit + 1):
        if n == 2:
            row = [0, 1]
        elif n > 2:
            prev = row
            row = [0] * n
            for k in range(1, n):
                row[k] = (prev[k] if k < n - 1 else 0) + (n - 1) * prev[k - 1]
            row[1] = 1
        yield DistRow(n, INTERNAL_NODES, tuple(row))


@lru_cache(maxsize=16)
def strong_internal_nodes_dist(n: int) -> DistRow:
    if n < 1:
        raise ValueError("size must be at least 1")
    for row in strong_internal_nodes_rows(n):
        pass
    return row


def strong_internal_nodes_product(n: int) -> list[int]:
    """Expansion of ``u * prod_{l=2}^{n-1} (1 + l u)``."""
    if n == 1:
        return [1]
    out = [0, 1]
    for ell in range(2, n):
        out = poly_mul(out, [1, ell])
    return out


def stirling_cycle_row(n: int) -> DistRow:
    """Coefficients of ``SC_n(u) = prod_{i=1}^{n-1} (u + i)``."""
    return DistRow(n, STIRLING_CYCLE, tuple(poly_from_roots_shifted(range(1, n))))


def check_cycle_identity(n: int, row: DistRow | None = None) -> bool:
    """Reversed internal-node row versus ``u/(1+u) SC_n(u)``, exactly."""
    if n < 2:
        raise ValueError("identity is stated for n >= 2")
    row = row or strong_internal_nodes_dist(n)
    reversed_row = [0] * (n + 1)
    for k, c in enumerate(row.coeffs):
        reversed_row[n - k] += c
    rhs = poly_shift(poly_from_roots_shifted(range(2, n)), 1)
    direct = poly_trim(reversed_row) == poly_trim(rhs)
    # second route: (1 + u) * reversed == u * SC_n
    cleared = poly_trim(poly_mul([1, 1], reversed_row)) == poly_trim(
        poly_shift(list(stirling_cycle_row(n).coeffs), 1))
    return direct and cleared


def strong_internal_mean(n: int) -> Fraction:
    """n - H_n + 1/2."""
    if n < 2:
        raise ValueError("mean formula holds for n >= 2")
    return n - harmonic(n) + Fraction(1, 2)


def strong_internal_variance(n: int) -> Fraction:
    """Variance from the distribution row (second factorial moment)."""
    return strong_internal_nodes_dist(n).variance()


def strong_internal_variance_product(n: int) -> Fraction:
    """Variance read off the product form: a sum of independent Bernoulli(l/(l+1))."""
    return sum((Fraction(ell, (ell + 1) ** 2) for ell in range(2, n)), Fraction(0))


def strong_root_arity_rows(limit: int) -> Iterator[DistRow]:
    """t_n(u) = u^{n-1}(u-1) + n t_{n-1}(u), t_1 = 1, t_2 = u^2."""
    poly = [1]
    for n in range(1, limit + 1):
        if n == 2:
            poly = [0, 0, 1]
        elif n > 2:
            poly = poly_scale(poly, n) + [0]
            poly[n] += 1
            poly[n - 1] -= 1
        yield DistRow(n, ROOT_ARITY, tuple(poly))


@lru_cache(maxsize=16)
def strong_root_arity_dist(n: int) -> DistRow:
    if n < 1:
        raise ValueError("size must be at least 1")
    for row in strong_root_arity_rows(n):
        pass
    return row


def strong_root_arity_closed_form(n: int) -> list[int]:
    """n! k/(k+1)! for 2 <= k <= n-1 and 1 at k = n."""
    if n == 1:
        return [1]
    out = [0] * (n + 1)
    f = factorial(n)
    for k in range(2, n):
        out[k] = f * k // factorial(k + 1)
    out[n] = 1
    return out


def root_arity_probability(n: int, k: int) -> Fraction:
    if n < 2:
        raise ValueError("root arity law is stated for n >= 2")
    if 2 <= k <= n - 1:
        return Fraction(2 * k, factorial(k + 1))
    if k == n:
        return Fraction(2, factorial(n))
    return Fraction(0)


def strong_root_leaves_rows(limit: int) -> Iterator[DistRow]:
    """t_n = (n+u) t_{n-1} + u(1-n) t_{n-2} + (1-u) t'_{n-1} + (u^2-u) t'_{n-2}, n >= 4."""
    base = {1: [1], 2: [0, 0, 1], 3: [0, 2, 0, 1]}
    older, prev = None, None
    for n in range(1, limit + 1):
        if n in base:
            cur = list(base[n])
        else:
            d1 = poly_deriv(prev)
            d2 = poly_deriv(older)
            cur = poly_add(poly_scale(prev, n), poly_shift(prev, 1))
            cur = poly_add(cur, poly_shift(poly_scale(older, 1 - n), 1))
            cur = poly_add(cur, poly_add(d1, poly_scale(poly_shift(d1, 1), -1)))
            cur = poly_add(cur, poly_add(poly_shift(d2, 2), poly_scale(poly_shift(d2, 1), -1)))
            cur = poly_trim(cur)
        older, prev = prev, cur
        yield DistRow(n, ROOT_LEAVES, tuple(cur))


@lru_cache(maxsize=16)
def strong_root_leaves_dist(n: int) -> DistRow:
    if n < 1:
        raise ValueError("size must be at least 1")
    for row in strong_root_leaves_rows(n):
        pass
    return row


def strong_binary_nodes_rows(limit: int) -> Iterator[DistRow]:
    """t_n = (1 + u(n-1)) t_{n-1} + (1-u)(n-2) t_{n-2}, n >= 4."""
    base = {1: [1], 2: [0, 1], 3: [1, 0, 2]}
    older, prev = None, None
    for n in range(1, limit + 1):
        if n in base:
            cur = list(base[n])
        else:
            cur = poly_add(prev, poly_shift(poly_scale(prev, n - 1), 1))
            tail = poly_scale(older, n - 2)
            cur = poly_add(cur, poly_add(tail, poly_scale(poly_shift(tail, 1), -1)))
            cur = poly_trim(cur)
        older, prev = prev, cur
        yield DistRow(n, BINARY_NODES, tuple(cur))


@lru_cache(maxsize=16)
def strong_binary_nodes_dist(n: int) -> DistRow:
    if n < 1:
        raise ValueError("size must be at least 1")
    for row in strong_binary_nodes_rows(n):
        pass
    return row


def strong_binary_mean(n: int) -> Fraction:
    """7/3 + n - 2 H_n - 1/n, valid for n >= 3."""
    if n < 3:
        raise ValueError("closed form holds for n >= 3")
    return Fraction(7, 3) + n - 2 * harmonic(n) - Fraction(1, n)


def strong_binary_factorial_moment2(n: int) -> Fraction:
    """E[X(X-1)] for binary nodes via the first-moment recursion, n >= 3."""
    if n < 3:
        raise ValueError("recursion holds for n >= 3")

    def mean(j: int) -> Fraction:
        return {1: Fraction(0), 2: Fraction(1)}.get(j) if j < 3 else strong_binary_mean(j)

    acc = Fraction(0)
    for k in range(3, n + 1):
        acc += Fraction(2 * k - 2, k) * mean(k - 1) - Fraction(2 * k - 4, k * (k - 1)) * mean(k - 2)
    return acc


def strong_binary_variance(n: int) -> Fraction:
    m = strong_binary_mean(n)
    return strong_binary_factorial_moment2(n) + m - m * m


# weak model --------------------------------------------------------------------

class _FubiniTable:
    """g_1..g_N via the rolling triangle T(m,k) = k (T(m-1,k) + T(m-1,k-1)).

    T(m,k) = k! S(m,k) counts weak trees of size m+1 built in k steps, so
    g_{m+1} is the row sum.  Each entry costs one addition and one small
    multiplication, against a product of two large integers per term for
    the binomial recurrence.
    """

    def __init__(self):
        self.g = [0, 1]
        self._row = np.array([1], dtype=object)  # T(0, .)

    def extend(self, n: int) -> None:
        while len(self.g) <= n:
            m = len(self.g) - 1  # next row index: T(m, .) gives g_{m+1}
            prev = self._row
            a = np.zeros(m + 1, dtype=object)
            a[:m] = prev
            a[1:] += prev
            row = np.arange(m + 1, dtype=object) * a
            self._row = row
            self.g.append(int(row.sum()))


_FUBINI = _FubiniTable()


def weak_count(n: int) -> int:
    if n < 1:
        raise ValueError("size must be at least 1")
    _FUBINI.extend(n)
    return _FUBINI.g[n]


def weak_counts(n: int) -> list[int]:
    """``[0, g_1, ..., g_n]`` (shared read-only table)."""
    _FUBINI.extend(n)
    return _FUBINI.g


_G_BINOMIAL = [0, 1]


def weak_count_recurrence(n: int) -> int:
    """g_n = sum_{k=1}^{n-1} C(n-1, k-1) g_k, evaluated literally."""
    while len(_G_BINOMIAL) <= n:
        m = len(_G_BINOMIAL)
        _G_BINOMIAL.append(sum(binomial(m - 1, k - 1) * _G_BINOMIAL[k] for k in range(1, m)))
    return _G_BINOMIAL[n]


def ordered_bell(n: int) -> int:
    """B_n = sum_k k! S(n, k)."""
    return sum(factorial(k) * stirling_partition(n, k) for k in range(n + 1))


_STEPS_ROWS: dict[int, tuple[int, ...]] = {1: (1,)}


def weak_steps_dist(n: int) -> DistRow:
    """g_{n,k} = sum_j C(n-1, j-1) g_{j,k-1} (memoized, cubic: meant for small n)."""
    if n < 1:
        raise ValueError("size must be at least 1")
    for m in range(2, n + 1):
        if m in _STEPS_ROWS:
            continue
        row = [0] * m
        for j in range(1, m):
            c = binomial(m - 1, j - 1)
            for k1, v in enumerate(_STEPS_ROWS[j]):
                if v and k1 + 1 < m:
                    row[k1 + 1] += c * v
        _STEPS_ROWS[m] = tuple(row)
    return DistRow(n, STEPS, _STEPS_ROWS[n])


def weak_steps_stirling(n: int, shift: int = -1) -> list[int]:
    """``k! S(n + shift, k)`` for k = 0..n-1; ``shift=-1`` is the one matching the recurrence."""
    return [factorial(k) * stirling_partition(n + shift, k) for k in range(n)]


def weak_steps_row_fast(n: int) -> DistRow:
    """Same row as :func:`weak_steps_dist` through the rolling k! S(n-1, k) triangle."""
    row = np.array([1], dtype=object)
    for m in range(1, n):
        a = np.zeros(m + 1, dtype=object)
        a[:m] = row
        a[1:] += row
        row = np.arange(m + 1, dtype=object) * a
    coeffs = [int(c) for c in row] + [0] * (n - len(row))
    return DistRow(n, STEPS, tuple(coeffs[:n]) if n > 1 else (1,))


@dataclass(frozen=True)
class BivariateTruncation:
    """Coefficients a_{n,k}: weak trees of size n with k internal nodes, n <= max_size."""

    max_size: int
    rows: tuple[tuple[int, ...], ...]  # rows[n-1][k], 0 <= k < n

    def row(self, n: int) -> DistRow:
        return DistRow(n, WEAK_INTERNAL_NODES, self.rows[n - 1])

    def to_csv(self) -> str:
        return "".join(self.row(n).to_csv() for n in range(1, self.max_size + 1))


def inner_power_coefficient(m: int, n: int) -> list[int]:
    """[z^n] of (z + u z^2/(1-z))^m as a polynomial in u.

    The power factors as z^m (1 + u z/(1-z))^m; taking j copies of the
    u-term contributes C(m, j) u^j z^j (1-z)^{-j}, whose z^{n-m-j}
    coefficient is C(n-m-1, j-1).
    """
    if n < m:
        return [0]
    if n == m:
        return [1]
    d = n - m
    out = [0] * (min(m, d) + 1)
    for j in range(1, min(m, d) + 1):
        out[j] = binomial(m, j) * binomial(d - 1, j - 1)
    return out


def weak_internal_nodes_dist(max_size: int) -> BivariateTruncation:
    """Solve G = z + G(z + u z^2/(1-z), u) - G degree by degree up to z^max_size.

    Comparing z^n coefficients gives 2 a_n = [n=1] + a_n + sum_{m<n} a_m [z^n] S^m,
    so each row only needs rows of smaller size: one triangular pass is exact.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    rows: list[list[int]] = [[1]]
    for n in range(2, max_size + 1):
        acc = [0] * n
        for m in range(1, n):
            coef = inner_power_coefficient(m, n)
            for k, c in enumerate(poly_mul(rows[m - 1], coef)):
                if c:
                    acc[k] += c
        rows.append(acc)
    return BivariateTruncation(max_size, tuple(tuple(r) for r in rows))


def weak_internal_mean(n: int) -> Fraction:
    """Exact mean number of internal nodes of size-n weak trees.

    Differentiating the coefficient recurrence at u = 1 gives
    D_n = sum_m [C(n-1, m-1) D_m + m C(n-2, m-1) g_m], with D_n the total
    internal-node count over all size-n trees.  Quadratic in big integers,
    so meant for n up to a few hundred.
    """
    g = weak_counts(n)
    d = [0, 0]
    for size_ in range(2, n + 1):
        acc = 0
        for m in range(1, size_):
            acc += binomial(size_ - 1, m - 1) * d[m] + m * binomial(size_ - 2, m - 1) * g[m]
        d.append(acc)
    return Fraction(d[n], g[n])


def weak_internal_mean_float(n: int, window: int = 60) -> float:
    """Floating-point mean via the rescaled renewal form of the same recurrences.

    With X_n = g_n ln2^n/(n-1)! and Y_n = D_n ln2^n/(n-1)!:
        X_n = sum_j X_{n-j} ln2^j/j!
        Y_n = sum_j Y_{n-j} ln2^j/j! + ln2/(n-1) sum_j (n-1-j) X_{n-1-j} ln2^j/j!
    Both kernels sum to 1, so the recursion is an average and stays well
    conditioned; terms with j > window are below 1e-60 and dropped.
    """
    if n < 1:
        raise ValueError("size must be at least 1")
    w = np.array([LN2 ** j / math.factorial(j) for j in range(window + 1)])
    x = np.zeros(n + 1)
    y = np.zeros(n + 1)
    x[1] = LN2
    for s in range(2, n + 1):
        lo = max(1, s - window)
        idx = np.arange(s - 1, lo - 1, -1)  # m = s-1 .. lo, j = s-m
        jw = w[s - idx]
        x[s] = float(np.dot(x[idx], jw))
        lo2 = max(1, s - 1 - window)
        idx2 = np.arange(s - 1, lo2 - 1, -1)  # m = s-1-j
        jw2 = w[s - 1 - idx2]
        y[s] = float(np.dot(y[idx], jw)) + LN2 / (s - 1) * float(np.dot(idx2 * x[idx2], jw2))
    return float(y[n] / x[n])


# asymptotic comparison helpers (floats) ---------------------------------------

def weak_count_asymptotic_log(n: int) -> float:
    """log of (n-1)!/(2 ln(2)^n)."""
    return math.lgamma(n) - math.log(2.0) - n * math.log(LN2)


def weak_count_asymptotic(n: int) -> float:
    if n < 2:
        raise ValueError("asymptotic form is used for n >= 2")
    return math.exp(weak_count_asymptotic_log(n))


def log_int(x: int) -> float:
    """Natural log of a positive big integer without float overflow."""
    shift = max(x.bit_length() - 900, 0)
    return math.log(x >> shift) + shift * math.log(2.0)


def strong_internal_asymptotics(n: int) -> tuple[float, float]:
    ln = math.log(n)
    return n - ln - EULER_GAMMA + 0.5, ln + EULER_GAMMA - PI2_OVER_6 - 1.25


def strong_root_leaves_asymptotics(n: int) -> tuple[float, float]:
    return 2 * E / n, 2 * E / n


def strong_binary_asymptotics(n: int) -> tuple[float, float]:
    ln = math.log(n)
    return n - 2 * ln + 7 / 3 - 2 * EULER_GAMMA, 4 * ln


def weak_steps_asymptotics(n: int) -> tuple[float, float]:
    return n / (2 * LN2), (1 - LN2) * n / (2 * LN2) ** 2


def weak_internal_asymptotic_mean(n: int) -> float:
    return n - math.log(n)


def dist_row(model: str, param: str, n: int) -> DistRow:
    """Dispatch used by the CLI."""
    table = {
        ("strong", INTERNAL_NODES): strong_internal_nodes_dist,
        ("strong", STEPS): strong_internal_nodes_dist,
        ("strong", ROOT_ARITY): strong_root_arity_dist,
        ("strong", ROOT_LEAVES): strong_root_leaves_dist,
        ("strong", BINARY_NODES): strong_binary_nodes_dist,
        ("weak", STEPS): weak_steps_dist,
        ("weak", WEAK_INTERNAL_NODES): lambda m: weak_internal_nodes_dist(m).row(m),
    }
    try:
        fn = table[(model, param)]
    except KeyError:
        raise KeyError(f"parameter {param!r} not available for the {model} model") from None
    row = fn(n)
    return DistRow(row.n, param, row.coeffs)


def exact_sum(values: Sequence[Fraction]) -> Fraction:
    return sum(values, Fraction(0))
