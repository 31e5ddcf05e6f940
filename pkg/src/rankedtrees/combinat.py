"""Exact combinatorial primitives and dense integer polynomials.

Polynomials are lists of Python ints in ascending powers: ``[c0, c1, ...]``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

_STIRLING2: list[list[int]] = [[1]]
_HARMONIC: list[Fraction] = [Fraction(0)]


def factorial(n: int) -> int:
    return math.factorial(n)


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def stirling_partition(n: int, k: int) -> int:
    """Stirling number of the second kind, from the triangle S(n,k) = k S(n-1,k) + S(n-1,k-1)."""
    if n < 0 or k < 0 or k > n:
        return 0
    return stirling_partition_row(n)[k]


def stirling_partition_row(n: int) -> list[int]:
    while len(_STIRLING2) <= n:
        prev = _STIRLING2[-1]
        m = len(prev)
        row = [0] * (m + 1)
        for k in range(1, m + 1):
            row[k] = (k * prev[k] if k < m else 0) + prev[k - 1]
        _STIRLING2.append(row)
    return _STIRLING2[n]


def harmonic(n: int) -> Fraction:
    while len(_HARMONIC) <= n:
        _HARMONIC.append(_HARMONIC[-1] + Fraction(1, len(_HARMONIC)))
    return _HARMONIC[n]


@lru_cache(maxsize=None)
def _comb_row(n: int) -> tuple[int, ...]:
    return tuple(math.comb(n, k) for k in range(n + 1))


def binomial_row(n: int) -> tuple[int, ...]:
    return _comb_row(n)


# polynomials -----------------------------------------------------------------

def poly_trim(p: list[int]) -> list[int]:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_add(p: list[int], q: list[int]) -> list[int]:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return out


def poly_scale(p: list[int], c: int) -> list[int]:
    return [c * a for a in p]


def poly_shift(p: list[int], k: int) -> list[int]:
    """Multiply by ``u**k``."""
    return [0] * k + list(p)


def poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def poly_deriv(p: list[int]) -> list[int]:
    return [i * p[i] for i in range(1, len(p))] or [0]


def poly_eval(p: list[int], x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_from_roots_shifted(shifts) -> list[int]:
    """Expand ``prod (u + s)`` over ``shifts``."""
    out = [1]
    for s in shifts:
        nxt = [0] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i] += s * c
            nxt[i + 1] += c
        out = nxt
    return out
