"""Seeded random source with an exact count of consumed random bits.

Streams
-------
``RngHandle(seed, stream)`` draws from PCG64 seeded by
``numpy.random.SeedSequence(seed, spawn_key=(stream,))``.  The seed
sequence hashes (seed, stream) into the generator state, so every stream
of a given seed is statistically independent and reproducible.  Cohorts
assign one stream per fixed-size chunk of samples (not per worker), which
makes results independent of the number of workers.

Bits
----
All draws read one continuous bit stream (64-bit PCG64 output words, most
significant bit first).  ``bits`` counts the bits actually read, so the
counter does not depend on how draws are batched.  Small ranges use the
Fast Dice Roller, a rejection sampler against the power-of-two envelope
that recycles the rejected excess; big-integer ranks use plain rejection
over ``bit_length(bound - 1)`` bits.
"""

from __future__ import annotations

import numpy as np

from . import kernels

_CHUNK_WORDS = 1 << 14
_SMALL = 1 << 62


class RngHandle:
    def __init__(self, seed: int = 0, stream: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be non-negative")
        self.seed = int(seed)
        self.stream = int(stream)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._bitgen = np.random.PCG64(seq)
        self._buf = np.zeros(0, dtype=np.uint64)
        self._pos = 0
        self.bits = 0
        self.draws = 0

    # bit buffer ---------------------------------------------------------

    def _refill(self, need_bits: int) -> None:
        keep = self._buf[self._pos >> 6:]
        self._pos &= 63
        words = max(_CHUNK_WORDS, -(-need_bits // 64) + 1)
        fresh = self._bitgen.random_raw(words).astype(np.uint64)
        self._buf = np.concatenate([keep, fresh]) if keep.size else fresh

    def _available(self) -> int:
        return self._buf.shape[0] * 64 - self._pos

    def random_bits(self, b: int) -> int:
        """Next ``b`` bits of the stream as a non-negative integer."""
        if b <= 0:
            return 0
        if self._available() < b:
            self._refill(b)
        lo = self._pos >> 6
        hi = (self._pos + b + 63) >> 6
        chunk = int.from_bytes(self._buf[lo:hi].astype(">u8").tobytes(), "big")
        total = (hi - lo) * 64
        value = (chunk >> (total - (self._pos & 63) - b)) & ((1 << b) - 1)
        self._pos += b
        self.bits += b
        return value

    # draws --------------------------------------------------------------

    def _fdr(self, bounds: np.ndarray, rows: int) -> np.ndarray:
        out = np.empty((rows, bounds.shape[0]), dtype=np.int64)
        state = np.array([0, 0, 1, 0], dtype=np.int64)
        while True:
            limit = self._buf.shape[0] * 64
            start = self._pos
            self._pos = int(kernels.fdr_fill(self._buf, start, limit, bounds, out, state))
            self.bits += self._pos - start
            if state[0] >= rows:
                break
            self._refill(64 * _CHUNK_WORDS)
        self.draws += out.size
        return out

    def rand_int(self, a: int, b: int) -> int:
        """Uniform integer in ``{a, ..., b}``."""
        if a > b:
            raise ValueError(f"empty range [{a}, {b}]")
        m = b - a + 1
        if m == 1:
            self.draws += 1
            return a
        if m <= _SMALL:
            return a + int(self._fdr(np.array([m], dtype=np.int64), 1)[0, 0])
        self.draws += 1
        return a + self._rejection(m)

    def rand_ints(self, a: int, b: int, size: int) -> np.ndarray:
        """``size`` independent uniform draws on ``{a..b}`` (range below 2**62)."""
        m = b - a + 1
        if not 1 <= m <= _SMALL:
            raise ValueError("range must hold between 1 and 2**62 values")
        return a + self._fdr(np.array([m], dtype=np.int64), size)[:, 0]

    def strong_draws(self, n: int, rows: int = 1) -> np.ndarray:
        """``rows`` sequences ``k_3..k_n`` with ``k_i`` uniform on ``{1..i}``."""
        if n < 3:
            return np.zeros((rows, 0), dtype=np.int64)
        bounds = np.arange(3, n + 1, dtype=np.int64)
        return self._fdr(bounds, rows) + 1

    def _rejection(self, m: int) -> int:
        w = (m - 1).bit_length()
        while True:
            x = self.random_bits(w)
            if x < m:
                return x

    def rand_below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection on ``bit_length(bound-1)`` bits."""
        if bound < 1:
            raise ValueError("bound must be positive")
        self.draws += 1
        if bound == 1:
            return 0
        return self._rejection(bound)
