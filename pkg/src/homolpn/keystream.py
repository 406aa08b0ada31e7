"""Linear keystream model: block t of the pad is ``key @ S^t``."""

from __future__ import annotations

import copy

import numpy as np

from .gf2 import BitMatrix, BitVec, DimensionError, mat_mul, vec_mat_mul


def random_state_matrix(n: int, seed: int) -> BitMatrix:
    """Invertible n x n matrix from random elementary row operations on I."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    a = np.eye(n, dtype=np.uint8)
    if n == 1:
        return BitMatrix.from_bits(a)
    for _ in range(2 * n * n):
        i, j = rng.choice(n, size=2, replace=False)
        if rng.random() < 0.5:
            a[i] ^= a[j]
        else:
            a[[i, j]] = a[[j, i]]
    return BitMatrix.from_bits(a)


class LinearKeystream:
    """Keystream ``x(t) = key @ S^t`` for t >= 1.

    Keeps the last computed power of S, so consecutive indices cost one
    matrix product each.  An instance is meant for a single consumer; use
    :meth:`copy` to hand an independent stream to another party.
    """

    def __init__(self, s: BitMatrix, key: BitVec):
        if s.rows != s.cols:
            raise DimensionError(f"S must be square, got {s.shape}")
        if len(key) != s.rows:
            raise DimensionError(f"key length {len(key)} != S dimension {s.rows}")
        self.s = s
        self.key = key
        self._t = 1
        self._power = s
        self.position = 0  # last index handed out by next_block()

    @property
    def n(self) -> int:
        return self.s.rows

    def power(self, t: int) -> BitMatrix:
        """``S^t``, stepping forward from the memo when possible."""
        if t < 1:
            raise ValueError("t must be >= 1")
        if t < self._t:
            self._t, self._power = 1, self.s
        while self._t < t:
            self._power = mat_mul(self._power, self.s)
            self._t += 1
        return self._power

    @property
    def cached_power(self) -> tuple[int, BitMatrix]:
        return self._t, self._power

    def keystream_at(self, t: int) -> BitVec:
        return vec_mat_mul(self.key, self.power(t))

    def state_columns(self, t: int) -> list[BitVec]:
        """Columns of ``S^t``; bit i of the keystream is ``<key | column i>``."""
        return self.power(t).column_list()

    def next_block(self) -> tuple[int, BitVec]:
        """Advance to the next unused index and return ``(t, x(t))``."""
        self.position += 1
        return self.position, self.keystream_at(self.position)

    def copy(self) -> "LinearKeystream":
        return copy.copy(self)


def keystream_at(ks: LinearKeystream, t: int) -> BitVec:
    return ks.keystream_at(t)


def state_columns(ks: LinearKeystream, t: int) -> list[BitVec]:
    return ks.state_columns(t)
