"""Systematic binary linear block codes with syndrome-table decoding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix, BitVec, DimensionError, hstack, vec_mat_mul, vstack

DEFAULT_MAX_PARITY_BITS = 16
# Hard stop on coset-leader enumeration; missing entries decode as failures.
MAX_ENUMERATED_PATTERNS = 1 << 22


class DecodeFailure(Exception):
    """Syndrome points to an error pattern beyond the correction capability."""


class SyndromeTableTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class LinearBlockCode:
    """An (m, n) code with generator ``[I_m | R]``.

    Message bits sit verbatim in codeword positions ``0..m-1``.  Splitting
    the generator rows as ``[[I, 0, P], [0, I, Q]]`` gives the P and Q blocks
    used by the homophonic construction; the split point is the caller's.
    """

    m: int
    n: int
    generator: BitMatrix
    parity_check: BitMatrix
    syndrome_table: dict[int, BitVec] = field(repr=False, compare=False)
    t_capability: int

    @property
    def redundancy(self) -> BitMatrix:
        return self.generator[:, self.m :]

    def syndrome(self, word: BitVec) -> int:
        return vec_mat_mul(word, self.parity_check.T).to_int()

    def save(self, path) -> None:
        self.generator.save(path)

    @classmethod
    def load(cls, path, max_parity_bits: int = DEFAULT_MAX_PARITY_BITS) -> "LinearBlockCode":
        return from_generator(BitMatrix.load(path), max_parity_bits)


def _syndrome_table(h: BitMatrix, max_patterns: int = MAX_ENUMERATED_PATTERNS):
    """Coset leaders by increasing weight, first writer wins.

    Returns the table and the largest weight ``t`` such that all patterns of
    weight <= t have distinct syndromes.
    """
    n = h.cols
    r = h.rows
    col_syn = [h.column(j).to_int() for j in range(n)]
    size = 1 << r
    table: dict[int, BitVec] = {0: BitVec.zeros(n)}
    t_cap = None
    seen = 1
    for w in range(1, n + 1):
        if len(table) == size:
            if t_cap is None:
                t_cap = w - 1
            break
        for pos in itertools.combinations(range(n), w):
            seen += 1
            if seen > max_patterns:
                break
            s = 0
            for j in pos:
                s ^= col_syn[j]
            if s in table:
                if t_cap is None:
                    t_cap = w - 1
                continue
            bits = np.zeros(n, dtype=np.uint8)
            bits[list(pos)] = 1
            table[s] = BitVec.from_bits(bits)
        if seen > max_patterns:
            break
    if t_cap is None:
        t_cap = n if len(table) == size else 0
    return table, t_cap


def from_generator(generator: BitMatrix, max_parity_bits: int = DEFAULT_MAX_PARITY_BITS) -> LinearBlockCode:
    """Build the code for a systematic generator ``[I_m | R]``."""
    m, n = generator.shape
    if m > n:
        raise DimensionError(f"generator must have m <= n, got {m}x{n}")
    if generator[:, :m] != BitMatrix.identity(m):
        raise ValueError("generator is not in systematic form [I_m | R]")
    if n - m > max_parity_bits:
        raise SyndromeTableTooLarge(
            f"n - m = {n - m} parity bits exceeds the syndrome-table cap of {max_parity_bits}"
        )
    redundancy = generator[:, m:]
    parity_check = hstack([redundancy.T, BitMatrix.identity(n - m)])
    table, t_cap = _syndrome_table(parity_check)
    return LinearBlockCode(m, n, generator, parity_check, table, t_cap)


def from_systematic_parity(
    p_block: BitMatrix, q_block: BitMatrix, max_parity_bits: int = DEFAULT_MAX_PARITY_BITS
) -> LinearBlockCode:
    """Assemble ``[[I, 0, P], [0, I, Q]]`` from its parity blocks.

    ``p_block`` is (m-l) x (n-m) and ``q_block`` is l x (n-m).
    """
    if p_block.cols != q_block.cols:
        raise DimensionError("P and Q must have the same number of columns (n - m)")
    m = p_block.rows + q_block.rows
    generator = hstack([BitMatrix.identity(m), vstack([p_block, q_block])])
    return from_generator(generator, max_parity_bits)


def hamming_7_4() -> LinearBlockCode:
    """The (7, 4) Hamming code with generator rows 1000110 ... 0001111."""
    p_block = BitMatrix.from_strings(["110", "101"])
    q_block = BitMatrix.from_strings(["011", "111"])
    return from_systematic_parity(p_block, q_block)


def single_parity(m: int) -> LinearBlockCode:
    """The (m+1, m) even-parity code: detects, never corrects."""
    return from_generator(hstack([BitMatrix.identity(m), BitMatrix.from_bits(np.ones((m, 1)))]))


def encode(code: LinearBlockCode, msg: BitVec) -> BitVec:
    if len(msg) != code.m:
        raise DimensionError(f"message length {len(msg)} != m = {code.m}")
    return vec_mat_mul(msg, code.generator)


def decode(code: LinearBlockCode, word: BitVec) -> tuple[BitVec, int]:
    """Bounded-distance decoding.

    Returns the message and the weight of the corrected error pattern, or
    raises :class:`DecodeFailure` when the coset leader is heavier than
    ``t_capability``.  Beyond the capability a decoder cannot tell a
    miscorrection from a correction, so a heavy error may still come back as
    a wrong message with a small reported weight.
    """
    if len(word) != code.n:
        raise DimensionError(f"word length {len(word)} != n = {code.n}")
    leader = code.syndrome_table.get(code.syndrome(word))
    if leader is None or leader.weight() > code.t_capability:
        raise DecodeFailure("syndrome exceeds the correction capability")
    corrected = word ^ leader
    return corrected[: code.m], leader.weight()
