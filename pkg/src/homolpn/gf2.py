"""Dense bit-packed linear algebra over GF(2).

Vectors are row vectors.  Bit ``0`` is the leftmost character when printed,
so ``BitVec.from_str("1000")`` has a single one at index 0 and matrix rows
print in the usual left-to-right order.

Text formats
------------
Matrix: a ``"ROWS COLS"`` header line, then ROWS lines of COLS ``0``/``1``
characters.  Vector: a single line of ``0``/``1`` characters.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels

_WORD = 64


class DimensionError(ValueError):
    """Operand shapes do not conform."""


class NotInvertible(ValueError):
    """Square matrix is singular over GF(2)."""


class MatrixFormatError(ValueError):
    """Malformed matrix or vector text."""


def _n_words(n_bits: int) -> int:
    return (n_bits + _WORD - 1) // _WORD


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into rows of little-endian uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, cols = bits.shape
    nw = _n_words(cols)
    if nw == 0:
        return np.zeros((rows, 0), dtype=np.uint64)
    packed = np.packbits(bits & 1, axis=1, bitorder="little")
    buf = np.zeros((rows, nw * 8), dtype=np.uint8)
    buf[:, : packed.shape[1]] = packed
    return buf.view("<u8").astype(np.uint64, copy=False).reshape(rows, nw)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    rows = words.shape[0]
    if cols == 0 or rows == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words).astype("<u8", copy=False).view(np.uint8)
    bits = np.unpackbits(as_bytes.reshape(rows, -1), axis=1, bitorder="little")
    return bits[:, :cols]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.uint64)
    arr.setflags(write=False)
    return arr


def _parse_bits(text: str) -> np.ndarray:
    text = text.strip()
    if text and set(text) - {"0", "1"}:
        raise MatrixFormatError(f"expected only '0'/'1' characters, got {text!r}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


class BitVec:
    """Immutable row vector over GF(2)."""

    __slots__ = ("_n", "_words")

    def __init__(self, n: int, words: np.ndarray):
        if words.shape != (_n_words(n),):
            raise ValueError("word buffer does not match length")
        self._n = int(n)
        self._words = _frozen(words)

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, np.zeros(_n_words(n), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        arr = arr.reshape(1, -1)
        return cls(arr.shape[1], _pack(arr)[0])

    @classmethod
    def from_str(cls, text: str) -> "BitVec":
        return cls.from_bits(_parse_bits(text))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitVec":
        """Bit 0 of the vector is the most significant bit of ``value``."""
        if value < 0 or value >> n:
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls.from_bits([(value >> (n - 1 - i)) & 1 for i in range(n)])

    @classmethod
    def from_hex(cls, text: str, n: int) -> "BitVec":
        return cls.from_int(int(text, 16) if text else 0, n)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        bits = np.zeros(n, dtype=np.uint8)
        bits[i] = 1
        return cls.from_bits(bits)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitVec":
        return cls.from_bits(rng.integers(0, 2, size=n, dtype=np.uint8))

    # -- access -------------------------------------------------------------
    @property
    def words(self) -> np.ndarray:
        return self._words

    @property
    def bits(self) -> np.ndarray:
        return _unpack(self._words.reshape(1, -1), self._n)[0]

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, index):
        if isinstance(index, slice):
            return BitVec.from_bits(self.bits[index])
        i = int(index)
        if i < 0:
            i += self._n
        if not 0 <= i < self._n:
            raise IndexError(f"bit index {index} out of range for length {self._n}")
        return int((self._words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

    def __iter__(self):
        return iter(int(b) for b in self.bits)

    def weight(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def is_zero(self) -> bool:
        return not self._words.any()

    def dot(self, other: "BitVec") -> int:
        """Inner product over GF(2)."""
        _same_length(self, other)
        return int(np.bitwise_count(self._words & other._words).sum() & 1)

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec.from_bits(np.concatenate([self.bits, other.bits]))

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | int(b)
        return value

    def to_hex(self) -> str:
        width = max(1, (self._n + 3) // 4)
        return format(self.to_int(), f"0{width}x")

    def to_str(self) -> str:
        return (self.bits + ord("0")).tobytes().decode("ascii")

    # -- arithmetic -----------------------------------------------------------
    def __xor__(self, other: "BitVec") -> "BitVec":
        _same_length(self, other)
        return BitVec(self._n, self._words ^ other._words)

    __add__ = __xor__

    def __matmul__(self, other: "BitMatrix") -> "BitVec":
        return vec_mat_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVec):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._words, other._words)

    def __hash__(self) -> int:
        return hash((self._n, self._words.tobytes()))

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"BitVec('{self.to_str()}')"


def _same_length(a: BitVec, b: BitVec) -> None:
    if len(a) != len(b):
        raise DimensionError(f"length mismatch: {len(a)} vs {len(b)}")


class BitMatrix:
    """Immutable dense matrix over GF(2), rows packed into uint64 words."""

    __slots__ = ("_rows", "_cols", "_words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        if words.shape != (rows, _n_words(cols)):
            raise ValueError("word buffer does not match shape")
        self._rows = int(rows)
        self._cols = int(cols)
        self._words = _frozen(words)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_bits(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_bits(cls, bits) -> "BitMatrix":
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-D array of bits")
        return cls(arr.shape[0], arr.shape[1], _pack(arr))

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BitMatrix":
        parsed = [_parse_bits(r) for r in rows]
        widths = {len(p) for p in parsed}
        if len(widths) > 1:
            raise MatrixFormatError("rows have different lengths")
        cols = widths.pop() if widths else 0
        return cls.from_bits(np.array(parsed, dtype=np.uint8).reshape(len(parsed), cols))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec], cols: int | None = None) -> "BitMatrix":
        if not rows:
            return cls.zeros(0, cols or 0)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise DimensionError("rows have different lengths")
        width = widths.pop()
        return cls(len(rows), width, np.stack([r.words for r in rows]).reshape(len(rows), -1))

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "BitMatrix":
        return cls.from_bits(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))

    # -- access -------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return self._rows, self._cols

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_array(self) -> np.ndarray:
        return _unpack(self._words, self._cols)

    def __getitem__(self, index):
        if not isinstance(index, tuple) or len(index) != 2:
            raise TypeError("index with [row, col] or [row_slice, col_slice]")
        i, j = index
        if isinstance(i, slice) or isinstance(j, slice):
            rs = i if isinstance(i, slice) else slice(i, i + 1)
            cs = j if isinstance(j, slice) else slice(j, j + 1)
            return BitMatrix.from_bits(self.to_array()[rs, cs])
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(f"({i}, {j}) out of range for {self._rows}x{self._cols}")
        return int((self._words[i, j >> 6] >> np.uint64(j & 63)) & np.uint64(1))

    def row(self, i: int) -> BitVec:
        if not 0 <= i < self._rows:
            raise IndexError(f"row {i} out of range")
        return BitVec(self._cols, self._words[i].copy())

    def column(self, j: int) -> BitVec:
        if not 0 <= j < self._cols:
            raise IndexError(f"column {j} out of range")
        return BitVec.from_bits(self.to_array()[:, j])

    def row_list(self) -> list[BitVec]:
        return [self.row(i) for i in range(self._rows)]

    def column_list(self) -> list[BitVec]:
        return self.transpose().row_list()

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_bits(self.to_array().T)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def column_weights(self) -> np.ndarray:
        return self.to_array().sum(axis=0).astype(np.int64)

    def weight(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def density(self) -> float:
        """Fraction of entries equal to one."""
        total = self._rows * self._cols
        return self.weight() / total if total else 0.0

    def is_zero(self) -> bool:
        return not self._words.any()

    # -- arithmetic -----------------------------------------------------------
    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mat_mul(self, other)

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch: {self.shape} vs {other.shape}")
        return BitMatrix(self._rows, self._cols, self._words ^ other._words)

    __add__ = __xor__

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._words, other._words)

    def __hash__(self) -> int:
        return hash((self._rows, self._cols, self._words.tobytes()))

    def to_strings(self) -> list[str]:
        arr = self.to_array() + ord("0")
        return [r.tobytes().decode("ascii") for r in arr]

    def __str__(self) -> str:
        return "\n".join(self.to_strings())

    def __repr__(self) -> str:
        return f"BitMatrix.from_strings({self.to_strings()!r})"

    # -- text I/O -------------------------------------------------------------
    def to_text(self) -> str:
        return "\n".join([f"{self._rows} {self._cols}", *self.to_strings()]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines()]
        if not lines:
            raise MatrixFormatError("empty matrix text")
        header = lines[0].split()
        if len(header) != 2 or not all(h.isdigit() for h in header):
            raise MatrixFormatError(f"bad header line {lines[0]!r}")
        rows, cols = int(header[0]), int(header[1])
        body = lines[1:]
        if cols == 0:
            body = body or [""] * rows
        if len(body) != rows:
            raise MatrixFormatError(f"expected {rows} rows, found {len(body)}")
        if any(len(b) != cols for b in body):
            raise MatrixFormatError(f"every row must have exactly {cols} characters")
        return cls.from_strings(body) if rows else cls.zeros(0, cols)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "BitMatrix":
        return cls.from_text(Path(path).read_text())


def hstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
    return BitMatrix.from_bits(np.hstack([b.to_array() for b in blocks]))


def vstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
    return BitMatrix.from_bits(np.vstack([b.to_array() for b in blocks]))


def load_vector(path) -> BitVec:
    return BitVec.from_str(Path(path).read_text())


def save_vector(vec: BitVec, path) -> None:
    Path(path).write_text(vec.to_str() + "\n")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product over GF(2)."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    out = kernels.matmul(a.words, a.cols, b.words)
    return BitMatrix(a.rows, b.cols, out)


def vec_mat_mul(v: BitVec, m: BitMatrix) -> BitVec:
    """Row vector times matrix over GF(2)."""
    if len(v) != m.rows:
        raise DimensionError(f"vector of length {len(v)} cannot multiply {m.shape}")
    out = kernels.matmul(v.words.reshape(1, -1), len(v), m.words)
    return BitVec(m.cols, out[0])


def mat_vec_mul(m: BitMatrix, v: BitVec) -> BitVec:
    """``m @ v^T`` returned as a row vector of length ``m.rows``."""
    if len(v) != m.cols:
        raise DimensionError(f"{m.shape} cannot multiply a column of length {len(v)}")
    return BitVec.from_bits(kernels.row_parity(m.words, v.words))


def _identity_words(n: int) -> np.ndarray:
    return _pack(np.eye(n, dtype=np.uint8))


def rank(m: BitMatrix) -> int:
    """Row rank over GF(2)."""
    if m.rows == 0 or m.cols == 0:
        return 0
    words = m.words.copy()
    ops = np.zeros((m.rows, 0), dtype=np.uint64)
    pivots = kernels.eliminate_rows(words, ops, np.arange(m.cols, dtype=np.int64), False)
    return int((pivots >= 0).sum())


def invert(m: BitMatrix) -> BitMatrix:
    """Inverse over GF(2) by Gauss-Jordan; raises :class:`NotInvertible`."""
    if m.rows != m.cols:
        raise DimensionError(f"cannot invert non-square {m.shape}")
    n = m.rows
    words = m.words.copy()
    ops = _identity_words(n)
    pivots = kernels.eliminate_rows(words, ops, np.arange(n, dtype=np.int64), True)
    if (pivots < 0).any():
        raise NotInvertible(f"matrix has rank {int((pivots >= 0).sum())} < {n}")
    return BitMatrix(n, n, ops[pivots])


@dataclass(frozen=True)
class EliminationRecord:
    """How each row of an eliminated system was produced from the input rows.

    ``combination`` is the (output rows x input rows) matrix whose row ``j``
    marks the input equations XORed into output row ``j``; replaying it on
    the input reproduces the reduced system, and replaying it on any
    right-hand side folds that side consistently.
    """

    pivot_columns: tuple[int, ...]
    pivot_rows: tuple[int, ...]
    kept_rows: tuple[int, ...]
    combination: BitMatrix

    @property
    def eliminated_count(self) -> int:
        return len(self.pivot_columns)

    @property
    def row_ops(self) -> list[frozenset[int]]:
        arr = self.combination.to_array()
        return [frozenset(np.flatnonzero(r).tolist()) for r in arr]

    @property
    def combo_weights(self) -> np.ndarray:
        return np.bitwise_count(self.combination.words).sum(axis=1).astype(np.int64)

    def replay(self, system: BitMatrix) -> BitMatrix:
        return mat_mul(self.combination, system)

    def apply(self, rhs: BitVec) -> BitVec:
        """Fold a right-hand side vector (one bit per input row)."""
        return mat_vec_mul(self.combination, rhs)


def eliminate(system: BitMatrix, eliminate_cols: Sequence[int]) -> tuple[BitMatrix, EliminationRecord]:
    """Remove the unknowns in ``eliminate_cols`` from a system of equations.

    Rows are equations and columns unknowns.  Columns are processed in the
    order given; for each, the lowest-index unused row holding a one becomes
    the pivot, is XORed into every other unused row holding a one, and is
    then dropped.  The remaining rows, in their original order, form the
    reduced system: zero in every eliminated column.
    """
    cols = [int(c) for c in eliminate_cols]
    if len(set(cols)) != len(cols):
        raise ValueError("eliminate_cols must be distinct")
    if any(not 0 <= c < system.cols for c in cols):
        raise ValueError(f"eliminate_cols out of range for {system.cols} columns")
    words = system.words.copy()
    ops = _identity_words(system.rows)
    pivots = kernels.eliminate_rows(words, ops, np.asarray(cols, dtype=np.int64), False)
    used = {int(p) for p in pivots if p >= 0}
    kept = [r for r in range(system.rows) if r not in used]
    reduced = BitMatrix(len(kept), system.cols, words[kept])
    record = EliminationRecord(
        pivot_columns=tuple(c for c, p in zip(cols, pivots) if p >= 0),
        pivot_rows=tuple(int(p) for p in pivots if p >= 0),
        kept_rows=tuple(kept),
        combination=BitMatrix(len(kept), system.rows, ops[kept]),
    )
    return reduced, record
