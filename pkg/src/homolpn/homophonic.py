"""Linear homophonic encoder: construction, criteria checks, encode/decode.

The encoder maps ``[a || u]`` (l data bits, m-l random bits) to
``[a || u] @ G_H`` with

    G_H = [[ 0_{l x (m-l)}   I_l  ],
           [ I_{m-l}         G4   ]]

so the output is ``(u, a ^ u @ G4)``.  Every data bit is masked by at least
one random bit as long as no column of ``G4`` is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ecc import LinearBlockCode
from .gf2 import BitMatrix, BitVec, DimensionError, NotInvertible, invert, mat_mul, rank, vec_mat_mul, vstack, hstack


STRICT = "strict"
LENIENT = "lenient"


class InfeasibleParams(ValueError):
    """Parameters admit no encoder meeting the requested criteria."""


@dataclass(frozen=True)
class SystemParams:
    n: int
    m: int
    l: int  # noqa: E741
    w: int
    p: float = 0.0

    def __post_init__(self):
        if not 0 <= self.p < 0.5:
            raise InfeasibleParams(f"crossover probability must be in [0, 0.5), got {self.p}")
        if self.w < 0:
            raise InfeasibleParams(f"w must be non-negative, got {self.w}")
        if not self.m < self.n:
            raise InfeasibleParams(f"need m < n, got m={self.m}, n={self.n}")
        if self.l < 1 or self.l > self.m:
            raise InfeasibleParams(f"need 1 <= l <= m, got l={self.l}, m={self.m}")
        if self.m > 2 * self.l:
            raise InfeasibleParams(
                f"m <= 2l violated (m={self.m}, l={self.l}): more random bits than data bits"
            )

    @property
    def r(self) -> int:
        """Number of random bits per block."""
        return self.m - self.l


@dataclass(frozen=True)
class HomophonicCode:
    g_h: BitMatrix
    g_h_inv: BitMatrix | None
    l: int  # noqa: E741
    m: int
    w: int

    @property
    def g_h4(self) -> BitMatrix:
        return self.g_h[self.l :, self.m - self.l :]

    @property
    def r(self) -> int:
        return self.m - self.l

    @classmethod
    def from_matrix(cls, g_h: BitMatrix, l: int, w: int) -> "HomophonicCode":  # noqa: E741
        """Wrap an arbitrary m x m matrix; a singular one gets ``g_h_inv=None``."""
        if g_h.rows != g_h.cols:
            raise DimensionError(f"G_H must be square, got {g_h.shape}")
        if not 1 <= l < g_h.rows:
            raise DimensionError(f"need 1 <= l < m, got l={l}, m={g_h.rows}")
        try:
            inv = invert(g_h)
        except NotInvertible:
            inv = None
        return cls(g_h, inv, l, g_h.rows, w)

    @classmethod
    def from_g4(cls, g4: BitMatrix, w: int) -> "HomophonicCode":
        r, l = g4.shape  # noqa: E741
        g_h = vstack(
            [
                hstack([BitMatrix.zeros(l, r), BitMatrix.identity(l)]),
                hstack([BitMatrix.identity(r), g4]),
            ]
        )
        return cls.from_matrix(g_h, l, w)


def infer_split(g_h: BitMatrix) -> int | None:
    """Return the l for which ``g_h`` has the generic block layout, if any."""
    m = g_h.rows
    for l in range(m - 1, 0, -1):  # noqa: E741
        r = m - l
        top = hstack([BitMatrix.zeros(l, r), BitMatrix.identity(l)])
        if g_h[:l, :] == top and g_h[l:, :r] == BitMatrix.identity(r):
            return l
    return None


def _raise_column_weights(g4: BitMatrix, target: int) -> BitMatrix:
    """Bring every column of ``g4`` to weight >= target.

    Columns are processed left to right.  A light column absorbs, one at a
    time, the lowest-index *original* column (other than itself) whose XOR
    strictly increases its weight; at most ``l`` absorptions per column.
    """
    base = g4.to_array().astype(np.uint8)
    out = base.copy()
    r, l = base.shape  # noqa: E741
    for j in range(l):
        attempts = 0
        while out[:, j].sum() < target:
            if attempts >= l:
                raise InfeasibleParams(f"cannot raise column {j} to weight {target}")
            cur = int(out[:, j].sum())
            for i in range(l):
                if i != j and int((out[:, j] ^ base[:, i]).sum()) > cur:
                    out[:, j] ^= base[:, i]
                    break
            else:
                raise InfeasibleParams(f"cannot raise column {j} to weight {target}")
            attempts += 1
    return BitMatrix.from_bits(out)


def seed_g4(r: int, l: int) -> BitMatrix:  # noqa: E741
    """Sparsest mixing start: column j is the unit vector at row j mod r."""
    bits = np.zeros((r, l), dtype=np.uint8)
    bits[np.arange(l) % r, np.arange(l)] = 1
    return BitMatrix.from_bits(bits)


def build_generic(params: SystemParams, ecc: LinearBlockCode, target: str = STRICT) -> HomophonicCode:
    """Construct a G_H with the generic layout meeting the design criteria.

    With a systematic ECC the random-bit rows of ``G = G_H @ G_ECC`` start
    with ``I_{m-l}``, so their rank is exactly m-l for any ``G4``; the rank
    condition is therefore a condition on the parameters, and ``G4`` only
    has to satisfy the column-weight condition.

    ``target`` selects the rank threshold: ``"strict"`` needs rank >= w+1,
    ``"lenient"`` accepts rank >= w.
    """
    if target not in (STRICT, LENIENT):
        raise ValueError(f"target must be '{STRICT}' or '{LENIENT}', got {target!r}")
    if params.m != ecc.m or params.n != ecc.n:
        raise DimensionError(
            f"params (m={params.m}, n={params.n}) do not match the code ({ecc.m}, {ecc.n})"
        )
    l, r, w = params.l, params.r, params.w  # noqa: E741
    need = w + 1 if target == STRICT else w
    if r < 1:
        raise InfeasibleParams("l = m leaves no random bits")
    if need > l:
        raise InfeasibleParams(f"rank {need} needed but the rank of G* is at most l = {l}")
    if need > r:
        raise InfeasibleParams(f"rank {need} needed but G* has only m-l = {r} rows")
    if w > r:
        raise InfeasibleParams(f"columns of G4 have only {r} entries, cannot reach weight {w}")
    g4 = _raise_column_weights(seed_g4(r, l), max(w, 1))
    return HomophonicCode.from_g4(g4, w)


def _check_len(vec: BitVec, expected: int, name: str) -> None:
    if len(vec) != expected:
        raise DimensionError(f"{name} has length {len(vec)}, expected {expected}")


def encode_h(code: HomophonicCode, a: BitVec, u: BitVec) -> BitVec:
    _check_len(a, code.l, "a")
    _check_len(u, code.r, "u")
    return vec_mat_mul(a.concat(u), code.g_h)


def decode_h(code: HomophonicCode, word: BitVec) -> tuple[BitVec, BitVec]:
    _check_len(word, code.m, "word")
    if code.g_h_inv is None:
        raise NotInvertible("homophonic matrix is singular")
    au = vec_mat_mul(word, code.g_h_inv)
    return au[: code.l], au[code.l :]


def compose(code: HomophonicCode, ecc: LinearBlockCode) -> BitMatrix:
    """``G = G_H @ G_ECC``, the single matrix applied at the transmitter."""
    if code.m != ecc.m:
        raise DimensionError(f"homophonic m={code.m} != ECC m={ecc.m}")
    return mat_mul(code.g_h, ecc.generator)


def g_star(code: HomophonicCode, ecc: LinearBlockCode) -> BitMatrix:
    """The rows of G multiplied by the random bits (the last m-l rows)."""
    return compose(code, ecc)[code.l :, :]


@dataclass(frozen=True)
class CriteriaReport:
    invertible: bool
    mixing_ok: bool
    min_column_weight: int
    g_star: BitMatrix
    g_star_rank: int
    passes_strict: bool
    passes_lenient: bool
    density_g_h: float
    density_g: float
    density_g_h_inv: float | None

    def to_dict(self) -> dict:
        return {
            "invertible": self.invertible,
            "mixing_ok": self.mixing_ok,
            "min_column_weight": self.min_column_weight,
            "g_star": self.g_star.to_text(),
            "g_star_rank": self.g_star_rank,
            "passes_strict": self.passes_strict,
            "passes_lenient": self.passes_lenient,
            "density_g_h": self.density_g_h,
            "density_g": self.density_g,
            "density_g_h_inv": self.density_g_h_inv,
        }


def validate(code: HomophonicCode, ecc: LinearBlockCode) -> CriteriaReport:
    """Check invertibility, mixing, weight, dependability and sparsity.

    ``passes_strict`` asks for rank(G*) >= w+1 and ``passes_lenient`` for
    rank(G*) >= w; both also require invertibility, mixing and every column
    of G4 to have weight >= w.
    """
    g = compose(code, ecc)
    gs = g[code.l :, :]
    weights = code.g_h4.column_weights()
    min_w = int(weights.min()) if weights.size else 0
    invertible = code.g_h_inv is not None
    mixing = bool(weights.size) and min_w >= 1
    gs_rank = rank(gs)
    base_ok = invertible and mixing and min_w >= code.w
    return CriteriaReport(
        invertible=invertible,
        mixing_ok=mixing,
        min_column_weight=min_w,
        g_star=gs,
        g_star_rank=gs_rank,
        passes_strict=base_ok and gs_rank >= code.w + 1,
        passes_lenient=base_ok and gs_rank >= code.w,
        density_g_h=code.g_h.density(),
        density_g=g.density(),
        density_g_h_inv=code.g_h_inv.density() if invertible else None,
    )
