"""Chosen-plaintext attack: from eavesdropped words to an LPN instance.

With all-zero plaintext every received word satisfies, bit by bit,

    <key | column i of S^t>  ^  <u(t) | column i of G*>  =  z_i(t) ^ v_i(t)

The random bits ``u(t)`` are nuisance unknowns.  Eliminating them for each
t separately leaves ``n - (m - l)`` equations in the key alone, each of
which XORs several channel-noise bits together and is therefore noisier
than the channel itself.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .gf2 import BitMatrix, BitVec, DimensionError, _pack, eliminate
from .keystream import LinearKeystream

MAX_BRUTE_FORCE_BITS = 24


class DegenerateSample(UserWarning):
    """The random-bit block of some sample had less than full rank."""


class TooLarge(ValueError):
    pass


class EmptyInstance(ValueError):
    pass


class LpnFormatError(ValueError):
    pass


def noise_lower_bound(p: float, w: int) -> float:
    """Probability that the XOR of w+1 independent Bernoulli(p) bits is one."""
    if not 0 <= p < 0.5:
        raise ValueError(f"p must be in [0, 0.5), got {p}")
    if w < 0:
        raise ValueError(f"w must be >= 0, got {w}")
    return (1.0 - (1.0 - 2.0 * p) ** (w + 1)) / 2.0


def xor_fold_estimate(p: float, fold: int, trials: int, seed, chunk: int = 1 << 18) -> float:
    """Monte-Carlo frequency of odd parity among ``fold`` Bernoulli(p) bits."""
    if fold < 1 or trials < 1:
        raise ValueError("fold and trials must be >= 1")
    rng = np.random.default_rng(seed)
    odd = 0
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        bits = rng.random((k, fold)) < p
        odd += int((bits.sum(axis=1) & 1).sum())
        done += k
    return odd / trials


@dataclass(frozen=True)
class CpaTranscript:
    """Everything the eavesdropper holds after a zero-plaintext session."""

    z_samples: list[BitVec]
    g: BitMatrix
    s: BitMatrix
    p: float
    times: list[int] = field(default_factory=list)

    def __post_init__(self):
        n = self.g.cols
        if self.s.shape != (n, n):
            raise DimensionError(f"S must be {n}x{n}, got {self.s.shape}")
        if any(len(z) != n for z in self.z_samples):
            raise DimensionError(f"every sample must have length {n}")
        if not self.times:
            object.__setattr__(self, "times", list(range(1, len(self.z_samples) + 1)))
        if len(self.times) != len(self.z_samples):
            raise ValueError("times and z_samples differ in length")

    @property
    def tau(self) -> int:
        return len(self.z_samples)

    @classmethod
    def from_records(cls, records, g: BitMatrix, s: BitMatrix, p: float, limit: int | None = None):
        chosen = list(records)[:limit] if limit is not None else list(records)
        return cls([r.z for r in chosen], g, s, p, [r.t for r in chosen])


@dataclass(frozen=True)
class LpnInstance:
    """Equations ``<key | c_j> = d_j``, each wrong with probability >= eps."""

    coefficients: BitMatrix
    rhs: np.ndarray
    combo_weights: np.ndarray
    epsilon_bound: float
    n: int
    tau: int
    degenerate: tuple[int, ...] = ()

    def __len__(self) -> int:
        return self.coefficients.rows

    @property
    def rows(self) -> list[BitVec]:
        return self.coefficients.row_list()

    @property
    def w_effective(self) -> int:
        return int(self.combo_weights.min()) - 1 if len(self) else 0


def _reduce_sample(st: np.ndarray, gs_t: np.ndarray, z: BitVec):
    n = st.shape[0]
    r = gs_t.shape[1]
    system = BitMatrix.from_bits(np.hstack([st.T, gs_t]))
    reduced, rec = eliminate(system, range(n, n + r))
    c = reduced.to_array()[:, :n]
    d = rec.apply(z).bits
    return c, d, rec.combo_weights, rec.eliminated_count


def eliminate_randomness(transcript: CpaTranscript, l: int) -> LpnInstance:  # noqa: E741
    """Remove the random-bit unknowns sample by sample.

    For each sample the n equations are reduced with
    :func:`homolpn.gf2.eliminate` on the random-bit columns; the same row
    operations fold the received bits into the right-hand sides.  Results
    are concatenated in transcript order.
    """
    g = transcript.g
    m, n = g.shape
    if not 1 <= l < m:
        raise ValueError(f"need 1 <= l < m, got l={l}, m={m}")
    r = m - l
    gs_t = g.to_array()[l:, :].T
    powers = LinearKeystream(transcript.s, BitVec.zeros(n))
    cs, ds, ws, degenerate = [], [], [], []
    for t, z in zip(transcript.times, transcript.z_samples):
        st = powers.power(t).to_array()
        c, d, w, eliminated = _reduce_sample(st, gs_t, z)
        if eliminated < r:
            degenerate.append(t)
        cs.append(c)
        ds.append(d)
        ws.append(w)
    if degenerate:
        warnings.warn(
            f"{len(degenerate)} sample(s) with a rank-deficient random-bit block", DegenerateSample
        )
    if cs:
        c_all = np.vstack(cs)
        d_all = np.concatenate(ds).astype(np.uint8)
        w_all = np.concatenate(ws).astype(np.int64)
    else:
        c_all = np.zeros((0, n), dtype=np.uint8)
        d_all = np.zeros(0, dtype=np.uint8)
        w_all = np.zeros(0, dtype=np.int64)
    w_eff = int(w_all.min()) - 1 if w_all.size else 0
    return LpnInstance(
        coefficients=BitMatrix(c_all.shape[0], n, _pack(c_all)),
        rhs=d_all,
        combo_weights=w_all,
        epsilon_bound=noise_lower_bound(transcript.p, max(w_eff, 0)),
        n=n,
        tau=transcript.tau,
        degenerate=tuple(degenerate),
    )


def _residuals(instance: LpnInstance, key: BitVec) -> np.ndarray:
    if len(key) != instance.n:
        raise DimensionError(f"key length {len(key)} != n = {instance.n}")
    return kernels.row_parity(instance.coefficients.words, key.words) ^ instance.rhs


def empirical_noise(instance: LpnInstance, true_key: BitVec) -> float:
    """Fraction of equations the given key violates."""
    if not len(instance):
        return 0.0
    return float(_residuals(instance, true_key).mean())


def expected_noise(instance: LpnInstance, p: float) -> float:
    """Mean per-equation error rate implied by the combination weights.

    An equation folded from k originals carries the XOR of k independent
    channel-noise bits, so it is wrong with probability exactly
    ``noise_lower_bound(p, k - 1)``.
    """
    if not len(instance):
        return 0.0
    q = 1.0 - 2.0 * p
    return float(np.mean((1.0 - q ** instance.combo_weights) / 2.0))


def _coefficient_ints(instance: LpnInstance) -> np.ndarray:
    n = instance.n
    place = np.uint64(1) << np.arange(n - 1, -1, -1, dtype=np.uint64)
    bits = instance.coefficients.to_array().astype(np.uint64)
    return (bits * place).sum(axis=1, dtype=np.uint64) if n else np.zeros(len(instance), np.uint64)


def brute_force_recover(instance: LpnInstance, method: str = "wht") -> tuple[BitVec, float]:
    """Exhaustive maximum-agreement key search.

    ``method="wht"`` scores all 2^n keys at once with a Walsh-Hadamard
    transform of the signed coefficient histogram; ``method="direct"``
    evaluates every key against every equation.  Ties go to the
    lexicographically smallest key.
    """
    n = instance.n
    if n > MAX_BRUTE_FORCE_BITS:
        raise TooLarge(f"n = {n} exceeds the exhaustive-search limit of {MAX_BRUTE_FORCE_BITS}")
    rows = len(instance)
    if rows == 0:
        raise EmptyInstance("no equations to score")
    cints = _coefficient_ints(instance)
    if method == "wht":
        hist = np.zeros(1 << n, dtype=np.int64)
        np.add.at(hist, cints.astype(np.int64), 1 - 2 * instance.rhs.astype(np.int64))
        agree = (rows + kernels.walsh_hadamard(hist)) // 2
    elif method == "direct":
        agree = kernels.score_keys(cints, instance.rhs.astype(np.uint8), n)
    else:
        raise ValueError(f"unknown method {method!r}")
    best = int(np.argmax(agree))
    return BitVec.from_int(best, n), float(agree[best]) / rows


# ---------------------------------------------------------------------------
# LPN CSV
# ---------------------------------------------------------------------------


def export_lpn(instance: LpnInstance, sink) -> None:
    """Header ``n=..,epsilon=..,tau=..,rows=..`` then ``bits,rhs,weight`` lines."""
    lines = [f"n={instance.n},epsilon={instance.epsilon_bound!r},tau={instance.tau},rows={len(instance)}"]
    for c, d, w in zip(instance.coefficients.to_strings(), instance.rhs, instance.combo_weights):
        lines.append(f"{c},{int(d)},{int(w)}")
    text = "\n".join(lines) + "\n"
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text)
    else:
        sink.write(text)


def import_lpn(source) -> LpnInstance:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        text = source.read()
    else:
        raise TypeError("source must be a path or a readable file")
    lines = text.strip().splitlines()
    if not lines:
        raise LpnFormatError("empty LPN file")
    try:
        head = dict(item.split("=", 1) for item in lines[0].split(","))
        n, eps = int(head["n"]), float(head["epsilon"])
        tau, count = int(head["tau"]), int(head["rows"])
    except (KeyError, ValueError) as exc:
        raise LpnFormatError(f"bad header {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != count:
        raise LpnFormatError(f"header says {count} rows, found {len(body)}")
    cs: list[str] = []
    rhs, weights = [], []
    for line in body:
        parts = line.split(",")
        if len(parts) != 3 or len(parts[0]) != n or parts[1] not in ("0", "1"):
            raise LpnFormatError(f"bad data line {line!r}")
        cs.append(parts[0])
        rhs.append(int(parts[1]))
        weights.append(int(parts[2]))
    coeff = BitMatrix.from_strings(cs) if cs else BitMatrix.zeros(0, n)
    return LpnInstance(
        coefficients=coeff,
        rhs=np.asarray(rhs, dtype=np.uint8),
        combo_weights=np.asarray(weights, dtype=np.int64),
        epsilon_bound=eps,
        n=n,
        tau=tau,
    )


def success_rate(keys: Sequence[BitVec], truth: Sequence[BitVec]) -> float:
    return sum(k == t for k, t in zip(keys, truth)) / len(truth)
