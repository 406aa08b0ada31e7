"""Transmitter, binary symmetric channel, receiver and ARQ session loop."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ecc import DecodeFailure, LinearBlockCode, decode, encode
from .gf2 import BitVec
from .homophonic import HomophonicCode, SystemParams, decode_h, encode_h
from .keystream import LinearKeystream

ZERO = "zero"
RANDOM = "random"
RECORD_COLUMNS = ("t", "block", "attempts", "ack", "a", "u", "y", "v", "z")


class RetryExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class TransmissionRecord:
    """One physical transmission as seen by an omniscient observer."""

    t: int
    block: int
    attempts: int
    a: BitVec
    u: BitVec
    y: BitVec
    v: BitVec
    z: BitVec
    ack: bool


@dataclass(frozen=True)
class SessionConfig:
    params: SystemParams
    seed: int
    tau: int
    max_retries: int = 32
    plaintext_source: str = ZERO
    # Ideal error detection on the feedback path: a block whose decoded
    # (a, u) differs from what was sent is NACKed even if the ECC decoder
    # reported success.
    integrity_check: bool = True

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")
        if self.plaintext_source not in (ZERO, RANDOM):
            raise ValueError(f"plaintext_source must be '{ZERO}' or '{RANDOM}'")


@dataclass(frozen=True)
class Recovered:
    a: BitVec
    u: BitVec
    error_weight: int


@dataclass(frozen=True)
class Nack:
    reason: str = field(default="decode failure")


def bsc(word: BitVec, p: float, rng: np.random.Generator) -> tuple[BitVec, BitVec]:
    """Flip each bit independently with probability p."""
    if not 0 <= p < 0.5:
        raise ValueError(f"p must be in [0, 0.5), got {p}")
    noise = BitVec.from_bits((rng.random(len(word)) < p).astype(np.uint8))
    return word ^ noise, noise


def transmit(
    code: HomophonicCode,
    ecc: LinearBlockCode,
    ks: LinearKeystream,
    a: BitVec,
    rng: np.random.Generator,
) -> tuple[BitVec, BitVec, int]:
    """Encode ``a`` with fresh randomness and encrypt with the next pad block."""
    u = BitVec.random(code.r, rng)
    t, x = ks.next_block()
    y = encode(ecc, encode_h(code, a, u)) ^ x
    return y, u, t


def receive(
    code: HomophonicCode,
    ecc: LinearBlockCode,
    ks: LinearKeystream,
    z: BitVec,
    t: int,
) -> Recovered | Nack:
    try:
        msg, weight = decode(ecc, z ^ ks.keystream_at(t))
    except DecodeFailure:
        return Nack()
    a, u = decode_h(code, msg)
    return Recovered(a, u, weight)


def run_session(
    cfg: SessionConfig,
    code: HomophonicCode,
    ecc: LinearBlockCode,
    ks: LinearKeystream,
) -> list[TransmissionRecord]:
    """Deliver ``cfg.tau`` blocks, logging every physical transmission.

    Each attempt, including retransmissions, draws fresh randomness and
    consumes a fresh keystream index.  ``ks`` is the transmitter's stream and
    advances; the receiver works on an independent copy.
    """
    rng = np.random.default_rng(cfg.seed)
    rx = ks.copy()
    p = cfg.params.p
    records: list[TransmissionRecord] = []
    for block in range(1, cfg.tau + 1):
        if cfg.plaintext_source == ZERO:
            a = BitVec.zeros(code.l)
        else:
            a = BitVec.random(code.l, rng)
        for attempt in range(1, cfg.max_retries + 1):
            y, u, t = transmit(code, ecc, ks, a, rng)
            z, v = bsc(y, p, rng)
            got = receive(code, ecc, rx, z, t)
            ack = isinstance(got, Recovered)
            if ack and cfg.integrity_check:
                ack = got.a == a and got.u == u
            records.append(TransmissionRecord(t, block, attempt, a, u, y, v, z, ack))
            if ack:
                break
        else:
            raise RetryExhausted(f"block {block} not delivered after {cfg.max_retries} attempts")
    return records


# ---------------------------------------------------------------------------
# record files
# ---------------------------------------------------------------------------


def write_records(records: list[TransmissionRecord], path, meta: dict) -> None:
    """Tab-separated record file; bit fields are MSB-first hex."""
    head = " ".join(f"{k}={v}" for k, v in meta.items())
    with open(path, "w", newline="") as fh:
        fh.write(f"# homolpn-records {head}\n")
        fh.write("\t".join(RECORD_COLUMNS) + "\n")
        for r in records:
            row = [str(r.t), str(r.block), str(r.attempts), "1" if r.ack else "0"]
            row += [r.a.to_hex(), r.u.to_hex(), r.y.to_hex(), r.v.to_hex(), r.z.to_hex()]
            fh.write("\t".join(row) + "\n")


class RecordFormatError(ValueError):
    pass


def read_records(path) -> tuple[dict, list[TransmissionRecord]]:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2 or not lines[0].startswith("# homolpn-records"):
        raise RecordFormatError(f"{path}: missing record-file header")
    meta = {}
    for item in lines[0].split()[2:]:
        key, _, value = item.partition("=")
        meta[key] = value
    try:
        n, m, l = int(meta["n"]), int(meta["m"]), int(meta["l"])  # noqa: E741
    except (KeyError, ValueError) as exc:
        raise RecordFormatError(f"{path}: header lacks n/m/l") from exc
    if tuple(lines[1].split("\t")) != RECORD_COLUMNS:
        raise RecordFormatError(f"{path}: unexpected column line")
    records = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != len(RECORD_COLUMNS):
            raise RecordFormatError(f"{path}:{lineno}: expected {len(RECORD_COLUMNS)} fields")
        try:
            records.append(
                TransmissionRecord(
                    t=int(parts[0]),
                    block=int(parts[1]),
                    attempts=int(parts[2]),
                    ack=parts[3] == "1",
                    a=BitVec.from_hex(parts[4], l),
                    u=BitVec.from_hex(parts[5], m - l),
                    y=BitVec.from_hex(parts[6], n),
                    v=BitVec.from_hex(parts[7], n),
                    z=BitVec.from_hex(parts[8], n),
                )
            )
        except ValueError as exc:
            raise RecordFormatError(f"{path}:{lineno}: {exc}") from exc
    return meta, records


def write_summary(records: list[TransmissionRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "attempts", "ack"])
        for r in records:
            writer.writerow([r.t, r.attempts, int(r.ack)])


def ack_rate(records: list[TransmissionRecord]) -> float:
    return sum(r.ack for r in records) / len(records) if records else float("nan")
