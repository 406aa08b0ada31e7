import itertools

import numpy as np
import pytest

from homolpn.channel import (
    RANDOM,
    ZERO,
    Nack,
    RecordFormatError,
    Recovered,
    RetryExhausted,
    SessionConfig,
    ack_rate,
    bsc,
    read_records,
    receive,
    run_session,
    transmit,
    write_records,
    write_summary,
)
from homolpn.ecc import encode
from homolpn.gf2 import BitMatrix, BitVec
from homolpn.homophonic import SystemParams, encode_h
from homolpn.keystream import LinearKeystream, random_state_matrix


class FixedBits:
    """Stands in for a Generator when a test needs to choose u."""

    def __init__(self, bits):
        self.bits = np.array(bits, dtype=np.uint8)

    def integers(self, low, high, size=None, dtype=None):
        return self.bits


def _session(code, ecc, p, tau, seed=0, mode=ZERO, key_seed=1, max_retries=32):
    params = SystemParams(ecc.n, ecc.m, code.l, code.w, p)
    cfg = SessionConfig(params, seed, tau, max_retries=max_retries, plaintext_source=mode)
    ks = LinearKeystream(random_state_matrix(ecc.n, seed + 2), BitVec.random(ecc.n, np.random.default_rng(key_seed)))
    return run_session(cfg, code, ecc, ks), ks


# -- bsc ------------------------------------------------------------------------


def test_bsc_p0_is_identity(rng):
    word = BitVec.random(50, rng)
    out, noise = bsc(word, 0.0, rng)
    assert out == word and noise.is_zero()


def test_bsc_flip_rate():
    word = BitVec.zeros(1_000_000)
    out, noise = bsc(word, 0.1, np.random.default_rng(7))
    assert out == noise
    assert abs(noise.weight() / 1_000_000 - 0.1) < 0.002


def test_bsc_deterministic():
    w = BitVec.zeros(300)
    assert bsc(w, 0.2, np.random.default_rng(3)) == bsc(w, 0.2, np.random.default_rng(3))


def test_bsc_rejects_bad_p(rng):
    with pytest.raises(ValueError):
        bsc(BitVec.zeros(4), 0.5, rng)


# -- transmit / receive ---------------------------------------------------------


def test_transmit_all_zero(ex1, hamming):
    ks = LinearKeystream(BitMatrix.identity(7), BitVec.zeros(7))
    y, u, t = transmit(ex1, hamming, ks, BitVec.zeros(2), FixedBits([0, 0]))
    assert y.is_zero() and u.is_zero() and t == 1


def test_transmit_worked_example(ex1, hamming):
    ks = LinearKeystream(BitMatrix.identity(7), BitVec.from_str("1010101"))
    y, u, t = transmit(ex1, hamming, ks, BitVec.from_str("10"), FixedBits([1, 1]))
    assert u.to_str() == "11" and t == 1
    # [a||u] G_H = 1101, then 1101 G_ECC = 1101100
    assert y.to_str() == "0111001"


def test_noiseless_roundtrip(ex1, hamming, rng):
    ks = LinearKeystream(random_state_matrix(7, 1), BitVec.random(7, rng))
    rx = ks.copy()
    for _ in range(1000):
        a = BitVec.random(2, rng)
        y, u, t = transmit(ex1, hamming, ks, a, rng)
        got = receive(ex1, hamming, rx, y, t)
        assert got == Recovered(a, u, 0)


def test_single_flip_corrected(ex1, hamming, rng):
    ks = LinearKeystream(random_state_matrix(7, 1), BitVec.random(7, rng))
    a = BitVec.from_str("01")
    y, u, t = transmit(ex1, hamming, ks, a, rng)
    for i in range(7):
        got = receive(ex1, hamming, ks, y ^ BitVec.unit(7, i), t)
        assert got == Recovered(a, u, 1)


def test_weight_three_errors_never_recover_the_block(ex1, hamming):
    ks = LinearKeystream(BitMatrix.identity(7), BitVec.from_str("0110011"))
    for a_int, u_int in itertools.product(range(4), range(4)):
        a, u = BitVec.from_int(a_int, 2), BitVec.from_int(u_int, 2)
        y = encode(hamming, encode_h(ex1, a, u)) ^ ks.keystream_at(1)
        for pos in itertools.combinations(range(7), 3):
            err = BitVec.from_bits([int(i in pos) for i in range(7)])
            got = receive(ex1, hamming, ks, y ^ err, 1)
            assert isinstance(got, (Recovered, Nack))
            if isinstance(got, Recovered):
                assert (got.a, got.u) != (a, u)


# -- sessions -------------------------------------------------------------------


def test_session_p0(ex1, hamming):
    records, _ = _session(ex1, hamming, 0.0, 50)
    assert len(records) == 50
    assert all(r.attempts == 1 and r.ack for r in records)
    assert all(r.a.is_zero() for r in records)


def test_random_mode_varies_plaintext(ex1, hamming):
    records, _ = _session(ex1, hamming, 0.0, 60, mode=RANDOM)
    assert len({r.a for r in records}) > 1


def test_session_bookkeeping(ex1, hamming):
    records, ks = _session(ex1, hamming, 0.15, 300, seed=4)
    ts = [r.t for r in records]
    assert ts == list(range(1, len(records) + 1))
    assert ks.position == len(records)
    assert sum(r.ack for r in records) == 300
    for r in records:
        assert r.z == r.y ^ r.v
        # the (7,4) decoder succeeds exactly when at most one bit flipped
        assert r.ack == (r.v.weight() <= 1)
    for prev, cur in zip(records, records[1:]):
        if cur.block == prev.block:
            assert cur.attempts == prev.attempts + 1 and not prev.ack
        else:
            assert cur.block == prev.block + 1 and cur.attempts == 1 and prev.ack


def test_session_deterministic(ex1, hamming):
    a, _ = _session(ex1, hamming, 0.1, 100, seed=9)
    b, _ = _session(ex1, hamming, 0.1, 100, seed=9)
    assert a == b


def test_retry_exhausted(ex1, hamming):
    with pytest.raises(RetryExhausted):
        _session(ex1, hamming, 0.45, 200, max_retries=1)


def test_session_config_checks():
    params = SystemParams(7, 4, 2, 1, 0.1)
    with pytest.raises(ValueError):
        SessionConfig(params, 0, 0)
    with pytest.raises(ValueError):
        SessionConfig(params, 0, 5, max_retries=0)
    with pytest.raises(ValueError):
        SessionConfig(params, 0, 5, plaintext_source="chosen")


# -- record files ---------------------------------------------------------------


def test_records_roundtrip(tmp_path, ex1, hamming):
    records, _ = _session(ex1, hamming, 0.1, 40, seed=2)
    path = tmp_path / "records.tsv"
    write_records(records, path, {"n": 7, "m": 4, "l": 2, "p": 0.1})
    meta, back = read_records(path)
    assert back == records
    assert meta["p"] == "0.1"
    write_summary(records, tmp_path / "summary.csv")
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0] == "t,attempts,ack" and len(lines) == len(records) + 1
    assert ack_rate(records) == 40 / len(records)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "t\tblock\n",
        "# homolpn-records n=7\nt\tblock\tattempts\tack\ta\tu\ty\tv\tz\n",
        "# homolpn-records n=7 m=4 l=2\nt\tblock\n",
        "# homolpn-records n=7 m=4 l=2\nt\tblock\tattempts\tack\ta\tu\ty\tv\tz\n1\t1\t1\n",
        "# homolpn-records n=7 m=4 l=2\nt\tblock\tattempts\tack\ta\tu\ty\tv\tz\n1\t1\t1\t1\t0\t0\tzz\t0\t0\n",
    ],
)
def test_read_records_malformed(tmp_path, text):
    path = tmp_path / "bad.tsv"
    path.write_text(text)
    with pytest.raises(RecordFormatError):
        read_records(path)
