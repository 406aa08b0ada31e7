import io

import numpy as np
import pytest

from homolpn.attack import (
    CpaTranscript,
    DegenerateSample,
    EmptyInstance,
    LpnFormatError,
    LpnInstance,
    TooLarge,
    brute_force_recover,
    eliminate_randomness,
    empirical_noise,
    expected_noise,
    export_lpn,
    import_lpn,
    noise_lower_bound,
    success_rate,
    xor_fold_estimate,
)
from homolpn.channel import SessionConfig, run_session
from homolpn.ecc import single_parity
from homolpn.gf2 import BitMatrix, BitVec, DimensionError
from homolpn.homophonic import SystemParams, build_generic, compose, g_star
from homolpn.keystream import LinearKeystream, random_state_matrix


def _transcript(code, ecc, p, tau, seed):
    key = BitVec.random(ecc.n, np.random.default_rng(seed + 10**6))
    s = random_state_matrix(ecc.n, seed)
    cfg = SessionConfig(SystemParams(ecc.n, ecc.m, code.l, code.w, p), seed, tau)
    records = run_session(cfg, code, ecc, LinearKeystream(s, key))
    return CpaTranscript.from_records(records, compose(code, ecc), s, p, limit=tau), key


def _lpn(rows, rhs, n, weights=None):
    c = BitMatrix.from_strings(rows) if rows else BitMatrix.zeros(0, n)
    w = np.full(len(rows), 2) if weights is None else np.asarray(weights)
    return LpnInstance(c, np.asarray(rhs, dtype=np.uint8), w.astype(np.int64), 0.1, n, 1)


def _oracle_best(rows, rhs, n):
    """Maximum-agreement key by plain Python enumeration."""
    best, best_score = None, -1
    for k in range(1 << n):
        kb = format(k, f"0{n}b")
        score = sum(
            (sum(int(a) * int(b) for a, b in zip(r, kb)) % 2) == d for r, d in zip(rows, rhs)
        )
        if score > best_score:
            best, best_score = kb, score
    return best, best_score / len(rows)


# -- noise formula --------------------------------------------------------------


@pytest.mark.parametrize("p", [0.0, 0.01, 0.2, 0.49])
def test_noise_w0_is_p(p):
    assert noise_lower_bound(p, 0) == pytest.approx(p)


@pytest.mark.parametrize("w", range(5))
def test_noise_p0_is_zero(w):
    assert noise_lower_bound(0.0, w) == 0.0


def test_noise_spot_values():
    assert noise_lower_bound(0.1, 2) == pytest.approx(0.244)
    assert noise_lower_bound(0.05, 1) == pytest.approx(0.095)


def test_noise_rejects_bad_input():
    with pytest.raises(ValueError):
        noise_lower_bound(0.5, 1)
    with pytest.raises(ValueError):
        noise_lower_bound(0.1, -1)


def test_fold_estimates():
    assert xor_fold_estimate(0.0, 4, 10_000, 0) == 0.0
    assert abs(xor_fold_estimate(0.1, 1, 200_000, 1) - 0.1) < 6 * np.sqrt(0.09 / 200_000)
    est = xor_fold_estimate(0.1, 3, 1_000_000, 2)
    assert abs(est - 0.244) < 0.002
    assert xor_fold_estimate(0.2, 2, 1000, 5) == xor_fold_estimate(0.2, 2, 1000, 5)


# -- elimination ----------------------------------------------------------------


def test_equation_count(ex1, hamming):
    transcript, _ = _transcript(ex1, hamming, 0.05, 10, seed=3)
    inst = eliminate_randomness(transcript, 2)
    assert len(inst) == 50
    assert inst.tau == 10 and inst.degenerate == ()


@pytest.mark.parametrize("fixture", ["ex1", "ex2"])
def test_noiseless_equations_hold(fixture, hamming, request):
    code = request.getfixturevalue(fixture)
    transcript, key = _transcript(code, hamming, 0.0, 30, seed=1)
    inst = eliminate_randomness(transcript, 2)
    assert empirical_noise(inst, key) == 0.0
    for c, d in zip(inst.rows, inst.rhs):
        assert key.dot(c) == d


@pytest.mark.parametrize("fixture", ["ex1", "ex2"])
def test_combo_weight_is_one_plus_g_star_column(fixture, hamming, request):
    code = request.getfixturevalue(fixture)
    transcript, _ = _transcript(code, hamming, 0.05, 5, seed=0)
    inst = eliminate_randomness(transcript, 2)
    cols = g_star(code, hamming).column_weights()
    per_sample = 1 + cols[code.r :]
    assert inst.combo_weights.tolist() == per_sample.tolist() * 5


def test_example2_has_an_unfolded_equation(ex2, hamming):
    # column 4 of G* is zero for the second worked example, so one equation
    # per sample carries only raw channel noise
    transcript, _ = _transcript(ex2, hamming, 0.05, 3, seed=0)
    inst = eliminate_randomness(transcript, 2)
    assert inst.combo_weights.min() == 1
    assert inst.w_effective == 0
    assert inst.epsilon_bound == pytest.approx(0.05)


def test_expected_noise_matches_combo_formula(ex1, ex2, hamming):
    p = 0.1
    e1 = expected_noise(eliminate_randomness(_transcript(ex1, hamming, p, 4, 0)[0], 2), p)
    e2 = expected_noise(eliminate_randomness(_transcript(ex2, hamming, p, 4, 0)[0], 2), p)
    assert e1 == pytest.approx(noise_lower_bound(p, 1))
    # combos for the second example are 3, 3, 1, 2, 2
    expected = (2 * noise_lower_bound(p, 2) + p + 2 * noise_lower_bound(p, 1)) / 5
    assert e2 == pytest.approx(expected)
    assert e2 > e1


def test_degenerate_sample_warns():
    # zero out the random-bit rows so no u column can be eliminated
    ecc = single_parity(4)
    code = build_generic(SystemParams(5, 4, 2, 1), ecc)
    g = compose(code, ecc)
    bad = BitMatrix.from_bits(np.vstack([g.to_array()[:2], np.zeros((2, 5), dtype=np.uint8)]))
    transcript = CpaTranscript([BitVec.zeros(5)], bad, random_state_matrix(5, 0), 0.1)
    with pytest.warns(DegenerateSample):
        inst = eliminate_randomness(transcript, 2)
    assert inst.degenerate == (1,)
    assert len(inst) == 5


def test_transcript_validation(ex1, hamming):
    g = compose(ex1, hamming)
    with pytest.raises(DimensionError):
        CpaTranscript([BitVec.zeros(7)], g, BitMatrix.identity(6), 0.1)
    with pytest.raises(DimensionError):
        CpaTranscript([BitVec.zeros(6)], g, BitMatrix.identity(7), 0.1)
    with pytest.raises(ValueError):
        eliminate_randomness(CpaTranscript([BitVec.zeros(7)], g, BitMatrix.identity(7), 0.1), 4)


def test_empty_transcript(ex1, hamming):
    inst = eliminate_randomness(CpaTranscript([], compose(ex1, hamming), BitMatrix.identity(7), 0.1), 2)
    assert len(inst) == 0
    with pytest.raises(EmptyInstance):
        brute_force_recover(inst)


# -- key search -----------------------------------------------------------------


def test_noiseless_recovery(ex1, hamming):
    transcript, key = _transcript(ex1, hamming, 0.0, 10, seed=12)
    inst = eliminate_randomness(transcript, 2)
    got, agreement = brute_force_recover(inst)
    assert got == key and agreement == 1.0


@pytest.mark.parametrize("seed", range(8))
def test_wht_direct_and_oracle_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    rows = ["".join(map(str, rng.integers(0, 2, n))) for _ in range(int(rng.integers(1, 25)))]
    rhs = rng.integers(0, 2, len(rows)).tolist()
    inst = _lpn(rows, rhs, n)
    k_wht, a_wht = brute_force_recover(inst, "wht")
    k_dir, a_dir = brute_force_recover(inst, "direct")
    k_ref, a_ref = _oracle_best(rows, rhs, n)
    assert k_wht.to_str() == k_dir.to_str() == k_ref
    assert a_wht == a_dir == pytest.approx(a_ref)


def test_search_limits():
    with pytest.raises(TooLarge):
        brute_force_recover(_lpn(["1" * 25], [0], 25))
    with pytest.raises(ValueError):
        brute_force_recover(_lpn(["1"], [0], 1), "sieve")


def test_random_key_sits_near_half(ex1, hamming):
    transcript, key = _transcript(ex1, hamming, 0.05, 400, seed=2)
    inst = eliminate_randomness(transcript, 2)
    wrong = [BitVec.from_int(k, 7) for k in range(128) if BitVec.from_int(k, 7) != key]
    rates = [empirical_noise(inst, k) for k in wrong]
    assert abs(np.mean(rates) - 0.5) < 0.02
    assert empirical_noise(inst, key) < 0.15


def test_success_rate():
    a, b = BitVec.from_str("01"), BitVec.from_str("10")
    assert success_rate([a, b, a], [a, a, a]) == pytest.approx(2 / 3)


# -- LPN CSV --------------------------------------------------------------------


def test_export_import_roundtrip(ex1, hamming, tmp_path):
    transcript, _ = _transcript(ex1, hamming, 0.05, 10, seed=5)
    inst = eliminate_randomness(transcript, 2)
    buf = io.StringIO()
    export_lpn(inst, buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 51
    head = dict(item.split("=") for item in lines[0].split(","))
    assert int(head["n"]) == 7 and int(head["tau"]) == 10 and float(head["epsilon"]) == inst.epsilon_bound
    export_lpn(inst, tmp_path / "lpn.csv")
    back = import_lpn(tmp_path / "lpn.csv")
    assert back.coefficients == inst.coefficients
    assert np.array_equal(back.rhs, inst.rhs)
    assert np.array_equal(back.combo_weights, inst.combo_weights)
    assert (back.n, back.tau, back.epsilon_bound) == (inst.n, inst.tau, inst.epsilon_bound)
    again = io.StringIO()
    export_lpn(back, again)
    assert again.getvalue() == buf.getvalue()


@pytest.mark.parametrize(
    "text",
    ["", "n=3\n", "n=3,epsilon=0.1,tau=1,rows=2\n101,1,2\n", "n=3,epsilon=0.1,tau=1,rows=1\n10,1,2\n",
     "n=3,epsilon=0.1,tau=1,rows=1\n101,2,2\n"],
)
def test_import_malformed(text):
    with pytest.raises(LpnFormatError):
        import_lpn(io.StringIO(text))


def test_keys_are_msb_first():
    # only key 100 satisfies both equations <k|100> = 1 and <k|011> = 0
    inst = _lpn(["100", "011", "001", "010"], [1, 0, 0, 0], 3)
    key, agreement = brute_force_recover(inst)
    assert key.to_str() == "100" and agreement == 1.0
    assert inst.rows[0].to_str() == "100"
