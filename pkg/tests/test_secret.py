import numpy as np
import pytest

from wiretap_ldpc.channel import bpsk_capacity, transmit
from wiretap_ldpc.decoder import LLR_CAP
from wiretap_ldpc.gf2 import parity_violations
from wiretap_ldpc.secret import (
    SecretCode,
    bits_to_symbols,
    build_secret_code,
    destination_decode,
    equivocation_lower_bound,
    k_for_secret_rate,
    load_secret_code,
    save_secret_code,
    secret_encode,
    wiretapper_decode,
)
from wiretap_ldpc.tanner import sample_graph
from wiretap_ldpc.degrees import regular


def test_rate_identities_exact(small_code):
    c = small_code
    assert c.n_total == c.n_transmitted + c.n_message
    p = c.puncture_fraction
    assert c.secret_rate == pytest.approx(p / (1 - p), abs=1e-9)
    assert c.mother_rate == pytest.approx(c.code_rate / (1 + c.secret_rate), abs=1e-9)


def test_k_for_secret_rate_inversion():
    k = k_for_secret_rate(10_000, 0.33)
    assert k == round(0.33 / 1.33 * 10_000)
    # p = 0.3 gives secret rate 0.3/0.7
    code_k = k_for_secret_rate(1000, 0.3 / 0.7)
    assert code_k == 300


def test_zero_message_degenerates_to_plain_code(small_graph):
    code = build_secret_code(small_graph, 0, seed=1)
    assert code.secret_rate == 0.0
    assert code.n_transmitted == code.n_total
    parts = secret_encode(code, np.empty(0, dtype=np.uint8), np.random.default_rng(0))
    assert parts.transmitted.size == code.n_total


def test_message_too_long_rejected(small_graph):
    with pytest.raises(ValueError):
        build_secret_code(small_graph, small_graph.n_var, seed=1)


def test_encode_zero_with_stubbed_rng_is_zero(small_code):
    class ZeroRng:
        def integers(self, lo, hi, size):
            return np.zeros(size, dtype=np.int64)

    parts = secret_encode(
        small_code, np.zeros(small_code.n_message, dtype=np.uint8), ZeroRng()
    )
    assert not parts.full_codeword.any()


def test_two_encodings_differ_with_probability_one(small_code):
    msg = np.zeros(small_code.n_message, dtype=np.uint8)
    a = secret_encode(small_code, msg, np.random.default_rng(1))
    b = secret_encode(small_code, msg, np.random.default_rng(2))
    assert not np.array_equal(a.transmitted, b.transmitted)


def test_thousand_encodings_parity_and_puncture_audit(small_code):
    code = small_code
    rng = np.random.default_rng(3)
    graph = code.tri.graph
    msg_vars = set(code.message_vars.tolist())
    tx_vars = code.transmitted_vars
    assert msg_vars.isdisjoint(tx_vars.tolist())
    assert len(msg_vars) + len(tx_vars) == code.n_total
    for _ in range(1000):
        msg = rng.integers(0, 2, code.n_message)
        parts = secret_encode(code, msg, rng)
        full = np.empty(code.n_total, dtype=np.uint8)
        full[code.tri.column_perm] = parts.full_codeword
        assert parity_violations(graph, full) == 0
        # transmitted vector never carries a message bit position
        assert parts.transmitted.size == code.n_transmitted


def test_destination_decode_noise_free(small_code):
    rng = np.random.default_rng(4)
    gain = 4.0
    errs = 0
    for _ in range(20):
        msg = rng.integers(0, 2, small_code.n_message)
        parts = secret_encode(small_code, msg, rng)
        y = gain * bits_to_symbols(parts.transmitted)  # no noise
        m_hat, ferr, res = destination_decode(
            small_code, y, gain, true_message=msg
        )
        errs += ferr
    assert errs == 0


def test_wiretapper_decode_noise_free_pinned(small_code):
    rng = np.random.default_rng(5)
    gain = 4.0
    msg = rng.integers(0, 2, small_code.n_message)
    parts = secret_encode(small_code, msg, rng)
    z = gain * bits_to_symbols(parts.transmitted)
    x_hat, ferr, res = wiretapper_decode(
        small_code, z, gain, msg, true_padding=parts.random_bits
    )
    assert ferr is False
    assert np.array_equal(x_hat, parts.transmitted)


def test_pinned_decoder_not_worse_than_unpinned(small_code):
    """Paired comparison: knowing the message cannot measurably hurt BP."""
    rng = np.random.default_rng(6)
    gain = 0.95
    pinned_errs = unpinned_errs = 0
    trials = 120
    for t in range(trials):
        trng = np.random.default_rng([77, t])
        msg = trng.integers(0, 2, small_code.n_message)
        parts = secret_encode(small_code, msg, trng)
        z = transmit(bits_to_symbols(parts.transmitted), gain, trng)
        _, ferr, _ = wiretapper_decode(
            small_code, z, gain, msg, true_padding=parts.random_bits
        )
        pinned_errs += ferr
        m_hat, _, res = destination_decode(small_code, z, gain)
        d_hat = res.hard[small_code.tri.column_perm[
            small_code.n_message : small_code.n_info]]
        unpinned_errs += bool(np.any(d_hat != parts.random_bits))
    assert pinned_errs / trials <= unpinned_errs / trials + 0.01


def test_equivocation_bound_limits():
    r_e, frac = equivocation_lower_bound(0.7, 0.3, 0.4, eps_w=0.0, n=10**12)
    assert r_e == pytest.approx(0.3, abs=1e-9)
    assert frac == pytest.approx(1.0)


def test_equivocation_bound_paper_points(setting_i):
    c_w = bpsk_capacity(setting_i.wiretap_gain)
    r_c = 0.541 * 1.33
    _, frac = equivocation_lower_bound(r_c, 0.33, c_w, eps_w=0.01, n=10**6)
    assert frac == pytest.approx(0.89, abs=0.03)
    klinc_rs = 0.3 / 0.7
    klinc_rc = 0.5 * (1 + klinc_rs)
    _, frac2 = equivocation_lower_bound(klinc_rc, klinc_rs, c_w, eps_w=0.01, n=10**6)
    assert frac2 == pytest.approx(0.68, abs=0.03)


def test_optimized_code_beats_klinc_baseline(setting_i, rate508):
    """At matched secret rate 0.43, the searched rate-0.508 ensemble gives
    strictly higher fractional equivocation than the unoptimized rate-0.5."""
    from wiretap_ldpc.degrees import design_rate

    c_w = bpsk_capacity(setting_i.wiretap_gain)
    rs = 0.3 / 0.7
    r_c_opt = design_rate(rate508) * (1 + rs)
    r_c_base = 0.5 * (1 + rs)
    _, frac_opt = equivocation_lower_bound(r_c_opt, rs, c_w, 0.01, 10**6)
    _, frac_base = equivocation_lower_bound(r_c_base, rs, c_w, 0.01, 10**6)
    assert frac_opt > frac_base
    assert frac_opt - frac_base == pytest.approx(0.02, abs=0.015)


def test_equivocation_bound_monotonicity():
    base = equivocation_lower_bound(0.7, 0.3, 0.4, 0.05, 10**6)[0]
    assert equivocation_lower_bound(0.7, 0.3, 0.4, 0.2, 10**6)[0] <= base
    assert equivocation_lower_bound(0.7, 0.3, 0.45, 0.05, 10**6)[0] <= base
    assert equivocation_lower_bound(0.75, 0.3, 0.4, 0.05, 10**6)[0] >= base


def test_equivocation_bound_domain_errors():
    with pytest.raises(ValueError):
        equivocation_lower_bound(0.7, 0.0, 0.4, 0.0, 10**6)
    with pytest.raises(ValueError):
        equivocation_lower_bound(0.7, 0.3, 0.4, 1.5, 10**6)
    with pytest.raises(ValueError):
        equivocation_lower_bound(0.2, 0.3, 0.4, 0.0, 10**6)


def test_save_load_round_trip(tmp_path, small_code):
    alist = tmp_path / "code.alist"
    sidecar = tmp_path / "code.json"
    save_secret_code(small_code, alist, sidecar, seed=42)
    again = load_secret_code(alist, sidecar)
    assert again.n_message == small_code.n_message
    assert np.array_equal(again.message_vars, small_code.message_vars)
    assert again.n_info == small_code.n_info
    g1, g2 = small_code.tri.graph, again.tri.graph
    assert all(np.array_equal(a, b) for a, b in zip(g1.chk_adj, g2.chk_adj))
