import numpy as np
import pytest

from wiretap_ldpc.channel import ChannelSetting, bpsk_capacity
from wiretap_ldpc.secret import equivocation_lower_bound
from wiretap_ldpc.simulate import (
    EvaluationRecord,
    _confidence_halfwidth,
    estimate,
    records_to_csv,
    sweep,
)


@pytest.fixture(scope="module")
def quiet_setting():
    # destination far above threshold so desk-size codes decode cleanly
    return ChannelSetting(max_snr_db=9.0, alpha_sq_db=-4.4)


def test_estimate_noise_free_limit(small_code, quiet_setting):
    rec = estimate(small_code, quiet_setting, trials=30, seed=1)
    assert rec.eps_d == 0.0
    assert rec.eps_w == 0.0
    assert rec.valid
    c_w = bpsk_capacity(quiet_setting.wiretap_gain)
    want = min(
        1.0,
        max(
            0.0,
            (small_code.code_rate - c_w - 1.0 / small_code.n_transmitted)
            / small_code.secret_rate,
        ),
    )
    assert rec.fractional_equivocation == pytest.approx(want, abs=1e-12)


def test_estimate_deterministic_given_seed(small_code, quiet_setting):
    a = estimate(small_code, quiet_setting, trials=12, seed=7)
    b = estimate(small_code, quiet_setting, trials=12, seed=7)
    assert a.eps_d == b.eps_d and a.eps_w == b.eps_w
    assert a.fractional_equivocation == b.fractional_equivocation
    assert a.dest_error_trials == b.dest_error_trials
    assert records_to_csv([a]) == records_to_csv([b])


def test_estimate_matches_bound_exactly(small_code, quiet_setting):
    rec = estimate(small_code, quiet_setting, trials=10, seed=3)
    r_e, frac = equivocation_lower_bound(
        rec.code_rate,
        rec.secret_rate,
        rec.wiretap_capacity,
        rec.eps_w,
        rec.n,
    )
    assert rec.equivocation_rate == r_e
    assert rec.fractional_equivocation == frac


def test_sweep_empty_and_alpha_monotonicity(small_code):
    assert sweep(small_code, [], trials=5, seed=1) == []
    strong_tap = ChannelSetting(9.0, -1.0)  # better eavesdropper
    weak_tap = ChannelSetting(9.0, -6.0)
    recs = sweep(small_code, [strong_tap, weak_tap], trials=10, seed=5)
    assert recs[0].fractional_equivocation <= recs[1].fractional_equivocation


def test_confidence_intervals_calibrated():
    """Meta-test: repeated estimates land inside each other's 95% bands
    most of the time (binomial consistency at tiny trial counts)."""
    rng = np.random.default_rng(11)
    p_true = 0.3
    trials = 60
    inside = 0
    reps = 20
    for _ in range(reps):
        errs = int(rng.binomial(trials, p_true))
        half = _confidence_halfwidth(errs, trials)
        if abs(errs / trials - p_true) <= half:
            inside += 1
    assert inside >= int(0.9 * reps)


def test_confidence_wilson_used_when_scarce():
    # zero observed errors must still give a positive width
    assert _confidence_halfwidth(0, 100) > 0
    assert _confidence_halfwidth(3, 100) > 0
    # plenty of errors: normal approximation
    p = 0.4
    half = _confidence_halfwidth(40, 100)
    assert half == pytest.approx(1.96 * np.sqrt(p * (1 - p) / 100), rel=1e-3)


def test_thresholds_scale_with_blocklength(small_code, quiet_setting):
    rec = estimate(small_code, quiet_setting, trials=5, seed=2)
    assert rec.threshold_d == 0.02  # desk scale
    assert rec.threshold_w == 0.02


def test_csv_emission_columns(small_code, quiet_setting):
    rec = estimate(small_code, quiet_setting, trials=5, seed=2)
    text = records_to_csv([rec])
    header, row = text.strip().splitlines()
    assert header.split(",")[0] == "max_snr_db"
    assert len(header.split(",")) == len(row.split(","))
    assert "boundary_fractional_equivocation" in header


def test_estimate_requires_trials(small_code, quiet_setting):
    with pytest.raises(ValueError):
        estimate(small_code, quiet_setting, trials=0, seed=1)
