import numpy as np
import pytest
from scipy.stats import norm

from wiretap_ldpc.degrees import DegreeDistribution, regular
from wiretap_ldpc.density import (
    DEFAULT_GRID,
    DensityGrid,
    NonConvergentError,
    bec_density,
    boxplus_pair,
    check_node_update,
    check_singleton_columns,
    convolve_pair,
    delta_density,
    gaussian_channel_density,
    initial_density,
    response_matrices,
    run_trajectory,
    variable_node_update,
)

SETTING_I_GAIN = 1.5048735188025137
SETTING_I_WIRE = 0.9067759645839047
P033 = 0.33 / 1.33


def random_symmetric_density(rng, grid=DEFAULT_GRID):
    """Draw a density satisfying f(-x) = f(x) exp(-x) on the grid."""
    from wiretap_ldpc.density import QuantizedDensity

    h = grid.n_half
    pos = rng.uniform(0.1, 1.0, size=h) * np.exp(-np.abs(grid.centers[h + 1 :] - 2.0))
    neg = pos * np.exp(-grid.centers[h + 1 :])
    mass = np.concatenate([neg[::-1], [rng.uniform(0.1, 0.5)], pos])
    pos_inf = rng.uniform(0.0, 0.3)
    total = mass.sum() + pos_inf
    return QuantizedDensity(
        grid=grid, mass=mass / total, neg_inf=0.0, pos_inf=pos_inf / total
    )


def symmetry_residual(d):
    """Total violation of the discretized relation f(-x) = f(x) exp(-x)."""
    h = d.grid.n_half
    x = d.grid.centers[h + 1 :]
    lhs = d.mass[:h][::-1]  # f(-x) for x = step..L ascending
    rhs = d.mass[h + 1 :] * np.exp(-x)
    return float(np.abs(lhs - rhs).sum())


def test_gaussian_density_mean_and_mass():
    for gain in (0.5, 0.9068, 1.5049):
        d = gaussian_channel_density(gain)
        assert d.total_mass() == pytest.approx(1.0, abs=1e-9)
        assert d.mean_finite() + 25.0 * (d.pos_inf - d.neg_inf) == pytest.approx(
            2 * gain * gain, abs=0.05
        )


def test_initial_density_pure_gaussian_at_p0():
    d = initial_density(1.2, 0.0, False)
    assert d.mean_finite() == pytest.approx(2 * 1.2**2, abs=DEFAULT_GRID.step)


def test_initial_density_fully_pinned():
    d = initial_density(0.9, 1.0, True)
    assert d.pos_inf == pytest.approx(1.0)
    assert d.error_probability() == 0.0


def test_initial_density_error_functional_closed_form():
    d = initial_density(SETTING_I_WIRE, 0.2481, False)
    want = (1 - 0.2481) * norm.sf(SETTING_I_WIRE) + 0.2481 / 2
    assert d.error_probability() == pytest.approx(want, abs=1e-4)


def test_boxplus_with_perfect_message_is_identity():
    d = initial_density(0.8, 0.3, False)
    out = boxplus_pair(d, delta_density(np.inf))
    assert np.array_equal(out.mass, d.mass)
    assert out.pos_inf == d.pos_inf and out.neg_inf == d.neg_inf


def test_degree_two_check_update_identity():
    d = initial_density(0.8, 0.3, False)
    out = check_node_update(d, {2: 1.0})
    assert np.array_equal(out.mass, d.mass)
    assert out.pos_inf == d.pos_inf


def test_convolution_of_impulses():
    out = convolve_pair(delta_density(1.0), delta_density(2.5))
    i = int(np.argmax(out.mass))
    assert out.grid.centers[i] == pytest.approx(3.5)
    assert out.mass[i] == pytest.approx(1.0)
    inf_out = convolve_pair(delta_density(np.inf), delta_density(-3.0))
    assert inf_out.pos_inf == pytest.approx(1.0)


def test_mass_conservation_through_updates(rate541):
    d0 = initial_density(SETTING_I_GAIN, P033, False)
    c = check_node_update(d0, rate541.rho)
    assert abs(c.total_mass() - 1.0) <= 1e-9
    v = variable_node_update(d0, c, rate541.lam)
    assert abs(v.total_mass() - 1.0) <= 1e-9


def test_symmetry_preserved_by_updates(rate541):
    rng = np.random.default_rng(12)
    for _ in range(20):
        d = random_symmetric_density(rng)
        assert symmetry_residual(d) <= 1e-12
        c = check_node_update(d, rate541.rho)
        v = variable_node_update(d, c, rate541.lam)
        # the variable convolution is exact on the grid; the check table
        # rounds magnitudes by up to half a bin, scattering e^(step/2)
        assert symmetry_residual(v) <= symmetry_residual(c) + 1e-9
        assert symmetry_residual(c) <= 0.05


def test_bec_de_matches_scalar_recursion_per_iteration():
    dist = DegreeDistribution(lam={2: 0.4, 3: 0.6}, rho={5: 0.3, 6: 0.7})
    eps = 0.35
    bd = bec_density(eps)
    msg = bd
    for _ in range(60):
        x = 2.0 * msg.error_probability()  # zero-bin mass carries half
        c = check_node_update(msg, dist.rho)
        msg = variable_node_update(bd, c, dist.lam).renormalized()
        y = sum(f * (1 - (1 - x) ** (d - 1)) for d, f in dist.rho.items())
        scalar = eps * sum(f * y ** (d - 1) for d, f in dist.lam.items())
        assert abs(2.0 * msg.error_probability() - scalar) <= 1e-9


def test_trajectory_noise_free_stays_zero(rate541):
    tr = run_trajectory(rate541, delta_density(np.inf), max_iters=10, target=-1.0,
                        stall_tol=0.0)
    assert np.all(tr.errors == 0.0)


def test_trajectory_around_known_36_threshold():
    dist = regular(3, 6)
    above = run_trajectory(dist, initial_density(10 ** (1.4 / 20), 0.0, False),
                           max_iters=2000, target=1e-6)
    below = run_trajectory(dist, initial_density(10 ** (0.8 / 20), 0.0, False),
                           max_iters=2000, target=1e-6)
    assert above.converged
    assert not below.converged and below.errors[-1] > 1e-6


def test_degraded_channel_monotonicity(rate541):
    strong = run_trajectory(rate541, initial_density(1.6, P033, False),
                            max_iters=30, target=-1.0, stall_tol=0.0)
    weak = run_trajectory(rate541, initial_density(1.5, P033, False),
                          max_iters=30, target=-1.0, stall_tol=0.0)
    n = min(len(strong.errors), len(weak.errors))
    assert np.all(weak.errors[:n] >= strong.errors[:n] - 1e-12)


def test_table1_destination_trajectory_reaches_target(rate541):
    d0 = initial_density(SETTING_I_GAIN, 0.2481, False)
    tr = run_trajectory(rate541, d0, max_iters=2000, target=1e-2)
    assert tr.converged
    assert tr.converged_at <= 2000


def test_response_matrix_reconstruction_identity(rate541):
    d0d = initial_density(SETTING_I_GAIN, P033, False)
    d0w = initial_density(SETTING_I_WIRE, P033, True)
    resp = response_matrices(rate541, d0d, d0w, max_degree=10, target=1e-2)
    lam_vec = np.zeros(9)
    for d, f in rate541.lam.items():
        lam_vec[d - 2] = f
    recon_d = resp.dest @ lam_vec
    recon_w = resp.wire @ lam_vec
    assert np.max(np.abs(recon_d - resp.e_dest[1:])) <= 1e-9
    assert np.max(np.abs(recon_w - resp.e_wire[1:])) <= 1e-9


def test_response_matrix_first_iteration_unrolled(rate541):
    """Column l=1 must equal one check update plus a pure degree-j variable
    update applied to the intrinsic density."""
    d0 = initial_density(SETTING_I_GAIN, P033, False)
    d0w = initial_density(SETTING_I_WIRE, P033, True)
    resp = response_matrices(rate541, d0, d0w, max_degree=10, target=1e-2)
    c1 = check_node_update(d0, rate541.rho)
    for j in range(2, 11):
        direct = variable_node_update(d0, c1, {j: 1.0}).error_probability()
        assert resp.dest[0, j - 2] == pytest.approx(direct, abs=1e-12)


def test_response_matrix_monotone_in_degree(rate541):
    d0 = initial_density(SETTING_I_GAIN, P033, False)
    d0w = initial_density(SETTING_I_WIRE, P033, True)
    resp = response_matrices(rate541, d0, d0w, max_degree=10, target=1e-2)
    diffs = np.diff(resp.dest, axis=1)
    # higher degree aggregates more evidence; tolerate saturation noise
    assert (diffs <= 1e-9).mean() > 0.99


def test_response_matrices_reject_nonconvergent():
    dist = regular(3, 6)
    d0 = initial_density(0.9, 0.0, False)  # far below threshold
    with pytest.raises(NonConvergentError):
        response_matrices(dist, d0, d0, max_degree=10, target=1e-3,
                          max_iters=300)


def test_check_singleton_columns_reconstruct_approximately(rate541):
    d0 = initial_density(SETTING_I_GAIN, P033, False)
    cols, errs = check_singleton_columns(rate541, d0, max_degree=10, target=1e-2)
    rho_vec = np.zeros(9)
    for d, f in rate541.rho.items():
        rho_vec[d - 2] = f
    recon = cols @ rho_vec
    # nonlinear in rho, so only approximate: within a few percent relative
    rel = np.abs(recon - errs[1:]) / np.maximum(errs[1:], 1e-12)
    assert np.median(rel) < 0.05


def test_grid_validation():
    with pytest.raises(ValueError):
        DensityGrid(step=0.07, half_range=25.0)
    with pytest.raises(ValueError):
        initial_density(1.0, 1.5, False)
    with pytest.raises(ValueError):
        gaussian_channel_density(-1.0)
