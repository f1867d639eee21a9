"""Rate-maximizing degree-distribution search.

Alternates two linear programs built from density-evolution response
matrices: one reshapes the variable-side distribution (maximizing the
design rate's numerator sum of lam_j/j), then one reshapes the check side
(minimizing sum of rho_i/i).  Trajectory band constraints keep each new
distribution's predicted error path close to the incumbent's, so the DE
convergence argument carries over between rounds; every accepted round is
re-verified by a fresh DE run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSetting
from .degrees import DegreeDistribution, design_rate
from .density import (
    DEFAULT_GRID,
    DensityGrid,
    NonConvergentError,
    QuantizedDensity,
    check_singleton_columns,
    initial_density,
    response_matrices,
    run_trajectory,
)
from .lp import LinearProgram, LPResult, solve_lp

BAND_GUARD = 1e-12


@dataclass
class SearchConfig:
    max_var_degree: int = 10
    max_chk_degree: int = 10
    delta: float = 0.5
    target: float = 1e-2  # DE error tolerance
    max_de_iters: int = 2000
    max_rounds: int = 8
    converge_tol: float = 1e-3  # L1 change of lam across a full round

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.target <= 0:
            raise ValueError("target must be positive")


@dataclass
class RoundRecord:
    round_index: int
    stage: str  # "lambda" or "rho"
    design_rate: float
    m_dest: int
    m_wire: int
    accepted: bool
    note: str = ""


def _band_rows(
    matrix: np.ndarray, errors: np.ndarray, delta: float
) -> tuple[np.ndarray, np.ndarray]:
    """Inequality rows tying the predicted trajectory to the incumbent's.

    For each iteration l: |row_l @ x - e(l)| <= max(0, delta*(e(l-1)-e(l)))
    and row_l @ x <= e(l-1).  Returns (coeffs, bounds) stacked.
    """
    m, n = matrix.shape
    centers = errors[1 : m + 1]
    prevs = errors[:m]
    bands = np.maximum(0.0, delta * (prevs - centers))
    coeffs = np.vstack([matrix, -matrix, matrix])
    bounds = np.concatenate([centers + bands, -(centers - bands), prevs])
    return coeffs, bounds


def _guard_incumbent(
    coeffs: np.ndarray, bounds: np.ndarray, incumbent: np.ndarray
) -> np.ndarray:
    """Widen any constraint the incumbent itself violates by rounding.

    The variable-side reconstruction identity makes the incumbent feasible
    exactly; the check-side analogue holds only to first order, so its LP
    keeps the incumbent inside by a minimal relaxation.
    """
    lhs = coeffs @ incumbent
    slack = lhs - bounds
    widen = slack > 0
    if np.any(widen):
        bounds = bounds.copy()
        bounds[widen] = lhs[widen] + BAND_GUARD
    return bounds


def _distribution_vector(fractions: dict[int, float], max_degree: int) -> np.ndarray:
    v = np.zeros(max_degree - 1)
    for d, f in fractions.items():
        v[d - 2] = f
    return v


def _vector_distribution(x: np.ndarray, tol: float = 1e-11) -> dict[int, float]:
    x = np.maximum(x, 0.0)
    x = x / x.sum()
    return {j + 2: float(f) for j, f in enumerate(x) if f > tol}


def build_lambda_lp(
    dest: np.ndarray,
    wire: np.ndarray,
    e_dest: np.ndarray,
    e_wire: np.ndarray,
    delta: float,
    max_var_degree: int,
) -> LinearProgram:
    """LP over variable-side edge fractions: maximize sum lam_j / j."""
    if dest.shape[0] == 0 or wire.shape[0] == 0:
        raise ValueError("empty trajectories")
    n = max_var_degree - 1
    cd, bd = _band_rows(dest[:, :n], e_dest, delta)
    cw, bw = _band_rows(wire[:, :n], e_wire, delta)
    degrees = np.arange(2, max_var_degree + 1)
    return LinearProgram(
        objective=1.0 / degrees,
        ineq_coeffs=np.vstack([cd, cw]),
        ineq_bounds=np.concatenate([bd, bw]),
        eq_coeffs=np.ones((1, n)),
        eq_bounds=np.array([1.0]),
    )


def build_rho_lp(
    dest: np.ndarray,
    wire: np.ndarray,
    e_dest: np.ndarray,
    e_wire: np.ndarray,
    delta: float,
    max_chk_degree: int,
    incumbent: dict[int, float],
) -> LinearProgram:
    """LP over check-side edge fractions: minimize sum rho_i / i.

    Band centers use the incumbent's own predicted errors (the check-side
    responses mix nonlinearly, so the raw trajectory is not an exact
    center); bounds are widened minimally so the incumbent stays feasible.
    """
    n = max_chk_degree - 1
    inc = _distribution_vector(incumbent, max_chk_degree)
    pred_d = np.concatenate([[e_dest[0]], dest[:, :n] @ inc])
    pred_w = np.concatenate([[e_wire[0]], wire[:, :n] @ inc])
    cd, bd = _band_rows(dest[:, :n], pred_d, delta)
    cw, bw = _band_rows(wire[:, :n], pred_w, delta)
    coeffs = np.vstack([cd, cw])
    bounds = _guard_incumbent(coeffs, np.concatenate([bd, bw]), inc)
    degrees = np.arange(2, max_chk_degree + 1)
    return LinearProgram(
        objective=-1.0 / degrees,
        ineq_coeffs=coeffs,
        ineq_bounds=bounds,
        eq_coeffs=np.ones((1, n)),
        eq_bounds=np.array([1.0]),
    )


def _verify(
    dist: DegreeDistribution,
    d0_dest: QuantizedDensity,
    d0_wire: QuantizedDensity,
    config: SearchConfig,
) -> tuple[int, int]:
    """Fresh DE convergence check; returns (M_dest, M_wire)."""
    td = run_trajectory(
        dist, d0_dest, max_iters=config.max_de_iters, target=config.target
    )
    if not td.converged:
        raise NonConvergentError("destination trajectory misses the target")
    tw = run_trajectory(
        dist, d0_wire, max_iters=config.max_de_iters, target=config.target
    )
    if not tw.converged:
        raise NonConvergentError("eavesdropper trajectory misses the target")
    return td.converged_at, tw.converged_at


def search(
    dist0: DegreeDistribution,
    d0_dest: QuantizedDensity,
    d0_wire: QuantizedDensity,
    config: SearchConfig = SearchConfig(),
) -> tuple[DegreeDistribution, list[RoundRecord]]:
    """Alternating lambda/rho search from a convergent starting ensemble.

    Raises NonConvergentError when the starting distribution itself fails
    DE at either decoder.  A candidate whose fresh DE verification fails
    ends the search (the incumbent is returned), matching the stop rule.
    """
    m_d, m_w = _verify(dist0, d0_dest, d0_wire, config)
    dist = dist0
    log: list[RoundRecord] = [
        RoundRecord(0, "init", design_rate(dist0), m_d, m_w, True)
    ]
    for rnd in range(1, config.max_rounds + 1):
        lam_before = dict(dist.lam)

        # variable side
        resp = response_matrices(
            dist, d0_dest, d0_wire, config.max_var_degree,
            max_iters=config.max_de_iters, target=config.target,
        )
        lp = build_lambda_lp(
            resp.dest, resp.wire, resp.e_dest, resp.e_wire,
            config.delta, config.max_var_degree,
        )
        sol = solve_lp(lp)
        if sol.status != "optimal":
            log.append(RoundRecord(rnd, "lambda", design_rate(dist), m_d, m_w,
                                   False, f"lp {sol.status}"))
            break
        cand = DegreeDistribution(lam=_vector_distribution(sol.x), rho=dist.rho)
        try:
            m_d, m_w = _verify(cand, d0_dest, d0_wire, config)
        except NonConvergentError as exc:
            log.append(RoundRecord(rnd, "lambda", design_rate(dist), m_d, m_w,
                                   False, str(exc)))
            break
        dist = cand
        log.append(RoundRecord(rnd, "lambda", design_rate(dist), m_d, m_w, True))

        # check side
        dest_cols, e_d = check_singleton_columns(
            dist, d0_dest, config.max_chk_degree,
            max_iters=config.max_de_iters, target=config.target,
        )
        wire_cols, e_w = check_singleton_columns(
            dist, d0_wire, config.max_chk_degree,
            max_iters=config.max_de_iters, target=config.target,
        )
        lp = build_rho_lp(
            dest_cols, wire_cols, e_d, e_w, config.delta,
            config.max_chk_degree, dist.rho,
        )
        sol = solve_lp(lp)
        if sol.status != "optimal":
            log.append(RoundRecord(rnd, "rho", design_rate(dist), m_d, m_w,
                                   False, f"lp {sol.status}"))
            break
        cand = DegreeDistribution(lam=dist.lam, rho=_vector_distribution(sol.x))
        try:
            m_d, m_w = _verify(cand, d0_dest, d0_wire, config)
        except NonConvergentError as exc:
            log.append(RoundRecord(rnd, "rho", design_rate(dist), m_d, m_w,
                                   False, str(exc)))
            break
        dist = cand
        log.append(RoundRecord(rnd, "rho", design_rate(dist), m_d, m_w, True))

        drift = sum(
            abs(dist.lam.get(j, 0.0) - lam_before.get(j, 0.0))
            for j in set(dist.lam) | set(lam_before)
        )
        if drift < config.converge_tol:
            break
    return dist, log


def search_for_setting(
    dist0: DegreeDistribution,
    setting: ChannelSetting,
    secret_rate: float,
    config: SearchConfig = SearchConfig(),
    grid: DensityGrid = DEFAULT_GRID,
) -> tuple[DegreeDistribution, list[RoundRecord]]:
    """Search with intrinsic densities derived from a channel setting."""
    p = secret_rate / (1.0 + secret_rate)
    d0_dest = initial_density(setting.operating_gain, p, pinned=False, grid=grid)
    d0_wire = initial_density(setting.wiretap_gain, p, pinned=True, grid=grid)
    return search(dist0, d0_dest, d0_wire, config)


def round_log_csv(log: list[RoundRecord]) -> str:
    lines = ["round,stage,design_rate,m_dest,m_wire,accepted,note"]
    for r in log:
        lines.append(
            f"{r.round_index},{r.stage},{r.design_rate!r},{r.m_dest},"
            f"{r.m_wire},{int(r.accepted)},{r.note}"
        )
    return "\n".join(lines) + "\n"
