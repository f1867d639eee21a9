"""Dense two-phase primal simplex for the degree-design linear programs.

Problems arrive as: maximize c @ x subject to A x <= b, E x = f, and
per-variable lower bounds (all >= 0).  Entering variables follow Dantzig's
rule until pivots stall, then Bland's anti-cycling rule; optimality is
certified by nonpositive reduced costs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
STALL_LIMIT = 40  # degenerate pivots before switching to Bland's rule


@dataclass
class LinearProgram:
    """maximize objective @ x subject to the rows below and x >= lower_bounds."""

    objective: np.ndarray
    ineq_coeffs: np.ndarray
    ineq_bounds: np.ndarray
    eq_coeffs: np.ndarray
    eq_bounds: np.ndarray
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.atleast_1d(np.asarray(self.objective, dtype=np.float64))
        n = self.objective.size
        self.ineq_coeffs = np.asarray(self.ineq_coeffs, dtype=np.float64).reshape(-1, n)
        self.ineq_bounds = np.atleast_1d(np.asarray(self.ineq_bounds, dtype=np.float64))
        self.eq_coeffs = np.asarray(self.eq_coeffs, dtype=np.float64).reshape(-1, n)
        self.eq_bounds = np.atleast_1d(np.asarray(self.eq_bounds, dtype=np.float64))
        if self.lower_bounds is None:
            self.lower_bounds = np.zeros(n)
        else:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=np.float64)
            if np.any(self.lower_bounds < 0):
                raise ValueError("lower bounds must be nonnegative")
        if not (
            np.all(np.isfinite(self.objective))
            and np.all(np.isfinite(self.ineq_coeffs))
            and np.all(np.isfinite(self.ineq_bounds))
            and np.all(np.isfinite(self.eq_coeffs))
            and np.all(np.isfinite(self.eq_bounds))
        ):
            raise ValueError("linear program entries must be finite")

    @property
    def n_vars(self) -> int:
        return self.objective.size


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


class _Tableau:
    """Row-reduced simplex tableau with an explicit basis.

    Last column is the RHS; the cost row is kept separately.
    """

    def __init__(self, rows: np.ndarray, rhs: np.ndarray, basis: list[int]):
        self.t = np.hstack([rows, rhs[:, None]])
        self.basis = basis
        self.iterations = 0

    def _pivot(self, row: int, col: int):
        t = self.t
        t[row] /= t[row, col]
        factors = t[:, col].copy()
        factors[row] = 0.0
        t -= np.outer(factors, t[row])
        self.basis[row] = col

    def _reduced(self, cost: np.ndarray) -> np.ndarray:
        return cost - np.asarray(cost)[self.basis] @ self.t[:, :-1]

    def run(self, cost: np.ndarray, allowed: np.ndarray, max_iters: int) -> str:
        """Maximize cost over the current feasible basis; returns a status."""
        t = self.t
        stall = 0
        reduced = self._reduced(cost)
        for k in range(max_iters):
            cand = np.flatnonzero((reduced > PIVOT_TOL) & allowed)
            if cand.size == 0:
                return "optimal"
            if stall >= STALL_LIMIT:
                col = int(cand[0])  # Bland: lowest index
            else:
                col = int(cand[np.argmax(reduced[cand])])
            colvals = t[:, col]
            pos = colvals > PIVOT_TOL
            if not np.any(pos):
                return "unbounded"
            ratios = np.full(colvals.shape, np.inf)
            ratios[pos] = t[pos, -1] / colvals[pos]
            best = ratios.min()
            rows = np.flatnonzero(ratios <= best + PIVOT_TOL)
            # Bland-compatible tie break: lowest basis index leaves
            row = int(min(rows, key=lambda r: self.basis[r]))
            stall = stall + 1 if best <= PIVOT_TOL else 0
            self.iterations += 1
            self._pivot(row, col)
            if (k + 1) % 256 == 0:
                reduced = self._reduced(cost)  # refresh accumulated drift
            else:
                reduced = reduced - reduced[col] * t[row, :-1]
        raise RuntimeError("simplex iteration limit exceeded")


ROW_GENERATION_THRESHOLD = 400  # inequality count above which rows are lazily added
ROW_BATCH = 64


def solve_lp(lp: LinearProgram, max_iters: int | None = None) -> LPResult:
    """Solve with statuses for infeasible/unbounded instead of raising.

    Small instances go straight to the two-phase tableau.  Instances with
    many inequality rows (the trajectory-band programs) are solved by exact
    row generation: optimize over an active subset, then pull in violated
    rows until none remain, which certifies global optimality.
    """
    if lp.ineq_coeffs.shape[0] <= ROW_GENERATION_THRESHOLD:
        return _solve_lp_dense(lp, max_iters)

    m = lp.ineq_coeffs.shape[0]
    active = list(range(min(ROW_BATCH, m)))
    known = set(active)
    while True:
        sub = LinearProgram(
            objective=lp.objective,
            ineq_coeffs=lp.ineq_coeffs[active],
            ineq_bounds=lp.ineq_bounds[active],
            eq_coeffs=lp.eq_coeffs,
            eq_bounds=lp.eq_bounds,
            lower_bounds=lp.lower_bounds,
        )
        res = _solve_lp_dense(sub, max_iters)
        if res.status == "infeasible":
            return res  # a sub-system already blocks the full one
        if res.status == "unbounded":
            fresh = [i for i in range(m) if i not in known][:ROW_BATCH]
            if not fresh:
                return res
            active.extend(fresh)
            known.update(fresh)
            continue
        violation = lp.ineq_coeffs @ res.x - lp.ineq_bounds
        worst = np.argsort(violation)[::-1][: 2 * ROW_BATCH]
        fresh = [int(i) for i in worst if violation[i] > FEAS_TOL and i not in known]
        if not fresh:
            return res
        active.extend(fresh)
        known.update(fresh)


def _solve_lp_dense(lp: LinearProgram, max_iters: int | None = None) -> LPResult:
    """Two-phase simplex; infeasible/unbounded come back as statuses."""
    n = lp.n_vars
    lb = lp.lower_bounds
    m1 = lp.ineq_coeffs.shape[0]
    m2 = lp.eq_coeffs.shape[0]
    m = m1 + m2

    # shift x = lb + x' so all variables are simply nonnegative
    b = lp.ineq_bounds - lp.ineq_coeffs @ lb
    f = lp.eq_bounds - lp.eq_coeffs @ lb

    rows = np.zeros((m, n + m1))
    rhs = np.empty(m)
    rows[:m1, :n] = lp.ineq_coeffs
    rows[:m1, n : n + m1] = np.eye(m1)
    rhs[:m1] = b
    rows[m1:, :n] = lp.eq_coeffs
    rhs[m1:] = f
    flip = rhs < 0
    rows[flip] *= -1.0
    rhs[flip] = -rhs[flip]

    # basis: slacks where usable, artificials elsewhere
    basis: list[int] = []
    art_rows = []
    for i in range(m):
        if i < m1 and not flip[i]:
            basis.append(n + i)
        else:
            art_rows.append(i)
            basis.append(-1)  # placeholder for an artificial
    n_art = len(art_rows)
    if n_art:
        art_block = np.zeros((m, n_art))
        for j, i in enumerate(art_rows):
            art_block[i, j] = 1.0
            basis[i] = n + m1 + j
        rows = np.hstack([rows, art_block])

    tab = _Tableau(rows, rhs, basis)
    total_cols = rows.shape[1]
    max_iters = max_iters or 200 * (m + total_cols)

    if n_art:
        phase1_cost = np.zeros(total_cols)
        phase1_cost[n + m1 :] = -1.0
        allowed = np.ones(total_cols, dtype=bool)
        status = tab.run(phase1_cost, allowed, max_iters)
        if status != "optimal":
            raise RuntimeError("phase 1 cannot be unbounded")
        value = sum(
            tab.t[i, -1] for i, bcol in enumerate(tab.basis) if bcol >= n + m1
        )
        if value > FEAS_TOL:
            return LPResult(status="infeasible", iterations=tab.iterations)
        # drive remaining artificials out of the basis where possible
        for i, bcol in enumerate(tab.basis):
            if bcol >= n + m1:
                pivots = np.flatnonzero(np.abs(tab.t[i, : n + m1]) > PIVOT_TOL)
                if pivots.size:
                    tab._pivot(i, int(pivots[0]))

    cost = np.zeros(total_cols)
    cost[:n] = lp.objective
    allowed = np.ones(total_cols, dtype=bool)
    allowed[n + m1 :] = False  # artificials stay out
    status = tab.run(cost, allowed, max_iters)
    if status == "unbounded":
        return LPResult(status="unbounded", iterations=tab.iterations)

    x = np.zeros(n)
    for i, bcol in enumerate(tab.basis):
        if bcol < n:
            x[bcol] = tab.t[i, -1]
    x += lb
    return LPResult(
        status="optimal",
        x=x,
        objective=float(lp.objective @ x),
        iterations=tab.iterations,
    )
