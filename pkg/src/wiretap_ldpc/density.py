"""Quantized density evolution for BP over punctured/pinned BPSK-AWGN inputs.

LLR densities live on a uniform grid of step `step` spanning
[-half_range, half_range] plus two overflow atoms at +/-infinity.
Variable-node updates are exact convolutions on the grid (overflow folded
into the atoms).  Check-node updates run in sign-magnitude form: signs
combine through even/odd mixtures and magnitudes through a precomputed
quantized table of the pairwise 2*atanh(tanh(a/2)*tanh(b/2)) operation,
with partial powers reused across the check-degree mixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .degrees import DegreeDistribution

DEFAULT_STEP = 0.05
DEFAULT_HALF_RANGE = 25.0
MASS_TOL = 1e-9


class DensityGrid:
    """Quantization grid shared by all densities participating in one run."""

    def __init__(self, step: float = DEFAULT_STEP, half_range: float = DEFAULT_HALF_RANGE):
        self.step = float(step)
        self.half_range = float(half_range)
        self.n_half = int(round(self.half_range / self.step))
        if abs(self.n_half * self.step - self.half_range) > 1e-12:
            raise ValueError("half_range must be an integer multiple of step")
        self.n_bins = 2 * self.n_half + 1
        self.centers = (np.arange(self.n_bins) - self.n_half) * self.step
        self._boxplus_table: np.ndarray | None = None

    @property
    def boxplus_table(self) -> np.ndarray:
        """(n_half+2)^2 table of quantized pairwise box-plus magnitudes.

        Index n_half+1 is the infinity atom, an exact identity element.
        """
        if self._boxplus_table is None:
            mags = np.arange(self.n_half + 1) * self.step
            a = mags[:, None]
            b = mags[None, :]
            small = np.minimum(a, b)
            val = small + np.log1p(np.exp(-(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
            idx = np.rint(val / self.step).astype(np.int64)
            np.clip(idx, 0, self.n_half, out=idx)
            inf = self.n_half + 1
            table = np.empty((inf + 1, inf + 1), dtype=np.int64)
            table[:inf, :inf] = idx
            table[inf, :inf] = np.arange(inf)
            table[:inf, inf] = np.arange(inf)
            table[inf, inf] = inf
            self._boxplus_table = table
        return self._boxplus_table


DEFAULT_GRID = DensityGrid()


@dataclass
class QuantizedDensity:
    """Probability mass over the LLR grid plus overflow atoms."""

    grid: DensityGrid
    mass: np.ndarray
    neg_inf: float = 0.0
    pos_inf: float = 0.0

    def total_mass(self) -> float:
        return float(self.mass.sum() + self.neg_inf + self.pos_inf)

    def error_probability(self) -> float:
        """Mass below zero plus half the mass at exactly zero."""
        h = self.grid.n_half
        return float(self.neg_inf + self.mass[:h].sum() + 0.5 * self.mass[h])

    def mean_finite(self) -> float:
        return float(np.dot(self.grid.centers, self.mass))

    def check_normalized(self, tol: float = MASS_TOL) -> "QuantizedDensity":
        t = self.total_mass()
        if abs(t - 1.0) > tol:
            raise ValueError(f"density mass {t!r} deviates from 1 beyond {tol}")
        return self

    def renormalized(self) -> "QuantizedDensity":
        """Rescale to unit mass.  Iterated updates amplify rounding drift
        of the total through the mixture powers, so trajectory loops
        renormalize once per iteration."""
        t = self.total_mass()
        return QuantizedDensity(
            grid=self.grid,
            mass=self.mass / t,
            neg_inf=self.neg_inf / t,
            pos_inf=self.pos_inf / t,
        )


def zero_density(grid: DensityGrid = DEFAULT_GRID) -> QuantizedDensity:
    return QuantizedDensity(grid=grid, mass=np.zeros(grid.n_bins))


def delta_density(x: float, grid: DensityGrid = DEFAULT_GRID) -> QuantizedDensity:
    """Unit point mass at x (may be +/-inf); finite x snaps to the grid."""
    d = zero_density(grid)
    if np.isposinf(x):
        d.pos_inf = 1.0
    elif np.isneginf(x):
        d.neg_inf = 1.0
    else:
        i = int(round(x / grid.step)) + grid.n_half
        if not 0 <= i < grid.n_bins:
            raise ValueError(f"point {x} outside the grid")
        d.mass[i] = 1.0
    return d


def gaussian_channel_density(
    gain: float, grid: DensityGrid = DEFAULT_GRID
) -> QuantizedDensity:
    """Density of the intrinsic LLR 2*gain*y, y ~ N(gain, 1), i.e.
    N(2 gain^2, 4 gain^2), under the all-zero (+1) codeword convention."""
    if gain < 0:
        raise ValueError("gain must be nonnegative")
    if gain == 0:
        return delta_density(0.0, grid)
    mu = 2.0 * gain * gain
    sd = 2.0 * gain
    edges = np.concatenate(
        [grid.centers - grid.step / 2, [grid.centers[-1] + grid.step / 2]]
    )
    cdf = norm.cdf((edges - mu) / sd)
    return QuantizedDensity(
        grid=grid,
        mass=np.diff(cdf),
        neg_inf=float(cdf[0]),
        pos_inf=float(1.0 - cdf[-1]),
    )


def initial_density(
    gain: float,
    puncture_fraction: float,
    pinned: bool,
    grid: DensityGrid = DEFAULT_GRID,
) -> QuantizedDensity:
    """Intrinsic mixture for DE: channel density with weight 1-p plus an
    impulse of weight p at zero (punctured) or +inf (pinned)."""
    p = float(puncture_fraction)
    if not 0.0 <= p <= 1.0:
        raise ValueError("puncture fraction must lie in [0, 1]")
    ch = gaussian_channel_density(gain, grid)
    out = QuantizedDensity(
        grid=grid,
        mass=(1.0 - p) * ch.mass,
        neg_inf=(1.0 - p) * ch.neg_inf,
        pos_inf=(1.0 - p) * ch.pos_inf,
    )
    if pinned:
        out.pos_inf += p
    else:
        out.mass[grid.n_half] += p
    return out


def bec_density(
    erasure_prob: float, grid: DensityGrid = DEFAULT_GRID
) -> QuantizedDensity:
    """Erasure-channel density: mass at 0 (erased) and +inf (known)."""
    if not 0.0 <= erasure_prob <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    d = zero_density(grid)
    d.mass[grid.n_half] = erasure_prob
    d.pos_inf = 1.0 - erasure_prob
    return d


# ---------------------------------------------------------------------------
# sign-magnitude transform and the pairwise operations


def _to_sign_mag(d: QuantizedDensity) -> tuple[np.ndarray, np.ndarray]:
    """Split into even/odd magnitude components (exact relabeling).

    Returns (even, odd) of length n_half+2; index n_half+1 is infinity.
    """
    g = d.grid
    h = g.n_half
    plus = np.empty(h + 2)
    minus = np.empty(h + 2)
    plus[0] = 0.5 * d.mass[h]
    minus[0] = 0.5 * d.mass[h]
    plus[1 : h + 1] = d.mass[h + 1 :]
    minus[1 : h + 1] = d.mass[h - 1 :: -1]
    plus[h + 1] = d.pos_inf
    minus[h + 1] = d.neg_inf
    return plus + minus, plus - minus


def _from_sign_mag(
    even: np.ndarray, odd: np.ndarray, grid: DensityGrid
) -> QuantizedDensity:
    h = grid.n_half
    plus = 0.5 * (even + odd)
    minus = 0.5 * (even - odd)
    mass = np.empty(grid.n_bins)
    mass[h] = plus[0] + minus[0]
    mass[h + 1 :] = plus[1 : h + 1]
    mass[h - 1 :: -1] = minus[1 : h + 1]
    return QuantizedDensity(
        grid=grid, mass=mass, neg_inf=float(minus[h + 1]), pos_inf=float(plus[h + 1])
    )


def _boxplus_sign_mag(ea, oa, eb, ob, grid: DensityGrid):
    table = grid.boxplus_table.ravel()
    n = grid.n_half + 2
    even = np.bincount(table, weights=np.outer(ea, eb).ravel(), minlength=n * n)[:n]
    odd = np.bincount(table, weights=np.outer(oa, ob).ravel(), minlength=n * n)[:n]
    return even, odd


def boxplus_pair(a: QuantizedDensity, b: QuantizedDensity) -> QuantizedDensity:
    """Density of the check-node combination of two independent messages.

    A perfectly known message (unit mass at +inf) is the identity element
    and passes the other operand through untouched.
    """
    for x, y in ((a, b), (b, a)):
        if y.pos_inf == 1.0:
            return QuantizedDensity(
                grid=x.grid, mass=x.mass.copy(),
                neg_inf=x.neg_inf, pos_inf=x.pos_inf,
            )
    ea, oa = _to_sign_mag(a)
    eb, ob = _to_sign_mag(b)
    even, odd = _boxplus_sign_mag(ea, oa, eb, ob, a.grid)
    return _from_sign_mag(even, odd, a.grid)


def check_node_update(
    density: QuantizedDensity, rho: dict[int, float]
) -> QuantizedDensity:
    """Mixture over check degrees of the (d-1)-fold box-plus of the input.

    The degree-2 component is the input itself and bypasses the transform,
    keeping that identity exact.
    """
    grid = density.grid
    n = grid.n_half + 2
    out = zero_density(grid)
    w2 = rho.get(2, 0.0)
    if w2:
        out.mass += w2 * density.mass
        out.neg_inf += w2 * density.neg_inf
        out.pos_inf += w2 * density.pos_inf
    max_fold = max(rho) - 1
    if max_fold >= 2:
        e1, o1 = _to_sign_mag(density)
        even = np.zeros(n)
        odd = np.zeros(n)
        ek, ok = e1, o1
        for fold in range(2, max_fold + 1):
            ek, ok = _boxplus_sign_mag(ek, ok, e1, o1, grid)
            w = rho.get(fold + 1, 0.0)
            if w:
                even += w * ek
                odd += w * ok
        part = _from_sign_mag(even, odd, grid)
        out.mass += part.mass
        out.neg_inf += part.neg_inf
        out.pos_inf += part.pos_inf
    return out


def convolve_pair(a: QuantizedDensity, b: QuantizedDensity) -> QuantizedDensity:
    """Density of the sum of two independent LLRs (variable-node combine)."""
    grid = a.grid
    h = grid.n_half
    conv = np.convolve(a.mass, b.mass)
    mass = conv[h : 3 * h + 1].copy()
    neg = float(conv[:h].sum())
    pos = float(conv[3 * h + 1 :].sum())

    fa = float(a.mass.sum())
    fb = float(b.mass.sum())
    pos += a.pos_inf * (fb + b.pos_inf) + b.pos_inf * fa
    neg += a.neg_inf * (fb + b.neg_inf) + b.neg_inf * fa
    # opposing infinities annihilate to zero
    mass[h] += a.pos_inf * b.neg_inf + a.neg_inf * b.pos_inf
    return QuantizedDensity(grid=grid, mass=mass, neg_inf=neg, pos_inf=pos)


def variable_node_update(
    channel: QuantizedDensity,
    incoming: QuantizedDensity,
    lam: dict[int, float],
) -> QuantizedDensity:
    """Mixture over variable degrees of channel (+) (j-1) incoming messages."""
    grid = channel.grid
    out = zero_density(grid)
    seq = channel
    for j in range(2, max(lam) + 1):
        seq = convolve_pair(seq, incoming)
        w = lam.get(j, 0.0)
        if w:
            out.mass += w * seq.mass
            out.neg_inf += w * seq.neg_inf
            out.pos_inf += w * seq.pos_inf
    return out


def _variable_update_with_columns(
    channel: QuantizedDensity,
    incoming: QuantizedDensity,
    lam: dict[int, float],
    max_degree: int,
) -> tuple[QuantizedDensity, np.ndarray]:
    """Variable update plus the per-degree error column used by the
    response matrices (degree j error at column j-2)."""
    grid = channel.grid
    out = zero_density(grid)
    col = np.empty(max(max_degree, max(lam)) - 1)
    seq = channel
    for j in range(2, max(max_degree, max(lam)) + 1):
        seq = convolve_pair(seq, incoming)
        col[j - 2] = seq.error_probability()
        w = lam.get(j, 0.0)
        if w:
            out.mass += w * seq.mass
            out.neg_inf += w * seq.neg_inf
            out.pos_inf += w * seq.pos_inf
    return out, col


# ---------------------------------------------------------------------------
# trajectories and response matrices


@dataclass
class Trajectory:
    """Per-iteration message error probabilities e(0..T)."""

    errors: np.ndarray
    target: float
    converged_at: int | None
    stalled: bool = False
    check_outputs: list[QuantizedDensity] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.converged_at is not None


def run_trajectory(
    dist: DegreeDistribution,
    density0: QuantizedDensity,
    max_iters: int = 2000,
    target: float = 1e-2,
    stall_tol: float = 1e-9,
    keep_check_outputs: bool = False,
) -> Trajectory:
    """Iterate DE from the intrinsic density, recording the error after
    every variable update; stops at the target, on a stall, or at max_iters."""
    msg = density0.check_normalized()
    errors = [msg.error_probability()]
    checks: list[QuantizedDensity] = []
    converged_at = 0 if errors[0] <= target else None
    stalled = False
    while converged_at is None and len(errors) <= max_iters:
        c = check_node_update(msg, dist.rho)
        if keep_check_outputs:
            checks.append(c)
        msg = variable_node_update(density0, c, dist.lam).renormalized()
        errors.append(msg.error_probability())
        if errors[-1] <= target:
            converged_at = len(errors) - 1
        elif errors[-2] - errors[-1] < stall_tol:
            stalled = True
            break
    return Trajectory(
        errors=np.array(errors),
        target=target,
        converged_at=converged_at,
        stalled=stalled,
        check_outputs=checks,
    )


class NonConvergentError(ValueError):
    """DE trajectory failed to reach the target error."""


@dataclass
class ResponseMatrices:
    """Final-iteration degree-singleton error responses.

    dest[l-1, j-2] is the destination error after l iterations when the
    last variable update uses pure degree j; wire is the eavesdropper
    analogue.  e_dest/e_wire are the underlying trajectories (index 0 is
    the intrinsic error).
    """

    dest: np.ndarray
    wire: np.ndarray
    e_dest: np.ndarray
    e_wire: np.ndarray


def _singleton_columns(
    dist: DegreeDistribution,
    density0: QuantizedDensity,
    max_degree: int,
    max_iters: int,
    target: float,
) -> tuple[np.ndarray, np.ndarray]:
    traj = run_trajectory(
        dist, density0, max_iters=max_iters, target=target, keep_check_outputs=True
    )
    if not traj.converged or traj.converged_at == 0:
        raise NonConvergentError(
            f"trajectory stops at error {traj.errors[-1]:.3g} above {target}"
        )
    rows = []
    errors = [traj.errors[0]]
    msg = density0
    for c in traj.check_outputs[: traj.converged_at]:
        msg, col = _variable_update_with_columns(density0, c, dist.lam, max_degree)
        msg = msg.renormalized()
        rows.append(col)
        errors.append(msg.error_probability())
    return np.array(rows), np.array(errors)


def response_matrices(
    dist: DegreeDistribution,
    density0_dest: QuantizedDensity,
    density0_wire: QuantizedDensity,
    max_degree: int,
    max_iters: int = 2000,
    target: float = 1e-2,
) -> ResponseMatrices:
    """Response matrices for both decoders under the current distribution."""
    dest, e_d = _singleton_columns(dist, density0_dest, max_degree, max_iters, target)
    wire, e_w = _singleton_columns(dist, density0_wire, max_degree, max_iters, target)
    return ResponseMatrices(dest=dest, wire=wire, e_dest=e_d, e_wire=e_w)


def check_singleton_columns(
    dist: DegreeDistribution,
    density0: QuantizedDensity,
    max_degree: int,
    max_iters: int = 2000,
    target: float = 1e-2,
) -> tuple[np.ndarray, np.ndarray]:
    """Check-side analogue: entry [l-1, i-2] is the error after l iterations
    when the final check update uses pure degree i (variable mixing kept)."""
    traj = run_trajectory(dist, density0, max_iters=max_iters, target=target)
    if not traj.converged or traj.converged_at == 0:
        raise NonConvergentError(
            f"trajectory stops at error {traj.errors[-1]:.3g} above {target}"
        )
    rows = []
    msg = density0
    for _ in range(traj.converged_at):
        grid = msg.grid
        e1, o1 = _to_sign_mag(msg)
        ek, ok = e1, o1
        col = np.empty(max_degree - 1)
        for i in range(2, max_degree + 1):
            c_i = msg if i == 2 else _from_sign_mag(ek, ok, grid)
            col[i - 2] = variable_node_update(
                density0, c_i, dist.lam
            ).error_probability()
            if i < max_degree:
                ek, ok = _boxplus_sign_mag(ek, ok, e1, o1, grid)
        rows.append(col)
        c_mixed = check_node_update(msg, dist.rho)
        msg = variable_node_update(density0, c_mixed, dist.lam).renormalized()
    return np.array(rows), traj.errors[: traj.converged_at + 1]


def density_to_csv(d: QuantizedDensity) -> str:
    lines = ["bin_center,mass"]
    lines.append(f"-inf,{d.neg_inf!r}")
    for c, m in zip(d.grid.centers, d.mass):
        lines.append(f"{c!r},{m!r}")
    lines.append(f"inf,{d.pos_inf!r}")
    return "\n".join(lines) + "\n"


def trajectory_to_csv(t: Trajectory) -> str:
    lines = ["iter,error"]
    for i, e in enumerate(t.errors):
        lines.append(f"{i},{e!r}")
    return "\n".join(lines) + "\n"
