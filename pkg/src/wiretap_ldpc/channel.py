"""BPSK-AWGN wiretap channel mathematics.

Destination sees y = g*x + n, the eavesdropper sees z = a*g*x + n', with
n, n' i.i.d. standard normal (noise variance normalized to 1, so all gains
are noise-normalized and gain**2 is the received SNR).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

_GH_NODES, _GH_WEIGHTS = hermgauss(64)
_LN2 = math.log(2.0)

# scalar search stops when the bracket on the gain is this small
GAIN_TOL = 1e-4


class OutOfRegionError(ValueError):
    """Requested rate lies outside the achievable region."""


@dataclass(frozen=True)
class ChannelSetting:
    """Wiretap channel operating point.

    max_snr_db: maximum allowable SNR (power constraint) in dB.
    alpha_sq_db: eavesdropper gain advantage a**2 in dB.
    operating_gain: noise-normalized transmit gain actually used; its square
        is the destination SNR.  Defaults to full power.
    """

    max_snr_db: float
    alpha_sq_db: float
    operating_gain: float | None = None

    def __post_init__(self):
        if self.operating_gain is None:
            object.__setattr__(self, "operating_gain", self.max_gain)
        if self.operating_gain < 0:
            raise ValueError("operating gain must be nonnegative")
        if self.operating_gain > self.max_gain * (1 + 1e-12):
            raise ValueError(
                f"operating gain {self.operating_gain:.6g} exceeds the power "
                f"constraint (max gain {self.max_gain:.6g})"
            )
        if self.alpha <= 0:
            raise ValueError("eavesdropper gain must be positive")

    @property
    def max_snr(self) -> float:
        return 10.0 ** (self.max_snr_db / 10.0)

    @property
    def max_gain(self) -> float:
        return math.sqrt(self.max_snr)

    @property
    def alpha(self) -> float:
        return math.sqrt(10.0 ** (self.alpha_sq_db / 10.0))

    @property
    def wiretap_gain(self) -> float:
        return self.alpha * self.operating_gain

    def to_json(self) -> str:
        return json.dumps(
            {
                "max_snr_db": self.max_snr_db,
                "alpha_sq_db": self.alpha_sq_db,
                "operating_gain": self.operating_gain,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ChannelSetting":
        d = json.loads(text)
        return cls(
            max_snr_db=float(d["max_snr_db"]),
            alpha_sq_db=float(d["alpha_sq_db"]),
            operating_gain=(
                float(d["operating_gain"]) if d.get("operating_gain") is not None else None
            ),
        )


@dataclass(frozen=True)
class RatePoint:
    """An achievable (secret rate, equivocation rate) pair."""

    secret_rate: float
    equivocation_rate: float

    def __post_init__(self):
        if not (0 <= self.equivocation_rate <= self.secret_rate + 1e-12):
            raise ValueError("need 0 <= equivocation rate <= secret rate")

    @property
    def fractional_equivocation(self) -> float:
        if self.secret_rate == 0:
            raise ValueError("fractional equivocation undefined at zero secret rate")
        return min(1.0, self.equivocation_rate / self.secret_rate)


def _softplus(u: np.ndarray) -> np.ndarray:
    # log(1 + exp(u)) without overflow
    return np.logaddexp(0.0, u)


def bpsk_capacity(gain: float) -> float:
    """Capacity in bits/use of the unit-noise AWGN channel with BPSK input.

    C(t) = 1 - E[log2(1 + exp(-2*t*y))] with y ~ N(t, 1), evaluated with
    64-node Gauss-Hermite quadrature.
    """
    if gain < 0:
        raise ValueError("gain must be nonnegative")
    if gain == 0:
        return 0.0
    y = gain + math.sqrt(2.0) * _GH_NODES
    u = -2.0 * gain * y
    val = float(np.dot(_GH_WEIGHTS, _softplus(u))) / math.sqrt(math.pi) / _LN2
    return 1.0 - val


def bpsk_capacity_mc(gain: float, samples: int = 10_000_000, seed: int = 0) -> float:
    """Monte-Carlo estimate of bpsk_capacity, kept as an independent check."""
    if gain < 0:
        raise ValueError("gain must be nonnegative")
    rng = np.random.default_rng(seed)
    total = 0.0
    chunk = 1_000_000
    remaining = samples
    while remaining > 0:
        m = min(chunk, remaining)
        y = gain + rng.standard_normal(m)
        total += float(np.sum(_softplus(-2.0 * gain * y)))
        remaining -= m
    return 1.0 - total / samples / _LN2


def _golden_section_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def secrecy_capacity(setting: ChannelSetting) -> tuple[float, float]:
    """Max over the transmit gain of C(g) - C(a*g), with the maximizing gain.

    Searched by golden section over [0, max_gain]; falls back to a dense grid
    when a coarse scan shows the objective is not unimodal.
    """
    alpha = setting.alpha
    b_max = setting.max_gain

    def objective(b: float) -> float:
        return bpsk_capacity(b) - bpsk_capacity(alpha * b)

    if b_max == 0:
        return 0.0, 0.0

    # coarse unimodality scan
    grid = np.linspace(0.0, b_max, 129)
    vals = np.array([objective(b) for b in grid])
    d = np.diff(vals)
    rises_after_fall = np.any(d[:-1] < -1e-12) and np.any(
        (d[1:] > 1e-12) & (np.cumsum(d < -1e-12)[:-1] > 0)
    )
    if rises_after_fall:
        dense = np.linspace(0.0, b_max, 10_001)
        dv = np.array([objective(b) for b in dense])
        i = int(np.argmax(dv))
        lo = dense[max(i - 1, 0)]
        hi = dense[min(i + 1, len(dense) - 1)]
    else:
        i = int(np.argmax(vals))
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]

    best_b, best_v = _golden_section_max(objective, lo, hi, GAIN_TOL)
    if best_v <= 0.0:
        return 0.0, best_b
    return best_v, best_b


def region_boundary(secret_rate: float, setting: ChannelSetting) -> float:
    """Largest fractional equivocation achievable at the given secret rate."""
    if secret_rate <= 0:
        raise OutOfRegionError("secret rate must be positive")
    if secret_rate > bpsk_capacity(setting.max_gain) + 1e-12:
        raise OutOfRegionError(
            f"secret rate {secret_rate:.6g} exceeds the destination capacity"
        )
    cb, _ = secrecy_capacity(setting)
    return min(1.0, cb / secret_rate)


def transmit(symbols: np.ndarray, gain: float, rng) -> np.ndarray:
    """Pass +/-1 symbols through the unit-noise Gaussian channel.

    `rng` is a seeded numpy Generator (or an int seed); output is
    deterministic given the seed.
    """
    x = np.asarray(symbols, dtype=np.float64)
    if x.size and not np.all(np.abs(x) == 1.0):
        raise ValueError("symbols must be +/-1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return gain * x + rng.standard_normal(x.shape)


def llr(observations: np.ndarray, gain: float) -> np.ndarray:
    """Intrinsic LLRs for unit-noise BPSK: 2 * gain * y (positive means bit 0)."""
    return 2.0 * gain * np.asarray(observations, dtype=np.float64)
