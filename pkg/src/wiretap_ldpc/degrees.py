"""Edge-perspective degree distributions for irregular LDPC ensembles."""

from __future__ import annotations

import json
from dataclasses import dataclass

NORMALIZATION_TOL = 1e-9


def _validate_side(fractions: dict[int, float], name: str) -> dict[int, float]:
    cleaned = {int(d): float(f) for d, f in fractions.items() if f != 0.0}
    if not cleaned:
        raise ValueError(f"{name} distribution is empty")
    for d, f in cleaned.items():
        if d < 2:
            raise ValueError(f"{name} degree {d} below the minimum of 2")
        if f < 0:
            raise ValueError(f"{name} fraction for degree {d} is negative")
    total = sum(cleaned.values())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"{name} fractions sum to {total!r}, expected 1")
    return dict(sorted(cleaned.items()))


@dataclass(frozen=True)
class DegreeDistribution:
    """Pair of edge-perspective polynomials: lam over variable-node degrees,
    rho over check-node degrees.  Fractions are per-edge, keyed by degree."""

    lam: dict[int, float]
    rho: dict[int, float]

    def __post_init__(self):
        object.__setattr__(self, "lam", _validate_side(self.lam, "variable"))
        object.__setattr__(self, "rho", _validate_side(self.rho, "check"))

    @property
    def max_var_degree(self) -> int:
        return max(self.lam)

    @property
    def max_chk_degree(self) -> int:
        return max(self.rho)

    def lam_node_fractions(self) -> dict[int, float]:
        """Node-perspective variable-degree fractions."""
        inv = {d: f / d for d, f in self.lam.items()}
        z = sum(inv.values())
        return {d: v / z for d, v in inv.items()}

    def rho_node_fractions(self) -> dict[int, float]:
        inv = {d: f / d for d, f in self.rho.items()}
        z = sum(inv.values())
        return {d: v / z for d, v in inv.items()}

    def avg_var_degree(self) -> float:
        return 1.0 / sum(f / d for d, f in self.lam.items())

    def avg_chk_degree(self) -> float:
        return 1.0 / sum(f / d for d, f in self.rho.items())

    def to_json_dict(self) -> dict:
        return {
            "lambda": {str(d): f for d, f in self.lam.items()},
            "rho": {str(d): f for d, f in self.rho.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d: dict) -> "DegreeDistribution":
        return cls(
            lam={int(k): float(v) for k, v in d["lambda"].items()},
            rho={int(k): float(v) for k, v in d["rho"].items()},
        )

    @classmethod
    def from_json(cls, text: str) -> "DegreeDistribution":
        return cls.from_json_dict(json.loads(text))


def design_rate(dist: DegreeDistribution) -> float:
    """Ensemble rate 1 - (sum rho_i/i) / (sum lam_j/j)."""
    num = sum(f / d for d, f in dist.rho.items())
    den = sum(f / d for d, f in dist.lam.items())
    return 1.0 - num / den


def regular(dv: int, dc: int) -> DegreeDistribution:
    return DegreeDistribution(lam={dv: 1.0}, rho={dc: 1.0})
