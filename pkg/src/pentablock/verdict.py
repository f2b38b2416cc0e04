"""Classification outcome shared by the operator-level checks."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Verdict:
    """Outcome of an operator-identity check.

    Each residual is stored together with the tolerance it was compared
    against.  ``inconclusive`` marks a failed check whose residuals all fall
    inside the (wider) boundary band.
    """

    is_member: bool
    residuals: dict[str, float]
    route: str
    inconclusive: bool = False
    tolerances: dict[str, float] = field(default_factory=dict, repr=False)

    @classmethod
    def from_checks(cls, checks, route: str) -> "Verdict":
        """Build from ``{name: (value, tolerance, band)}``."""
        residuals = {k: float(v[0]) for k, v in checks.items()}
        tolerances = {k: float(v[1]) for k, v in checks.items()}
        ok = all(v[0] <= v[1] for v in checks.values())
        near = all(v[0] <= v[2] for v in checks.values())
        return cls(ok, residuals, route, (not ok) and near, tolerances)

    @property
    def worst_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_json(self) -> dict:
        return {
            "is_member": bool(self.is_member),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "route": self.route,
            "inconclusive": bool(self.inconclusive),
        }

    @classmethod
    def from_json(cls, obj) -> "Verdict":
        return cls(
            bool(obj["is_member"]),
            {k: float(v) for k, v in obj["residuals"].items()},
            str(obj["route"]),
            bool(obj["inconclusive"]),
        )
