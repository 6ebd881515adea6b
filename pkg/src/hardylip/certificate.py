"""Machine-checked inequality records."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if hasattr(v, "item"):  # numpy scalar
        return _jsonable(v.item())
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


@dataclass
class Certificate:
    """lhs <= rhs * (1 + rel_slack), recorded with the sample that produced it."""

    bound_name: str
    lhs: float
    rhs: float
    parameters: dict[str, Any] = field(default_factory=dict)
    constant: float | None = None
    regime: str | None = None
    rel_slack: float = 0.0
    passed: bool | None = None

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        if self.passed is None:
            self.passed = bool(math.isfinite(self.lhs) and self.lhs <= self.rhs * (1.0 + self.rel_slack))

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        out = {
            "bound_name": self.bound_name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "parameters": _jsonable(self.parameters),
        }
        if self.constant is not None:
            out["constant"] = float(self.constant)
        if self.regime is not None:
            out["regime"] = self.regime
        return _jsonable(out)


def worst_of(certs: list[Certificate], name: str, **extra) -> Certificate:
    """Collapse a sweep into its tightest sample; failures keep their sample point."""
    if not certs:
        raise ValueError("empty sweep")
    def ratio(c):
        if not math.isfinite(c.lhs):
            return math.inf
        return c.lhs / c.rhs if c.rhs > 0 else math.inf
    worst = max(certs, key=ratio)
    n_fail = sum(not c.passed for c in certs)
    params = dict(worst.parameters)
    params.update(extra)
    params["samples"] = len(certs)
    params["violations"] = n_fail
    return Certificate(name, worst.lhs, worst.rhs, params, worst.constant, worst.regime,
                       worst.rel_slack, passed=n_fail == 0)
