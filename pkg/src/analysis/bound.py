from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class BoundDiagnostics:
    empirical_risk: float
    kl: float
    variance_term: float
    nu: float
    lambda_bar: float
    B: float
    delta: float
    n: int
    rhs: float


def value_range_bound(reward_bound: float, gamma: float) -> float:
    return reward_bound**2 / (1.0 - gamma) ** 2


def bound_rhs(d: BoundDiagnostics, gamma: float) -> float:
    """Right-hand side of the PAC-Bayes bound on the expected squared value error."""
    if not 0.0 < d.delta <= 1.0:
        raise ValueError(f"delta must lie in (0,1], got {d.delta}")
    if d.n < 1:
        raise ValueError(f"n must be >= 1, got {d.n}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0,1), got {gamma}")
    complexity = d.nu * d.lambda_bar * d.B**2 / (8.0 * d.n) + (d.kl - math.log(d.delta)) / d.nu
    return (d.empirical_risk + complexity - gamma**2 * d.variance_term) / (1.0 - gamma) ** 2


def make_diagnostics(
    empirical_risk: float,
    kl: float,
    variance_term: float,
    gamma: float,
    n: int,
    nu: float = 1.0,
    lambda_bar: float = 1.0,
    delta: float = 0.05,
    reward_bound: float = 1.0,
) -> BoundDiagnostics:
    partial = BoundDiagnostics(
        empirical_risk=float(empirical_risk),
        kl=float(kl),
        variance_term=float(variance_term),
        nu=float(nu),
        lambda_bar=float(lambda_bar),
        B=value_range_bound(reward_bound, gamma),
        delta=float(delta),
        n=int(n),
        rhs=float("nan"),
    )
    return replace(partial, rhs=bound_rhs(partial, gamma))
