from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.oracle.mdp import (
    FiniteMdp,
    bellman,
    conditional_variance,
    q_pi_exact,
    stationary_dist,
    weighted_sq_norm,
)

REL_TOL = 1e-12


@dataclass(frozen=True)
class Check:
    """lhs == rhs (kind="eq") or lhs <= rhs (kind="le") up to tol."""

    name: str
    lhs: float
    rhs: float
    tol: float
    kind: str = "eq"

    @property
    def diff(self) -> float:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        if self.kind == "eq":
            return abs(self.diff) <= self.tol
        return self.diff <= self.tol

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class Lemma1Report:
    general: Check
    iid: Check


@dataclass(frozen=True)
class Lemma4Report:
    members: tuple[Check, ...]
    squared: Check
    chain: Check

    @property
    def passed(self) -> bool:
        return all(self.members) and bool(self.squared) and bool(self.chain)


def _as_ensemble(ensemble: Sequence[np.ndarray]) -> list[np.ndarray]:
    if len(ensemble) == 0:
        raise ValueError("ensemble must hold at least one value vector")
    return [np.asarray(x, dtype=np.float64) for x in ensemble]


def value_scale(m: FiniteMdp, ensemble: Sequence[np.ndarray]) -> float:
    xmax = max(float(np.max(x * x)) for x in _as_ensemble(ensemble))
    return 1.0 + xmax + float(np.max(m.r * m.r))


def ltilde_exact(m: FiniteMdp, ensemble: Sequence[np.ndarray], d: np.ndarray | None = None) -> float:
    """Expected squared sample-Bellman residual, enumerated over s ~ d and s' ~ P(.|s)."""
    d = stationary_dist(m) if d is None else d
    total = 0.0
    for x in _as_ensemble(ensemble):
        residual = m.r[:, None] + m.gamma * x[None, :] - x[:, None]
        total += float(d @ (m.P * residual * residual).sum(axis=1))
    return total / len(ensemble)


def _bellman_error(m: FiniteMdp, xs: list[np.ndarray], d: np.ndarray) -> float:
    return float(np.mean([weighted_sq_norm(bellman(m, x) - x, d) for x in xs]))


def lemma1_checks(m: FiniteMdp, ensemble: Sequence[np.ndarray]) -> Lemma1Report:
    xs = _as_ensemble(ensemble)
    d = stationary_dist(m)
    tol = REL_TOL * value_scale(m, xs)
    lt = ltilde_exact(m, xs, d)
    err = _bellman_error(m, xs, d)
    g2 = m.gamma**2
    cond_var = float(np.mean([d @ conditional_variance(m, x) for x in xs]))
    marginal_var = float(np.mean([d @ (x * x) - (d @ x) ** 2 for x in xs]))
    return Lemma1Report(
        general=Check("ltilde = bellman error + conditional variance", lt, err + g2 * cond_var, tol),
        iid=Check("ltilde = bellman error + marginal variance", lt, err + g2 * marginal_var, tol),
    )


def contraction_check(m: FiniteMdp, q1: np.ndarray, q2: np.ndarray) -> Check:
    d = stationary_dist(m)
    lhs = math.sqrt(weighted_sq_norm(bellman(m, q1) - bellman(m, q2), d))
    rhs = m.gamma * math.sqrt(weighted_sq_norm(np.asarray(q1) - np.asarray(q2), d))
    return Check("bellman contraction", lhs, rhs, REL_TOL * value_scale(m, [q1, q2]), kind="le")


def lemma4_theorem_check(m: FiniteMdp, ensemble: Sequence[np.ndarray]) -> Lemma4Report:
    xs = _as_ensemble(ensemble)
    d = stationary_dist(m)
    q = q_pi_exact(m)
    tol = REL_TOL * value_scale(m, [*xs, q])
    horizon = 1.0 - m.gamma

    members = []
    for k, x in enumerate(xs):
        dist = math.sqrt(weighted_sq_norm(x - q, d))
        resid = math.sqrt(weighted_sq_norm(bellman(m, x) - x, d))
        members.append(Check(f"member {k}: value error <= residual/(1-gamma)", dist, resid / horizon, tol, "le"))

    sq_dist = float(np.mean([weighted_sq_norm(x - q, d) for x in xs]))
    err = _bellman_error(m, xs, d)
    squared = Check("ensemble squared value error", sq_dist, err / horizon**2, tol / horizon**2, "le")

    cond_var = float(np.mean([d @ conditional_variance(m, x) for x in xs]))
    chain_rhs = (ltilde_exact(m, xs, d) - m.gamma**2 * cond_var) / horizon**2
    chain = Check("value error <= (ltilde - gamma^2 variance)/(1-gamma)^2", sq_dist, chain_rhs, tol / horizon**2, "le")
    return Lemma4Report(members=tuple(members), squared=squared, chain=chain)
