from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.core.config import LOSS_TERMS
from src.core.errors import NumericFailure
from src.critic.ensemble import CriticEnsemble, ensemble_backward, ensemble_forward, ensemble_values
from src.numerics.mlp import MlpParams
from src.replay.buffer import Minibatch
from src.replay.masks import BootstrapMask

VAR_FLOOR = 1e-6


@dataclass(frozen=True)
class PriorConfig:
    sigma0_sq: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma0_sq > 0.0:
            raise ValueError(f"prior variance must be positive, got {self.sigma0_sq}")


@dataclass(frozen=True)
class PosteriorMoments:
    mu: float
    sigma_sq: float
    prior_mu: float


@dataclass(frozen=True)
class CriticLossBreakdown:
    diversity: float
    coherence: float
    propagation: float
    total: float


def propagation_coefficient(gamma: float) -> float:
    return (2.0 * gamma * gamma + 1.0) / 2.0


def masked_moments(
    values_row: np.ndarray,
    target_row: np.ndarray,
    mask_row: np.ndarray,
    floor: float = VAR_FLOOR,
) -> PosteriorMoments | None:
    """Moments over surviving members; None when every member is masked out."""
    b = np.asarray(mask_row, dtype=bool)
    m = int(b.sum())
    if m == 0:
        return None
    x = np.asarray(values_row, dtype=np.float64)[b]
    mu = float(x.mean())
    prior_mu = float(np.asarray(target_row, dtype=np.float64)[b].mean())
    var = float(((x - mu) ** 2).sum() / (m - 1)) if m >= 2 else 0.0
    return PosteriorMoments(mu=mu, sigma_sq=max(var, floor), prior_mu=prior_mu)


def _row_moments(values: np.ndarray, target_values: np.ndarray, b: np.ndarray, floor: float):
    m = b.sum(axis=1)
    active = m > 0
    safe_m = np.where(active, m, 1.0)
    mu = (b * values).sum(axis=1) / safe_m
    prior_mu = (b * target_values).sum(axis=1) / safe_m
    dev = values - mu[:, None]
    var = np.where(m >= 2, (b * dev * dev).sum(axis=1) / np.maximum(m - 1.0, 1.0), 0.0)
    floored = var < floor
    sigma_sq = np.where(floored, floor, var)
    return m, active, mu, prior_mu, dev, sigma_sq, floored


def pbac_objective(
    values: np.ndarray,
    target_values: np.ndarray,
    r: np.ndarray,
    done: np.ndarray,
    mask: np.ndarray,
    next_logprobs: np.ndarray | None,
    alpha: float,
    gamma: float,
    sigma0_sq: float,
    terms: Sequence[str] = LOSS_TERMS,
    floor: float = VAR_FLOOR,
) -> tuple[CriticLossBreakdown, np.ndarray]:
    """Array-level critic objective over an n x K value matrix; returns (breakdown, dL/dvalues)."""
    x = np.asarray(values, dtype=np.float64)
    xbar = np.asarray(target_values, dtype=np.float64)
    if x.ndim != 2 or x.shape != xbar.shape:
        raise ValueError(f"values {x.shape} and target values {xbar.shape} must be equal n x K")
    n, k = x.shape
    b = np.asarray(mask, dtype=np.float64)
    if b.shape != (n, k):
        raise ValueError(f"mask {b.shape} does not match values {x.shape}")
    r = np.asarray(r, dtype=np.float64).reshape(n)
    cont = gamma * (1.0 - np.asarray(done, dtype=np.float64).reshape(n))
    soft = np.zeros(n) if next_logprobs is None else alpha * np.asarray(next_logprobs, dtype=np.float64).reshape(n)

    m, active, mu, prior_mu, dev, sigma_sq, floored = _row_moments(x, xbar, b, floor)
    scale = 1.0 / (n * k)
    grad = np.zeros_like(x)

    diversity = coherence = propagation = 0.0
    if "diversity" in terms:
        y = r[:, None] + cont[:, None] * (xbar - soft[:, None])
        res = y - x
        diversity = float(scale * (b * res * res).sum())
        grad += -2.0 * scale * b * res
    if "coherence" in terms:
        denom = 2.0 * gamma * gamma * sigma0_sq
        c = r + cont * (prior_mu - soft)
        res = c[:, None] - x
        coherence = float(scale * (b * res * res).sum() / denom)
        grad += -2.0 * scale * b * res / denom
    if "propagation" in terms:
        coef = propagation_coefficient(gamma)
        propagation = float(-coef / n * np.log(sigma_sq[active]).sum())
        live = active & ~floored & (m >= 2)
        if live.any():
            dvar = 2.0 * b * dev / np.maximum(m - 1.0, 1.0)[:, None]
            grad += np.where(live[:, None], -coef / n * dvar / sigma_sq[:, None], 0.0)

    total = diversity + coherence + propagation
    if not (np.isfinite(total) and np.all(np.isfinite(grad))):
        raise NumericFailure(
            f"non-finite critic loss (diversity={diversity}, coherence={coherence}, propagation={propagation})"
        )
    return CriticLossBreakdown(diversity, coherence, propagation, total), grad


def _targets(ens: CriticEnsemble, batch: Minibatch, next_actions: np.ndarray) -> np.ndarray:
    return ensemble_values(ens, batch.s_next, next_actions, use_targets=True)


def pbac_loss(
    ens: CriticEnsemble,
    batch: Minibatch,
    mask: BootstrapMask,
    next_actions: np.ndarray,
    next_logprobs: np.ndarray | None,
    alpha: float,
    prior: PriorConfig,
    terms: Sequence[str] = LOSS_TERMS,
    floor: float = VAR_FLOOR,
) -> CriticLossBreakdown:
    values = ensemble_values(ens, batch.s, batch.a)
    breakdown, _ = pbac_objective(
        values, _targets(ens, batch, next_actions), batch.r, batch.done, mask.bits,
        next_logprobs, alpha, ens.gamma, prior.sigma0_sq, terms, floor,
    )
    return breakdown


def pbac_loss_grad(
    ens: CriticEnsemble,
    batch: Minibatch,
    mask: BootstrapMask,
    next_actions: np.ndarray,
    next_logprobs: np.ndarray | None,
    alpha: float,
    prior: PriorConfig,
    terms: Sequence[str] = LOSS_TERMS,
    floor: float = VAR_FLOOR,
) -> tuple[CriticLossBreakdown, MlpParams]:
    # targets and prior means enter as constants
    target_values = _targets(ens, batch, next_actions)
    values, cache = ensemble_forward(ens, batch.s, batch.a)
    breakdown, grad = pbac_objective(
        values, target_values, batch.r, batch.done, mask.bits,
        next_logprobs, alpha, ens.gamma, prior.sigma0_sq, terms, floor,
    )
    return breakdown, ensemble_backward(cache, grad)


def kl_from_values(
    values: np.ndarray,
    target_values: np.ndarray,
    r: np.ndarray,
    done: np.ndarray,
    gamma: float,
    sigma0_sq: float,
    mask: np.ndarray | None = None,
    floor: float = VAR_FLOOR,
) -> float:
    x = np.asarray(values, dtype=np.float64)
    n, k = x.shape
    b = np.ones_like(x) if mask is None else np.asarray(mask, dtype=np.float64)
    _, active, _, prior_mu, _, sigma_sq, _ = _row_moments(x, np.asarray(target_values, dtype=np.float64), b, floor)
    cont = gamma * (1.0 - np.asarray(done, dtype=np.float64).reshape(n))
    c = np.asarray(r, dtype=np.float64).reshape(n) + cont * prior_mu
    quad = (b * (c[:, None] - x) ** 2).sum(axis=1) / (gamma * gamma * sigma0_sq)
    per_row = (quad - b.sum(axis=1) * np.log(sigma_sq)) / (2.0 * k)
    return float(np.where(active, per_row, 0.0).sum() / n)


def kl_term(
    batch: Minibatch,
    ens: CriticEnsemble,
    next_actions: np.ndarray,
    prior: PriorConfig,
    mask: BootstrapMask | None = None,
) -> float:
    """Batch mean of the function-space KL approximation to the data-informed prior (constant dropped)."""
    return kl_from_values(
        ensemble_values(ens, batch.s, batch.a),
        _targets(ens, batch, next_actions),
        batch.r,
        batch.done,
        ens.gamma,
        prior.sigma0_sq,
        None if mask is None else mask.bits,
    )
