from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.errors import NumericFailure
from src.critic.ensemble import (
    CriticEnsemble,
    ensemble_backward,
    ensemble_forward,
    ensemble_values,
    stacked_action_values,
    stacked_values,
    td_penalty,
)
from src.numerics.mlp import MlpParams, init_mlp
from src.replay.buffer import Minibatch
from src.replay.masks import BootstrapMask


@dataclass
class PriorFunction:
    """Frozen random networks added to each critic, scaled by beta. Never trained."""

    net: MlpParams
    act_dim: int = 1
    beta: float = 5.0

    @classmethod
    def create(cls, obs_dim: int, act_dim: int, k: int, hidden: int, rng: np.random.Generator, beta: float = 5.0) -> "PriorFunction":
        net = init_mlp([obs_dim + act_dim, hidden, hidden, 1], rng, stack=k)
        return cls(net=net, act_dim=act_dim, beta=beta)

    @property
    def k(self) -> int:
        return int(self.net.stack)

    def arrays(self) -> list[np.ndarray]:
        return self.net.arrays()

    def values(self, s: np.ndarray, a: np.ndarray) -> np.ndarray:
        if self.beta == 0.0:
            return np.zeros((np.atleast_2d(s).shape[0], self.k))
        return self.beta * stacked_values(self.net, s, a)

    def action_values(self, s: np.ndarray, actions: np.ndarray, paired: bool) -> tuple[np.ndarray, np.ndarray]:
        q, dq_da = stacked_action_values(self.net, s, actions, self.act_dim, paired)
        return self.beta * q, self.beta * dq_da


def bootdqnp_objective(
    values: np.ndarray,
    target_values: np.ndarray,
    prior_now: np.ndarray,
    prior_next: np.ndarray,
    r: np.ndarray,
    done: np.ndarray,
    mask: np.ndarray,
    gamma: float,
    loss_kind: str = "squared",
) -> tuple[float, np.ndarray]:
    """Masked per-member TD loss on prior-perturbed critics, scaled by 1/(nK)."""
    x = np.asarray(values, dtype=np.float64)
    n, k = x.shape
    b = np.asarray(mask, dtype=np.float64)
    if b.shape != x.shape or np.shape(target_values) != x.shape:
        raise ValueError(f"values {x.shape}, targets {np.shape(target_values)}, mask {b.shape} must agree")
    cont = gamma * (1.0 - np.asarray(done, dtype=np.float64).reshape(n))
    residual = (
        np.asarray(r, dtype=np.float64).reshape(n)[:, None]
        + cont[:, None] * (target_values + prior_next)
        - (x + prior_now)
    )
    penalty, dpen = td_penalty(residual, loss_kind)
    scale = 1.0 / (n * k)
    loss = float(scale * (b * penalty).sum())
    grad = -scale * b * dpen
    if not np.isfinite(loss):
        raise NumericFailure(f"non-finite prior-perturbed TD loss: {loss}")
    return loss, grad


def bootdqnp_loss_grad(
    ens: CriticEnsemble,
    prior: PriorFunction,
    batch: Minibatch,
    mask: BootstrapMask,
    next_actions: np.ndarray,
    loss_kind: str = "squared",
) -> tuple[float, MlpParams]:
    target_values = ensemble_values(ens, batch.s_next, next_actions, use_targets=True)
    values, cache = ensemble_forward(ens, batch.s, batch.a)
    loss, grad = bootdqnp_objective(
        values,
        target_values,
        prior.values(batch.s, batch.a),
        prior.values(batch.s_next, next_actions),
        batch.r,
        batch.done,
        mask.bits,
        ens.gamma,
        loss_kind,
    )
    return loss, ensemble_backward(cache, grad)
