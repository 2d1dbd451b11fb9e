from __future__ import annotations

import numpy as np

from src.core.errors import NumericFailure
from src.critic.ensemble import CriticEnsemble, ensemble_backward, ensemble_forward, ensemble_values, td_penalty
from src.numerics.mlp import MlpParams
from src.replay.buffer import Minibatch


def min_target(
    target_values: np.ndarray,
    r: np.ndarray,
    done: np.ndarray,
    next_logprobs: np.ndarray,
    alpha: float,
    gamma: float,
) -> np.ndarray:
    n = target_values.shape[0]
    cont = gamma * (1.0 - np.asarray(done, dtype=np.float64).reshape(n))
    soft = alpha * np.asarray(next_logprobs, dtype=np.float64).reshape(n)
    return np.asarray(r, dtype=np.float64).reshape(n) + cont * (target_values.min(axis=1) - soft)


def min_target_objective(
    values: np.ndarray,
    target_values: np.ndarray,
    r: np.ndarray,
    done: np.ndarray,
    next_logprobs: np.ndarray,
    alpha: float,
    gamma: float,
    loss_kind: str = "squared",
) -> tuple[float, np.ndarray]:
    x = np.asarray(values, dtype=np.float64)
    n, k = x.shape
    y = min_target(np.asarray(target_values, dtype=np.float64), r, done, next_logprobs, alpha, gamma)
    penalty, dpen = td_penalty(y[:, None] - x, loss_kind)
    scale = 1.0 / (n * k)
    loss = float(scale * penalty.sum())
    if not np.isfinite(loss):
        raise NumericFailure(f"non-finite soft TD loss: {loss}")
    return loss, -scale * dpen


def min_target_loss_grad(
    ens: CriticEnsemble,
    batch: Minibatch,
    next_actions: np.ndarray,
    next_logprobs: np.ndarray,
    alpha: float,
    loss_kind: str = "squared",
) -> tuple[float, MlpParams]:
    target_values = ensemble_values(ens, batch.s_next, next_actions, use_targets=True)
    values, cache = ensemble_forward(ens, batch.s, batch.a)
    loss, grad = min_target_objective(
        values, target_values, batch.r, batch.done, next_logprobs, alpha, ens.gamma, loss_kind
    )
    return loss, ensemble_backward(cache, grad)
