from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from src.actor.network import TANH_EPS, ActorNet, all_head_outputs, bounded_tanh, squash, trunk_features
from src.core.errors import NumericFailure
from src.critic.bootdqn import PriorFunction
from src.numerics.mlp import MlpParams, mlp_backward

REDUCTIONS: tuple[str, ...] = ("paired", "min")


class ActionCritic(Protocol):
    k: int

    def action_values(self, s: np.ndarray, actions: np.ndarray, paired: bool) -> tuple[np.ndarray, np.ndarray]: ...


@dataclass
class ActorLossResult:
    loss: float
    trunk_grad: MlpParams
    head_grad: MlpParams  # stacked like ActorNet.heads
    log_probs: np.ndarray  # heads used x n

    def arrays(self) -> list[np.ndarray]:
        return [*self.trunk_grad.arrays(), *self.head_grad.arrays()]


def _critic_value_and_action_grad(
    critic: ActionCritic,
    s: np.ndarray,
    actions: np.ndarray,
    reduce: str,
    priors: PriorFunction | None,
) -> tuple[np.ndarray, np.ndarray]:
    """K_heads x n values and K_heads x n x d_a action grads of the scoring critic."""
    paired = reduce == "paired"
    q, dq_da = critic.action_values(s, actions, paired)
    if priors is not None and priors.beta != 0.0:
        p, dp_da = priors.action_values(s, actions, paired)
        q, dq_da = q + p, dq_da + dp_da
    if paired:
        return q, dq_da
    pick = q.argmin(axis=0)
    return (
        np.take_along_axis(q, pick[None], axis=0)[0],
        np.take_along_axis(dq_da, pick[None, ..., None], axis=0)[0],
    )


def actor_loss_grad(
    actor: ActorNet,
    critic: ActionCritic,
    s: np.ndarray,
    alpha: float,
    rng: np.random.Generator | None = None,
    noise: np.ndarray | None = None,
    reduce: str = "paired",
    priors: PriorFunction | None = None,
    heads: Sequence[int] | None = None,
) -> ActorLossResult:
    """-(1/(n K)) sum_{i,k} (X(s_i, a_ik) - alpha log pi_k(a_ik|s_i)) and its actor gradients.

    reduce="paired": head k is scored by critic member k.
    reduce="min": every head is scored by the minimum over all critic members.
    """
    if reduce not in REDUCTIONS:
        raise ValueError(f"reduce must be one of {REDUCTIONS}")
    s = np.atleast_2d(np.asarray(s, dtype=np.float64))
    n, d, k = s.shape[0], actor.act_dim, actor.k
    used = list(range(k)) if heads is None else list(heads)
    if reduce == "paired" and k > critic.k:
        raise ValueError(f"paired reduction needs a critic per head ({k} heads, {critic.k} critics)")
    if noise is None and actor.stochastic:
        if rng is None:
            raise ValueError("actor_loss_grad needs an rng or explicit noise")
        noise = rng.standard_normal((len(used), n, d))
    scale = 1.0 / (n * len(used))
    weight = np.zeros(k)
    weight[used] = 1.0
    w = weight[:, None, None]

    feats, trunk_cache = trunk_features(actor, s)
    head = all_head_outputs(actor, feats)
    eps = np.zeros((k, n, d))
    if actor.stochastic:
        eps[used] = noise
        a, logp = squash(head.mean, head.log_std, eps)
    else:
        a, logp = bounded_tanh(head.mean), np.zeros((k, n))
    q, dq_da = _critic_value_and_action_grad(critic, s, a, reduce, priors)
    total = float(-(weight[:, None] * (q - alpha * logp)).sum()) * scale

    g_a = -scale * w * dq_da
    one_minus = 1.0 - a * a
    if actor.stochastic:
        g_logp = alpha * scale * w
        g_u = g_a * one_minus + g_logp * 2.0 * a * one_minus / (one_minus + TANH_EPS)
        g_logstd = np.where(head.clipped, 0.0, g_u * np.exp(head.log_std) * eps - g_logp)
        g_out = np.concatenate([g_u, g_logstd], axis=-1)
    else:
        g_out = g_a * one_minus
    head_grad, g_feats = mlp_backward(head.head_cache, g_out)
    trunk_grad, _ = mlp_backward(trunk_cache, g_feats.sum(axis=0))
    if not np.isfinite(total):
        raise NumericFailure(f"non-finite actor loss: {total}")
    return ActorLossResult(loss=total, trunk_grad=trunk_grad, head_grad=head_grad, log_probs=logp[used])


def actor_loss(
    actor: ActorNet,
    critic: ActionCritic,
    s: np.ndarray,
    alpha: float,
    rng: np.random.Generator | None = None,
    **kwargs,
) -> float:
    return actor_loss_grad(actor, critic, s, alpha, rng=rng, **kwargs).loss
