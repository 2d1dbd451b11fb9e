from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.numerics.mlp import MlpCache, MlpParams, init_mlp, mlp_backward, mlp_forward
from src.numerics.optim import polyak_update

HUBER_DELTA = 1.0


@dataclass
class CriticEnsemble:
    """K critics held as one stacked network; `target` is its Polyak-averaged copy."""

    net: MlpParams
    target: MlpParams
    act_dim: int = 1
    gamma: float = 0.99
    tau: float = 5e-3

    def __post_init__(self) -> None:
        if self.net.stack is None:
            raise ValueError("critic ensemble needs a stacked network")
        if [a.shape for a in self.net.arrays()] != [a.shape for a in self.target.arrays()]:
            raise ValueError("target network shapes differ from member shapes")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0,1), got {self.gamma}")

    @classmethod
    def create(
        cls,
        obs_dim: int,
        act_dim: int,
        k: int,
        hidden: int,
        rng: np.random.Generator,
        gamma: float = 0.99,
        tau: float = 5e-3,
    ) -> "CriticEnsemble":
        net = init_mlp([obs_dim + act_dim, hidden, hidden, 1], rng, stack=k)
        return cls(net=net, target=net.copy(), act_dim=act_dim, gamma=gamma, tau=tau)

    @property
    def k(self) -> int:
        return int(self.net.stack)

    def member_arrays(self) -> list[np.ndarray]:
        return self.net.arrays()

    def target_arrays(self) -> list[np.ndarray]:
        return self.target.arrays()

    def action_values(self, s: np.ndarray, actions: np.ndarray, paired: bool) -> tuple[np.ndarray, np.ndarray]:
        return stacked_action_values(self.net, s, actions, self.act_dim, paired)


def _joint_input(s: np.ndarray, a: np.ndarray, in_dim: int) -> np.ndarray:
    s = np.atleast_2d(np.asarray(s, dtype=np.float64))
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    if s.shape[0] != a.shape[0]:
        raise ValueError(f"state batch {s.shape} and action batch {a.shape} disagree")
    x = np.concatenate([s, a], axis=1)
    if x.shape[1] != in_dim:
        raise ValueError(f"critic expects {in_dim} inputs, got state {s.shape} + action {a.shape}")
    return x


def stacked_values(net: MlpParams, s: np.ndarray, a: np.ndarray) -> np.ndarray:
    """n x K values of every stacked network at the shared batch (s, a)."""
    out, _ = mlp_forward(net, _joint_input(s, a, net.in_dim))
    return out[..., 0].T


def stacked_action_values(
    net: MlpParams,
    s: np.ndarray,
    actions: np.ndarray,
    act_dim: int,
    paired: bool,
) -> tuple[np.ndarray, np.ndarray]:
    """Values and d value / d action for J x n x d_a candidate actions.

    paired=True scores candidate set j with network j and returns (J x n, J x n x d_a).
    paired=False scores every set with every network and returns (K x J x n, K x J x n x d_a).
    """
    s = np.atleast_2d(np.asarray(s, dtype=np.float64))
    actions = np.asarray(actions, dtype=np.float64)
    j, n, _ = actions.shape
    k = int(net.stack)
    if paired:
        if j > k:
            raise ValueError(f"{j} action sets but only {k} networks to pair them with")
        x = np.zeros((k, n, net.in_dim))
        x[:j, :, : s.shape[1]] = s
        x[:j, :, s.shape[1] :] = actions
        x[j:, :, : s.shape[1]] = s
        out, cache = mlp_forward(net, x)
        _, g_in = mlp_backward(cache, np.ones_like(out), param_grads=False)
        return out[:j, :, 0], g_in[:j, :, net.in_dim - act_dim :]
    x = _joint_input(np.tile(s, (j, 1)), actions.reshape(j * n, -1), net.in_dim)
    out, cache = mlp_forward(net, x)
    _, g_in = mlp_backward(cache, np.ones_like(out), param_grads=False)
    return out[..., 0].reshape(k, j, n), g_in[..., net.in_dim - act_dim :].reshape(k, j, n, act_dim)


def ensemble_values(ens: CriticEnsemble, s: np.ndarray, a: np.ndarray, use_targets: bool = False) -> np.ndarray:
    return stacked_values(ens.target if use_targets else ens.net, s, a)


def ensemble_forward(ens: CriticEnsemble, s: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, MlpCache]:
    out, cache = mlp_forward(ens.net, _joint_input(s, a, ens.net.in_dim))
    return out[..., 0].T, cache


def ensemble_backward(cache: MlpCache, grad_values: np.ndarray) -> MlpParams:
    """grad_values is n x K; column k is routed to member k only."""
    k = cache.params.stack
    if grad_values.shape[1] != k:
        raise ValueError(f"grad has {grad_values.shape[1]} columns for {k} members")
    grads, _ = mlp_backward(cache, np.ascontiguousarray(grad_values.T)[..., None])
    return grads


def update_targets(ens: CriticEnsemble) -> None:
    polyak_update(ens.target.arrays(), ens.net.arrays(), ens.tau)


def td_penalty(residual: np.ndarray, kind: str = "squared") -> tuple[np.ndarray, np.ndarray]:
    """Elementwise penalty of a TD residual and its derivative."""
    if kind == "squared":
        return residual * residual, 2.0 * residual
    if kind == "huber":
        absr = np.abs(residual)
        quad = absr <= HUBER_DELTA
        value = np.where(quad, 0.5 * residual * residual, HUBER_DELTA * (absr - 0.5 * HUBER_DELTA))
        return value, np.clip(residual, -HUBER_DELTA, HUBER_DELTA)
    raise ValueError(f"unknown TD loss kind: {kind}")
