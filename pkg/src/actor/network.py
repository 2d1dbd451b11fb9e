from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.numerics.mlp import MlpCache, MlpParams, init_mlp, mlp_forward

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
TANH_EPS = 1e-6
ACTION_LIMIT = 1.0 - 1e-12
HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass
class ActorNet:
    """Shared trunk g(s) with K linear heads stacked in one network. Stochastic heads emit (mean, log_std)."""

    trunk: MlpParams
    heads: MlpParams
    act_dim: int
    stochastic: bool = True

    def __post_init__(self) -> None:
        width = 2 * self.act_dim if self.stochastic else self.act_dim
        if self.heads.stack is None:
            raise ValueError("actor heads must be a stacked network")
        if self.heads.in_dim != self.trunk.out_dim or self.heads.out_dim != width:
            raise ValueError(
                f"heads map {self.heads.in_dim}->{self.heads.out_dim}, expected {self.trunk.out_dim}->{width}"
            )

    @classmethod
    def create(
        cls,
        obs_dim: int,
        act_dim: int,
        k: int,
        hidden: int,
        rng: np.random.Generator,
        stochastic: bool = True,
    ) -> "ActorNet":
        trunk = init_mlp([obs_dim, hidden, hidden], rng, activate_output=True)
        width = 2 * act_dim if stochastic else act_dim
        heads = init_mlp([trunk.out_dim, width], rng, stack=k)
        return cls(trunk=trunk, heads=heads, act_dim=act_dim, stochastic=stochastic)

    @property
    def k(self) -> int:
        return int(self.heads.stack)

    def arrays(self) -> list[np.ndarray]:
        return [*self.trunk.arrays(), *self.heads.arrays()]


@dataclass(frozen=True)
class SquashedSample:
    action: np.ndarray
    log_prob: np.ndarray


@dataclass
class HeadOutput:
    mean: np.ndarray
    log_std: np.ndarray
    clipped: np.ndarray
    head_cache: MlpCache


def bounded_tanh(u: np.ndarray) -> np.ndarray:
    """tanh kept strictly inside (-1, 1) where float64 would round it to +-1."""
    return np.clip(np.tanh(u), -ACTION_LIMIT, ACTION_LIMIT)


def trunk_features(actor: ActorNet, s: np.ndarray) -> tuple[np.ndarray, MlpCache]:
    return mlp_forward(actor.trunk, np.atleast_2d(np.asarray(s, dtype=np.float64)))


def _split(actor: ActorNet, out: np.ndarray, cache: MlpCache) -> HeadOutput:
    if not actor.stochastic:
        return HeadOutput(mean=out, log_std=np.zeros_like(out), clipped=np.zeros(out.shape, dtype=bool), head_cache=cache)
    d = actor.act_dim
    raw = out[..., d:]
    clipped = (raw < LOG_STD_MIN) | (raw > LOG_STD_MAX)
    return HeadOutput(
        mean=out[..., :d], log_std=np.clip(raw, LOG_STD_MIN, LOG_STD_MAX), clipped=clipped, head_cache=cache
    )


def head_output(actor: ActorNet, k: int, features: np.ndarray) -> HeadOutput:
    if not 0 <= k < actor.k:
        raise IndexError(f"head {k} out of range for {actor.k} heads")
    out, cache = mlp_forward(actor.heads.member(k), features)
    return _split(actor, out, cache)


def all_head_outputs(actor: ActorNet, features: np.ndarray) -> HeadOutput:
    """Every head at once: arrays are K x n x d_a."""
    out, cache = mlp_forward(actor.heads, features)
    return _split(actor, out, cache)


def squash(mean: np.ndarray, log_std: np.ndarray, eps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """tanh-squashed reparameterized sample and its log-density."""
    u = mean + np.exp(log_std) * eps
    a = bounded_tanh(u)
    gauss = (-0.5 * eps * eps - log_std - HALF_LOG_2PI).sum(axis=-1)
    correction = np.log(1.0 - a * a + TANH_EPS).sum(axis=-1)
    return a, gauss - correction


def sample_action(
    actor: ActorNet,
    k: int,
    s: np.ndarray,
    rng: np.random.Generator | None = None,
    deterministic: bool = False,
) -> SquashedSample:
    single = np.asarray(s).ndim == 1
    feats, _ = trunk_features(actor, s)
    head = head_output(actor, k, feats)
    if not actor.stochastic:
        action, log_prob = bounded_tanh(head.mean), np.zeros(head.mean.shape[0])
    elif deterministic:
        action, log_prob = squash(head.mean, head.log_std, np.zeros_like(head.mean))
    else:
        if rng is None:
            raise ValueError("stochastic sampling needs an rng")
        action, log_prob = squash(head.mean, head.log_std, rng.standard_normal(head.mean.shape))
    if single:
        return SquashedSample(action=action[0], log_prob=log_prob[0])
    return SquashedSample(action=action, log_prob=log_prob)
