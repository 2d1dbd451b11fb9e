from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.core.errors import NumericFailure


@dataclass
class AdamState:
    first_moment: list[np.ndarray]
    second_moment: list[np.ndarray]
    step_count: int = 0
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: Sequence[np.ndarray], lr: float = 3e-4, **kwargs: float) -> "AdamState":
        return cls(
            first_moment=[np.zeros_like(p) for p in params],
            second_moment=[np.zeros_like(p) for p in params],
            lr=lr,
            **kwargs,
        )

    def arrays(self) -> list[np.ndarray]:
        return [*self.first_moment, *self.second_moment]


def adam_step(params: Sequence[np.ndarray], grads: Sequence[np.ndarray], state: AdamState) -> None:
    """Bias-corrected Adam, applied in place. Non-finite grads leave everything untouched."""
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise ValueError(f"adam_step: {len(params)} params, {len(grads)} grads, {len(state.first_moment)} moments")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ValueError(f"adam_step: param {p.shape} vs grad {g.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericFailure("non-finite gradient rejected by adam_step")

    state.step_count += 1
    t = state.step_count
    c1 = 1.0 - state.beta1**t
    c2 = 1.0 - state.beta2**t
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


def polyak_update(target: Sequence[np.ndarray], online: Sequence[np.ndarray], tau: float) -> None:
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0,1], got {tau}")
    for t, o in zip(target, online, strict=True):
        if t.shape != o.shape:
            raise ValueError(f"polyak_update: target {t.shape} vs online {o.shape}")
        if tau == 1.0:
            t[...] = o
        elif tau > 0.0:
            t *= 1.0 - tau
            t += tau * o


@dataclass
class OptimizerGroup:
    """One Adam state over a flat list of parameter arrays."""

    params: list[np.ndarray]
    state: AdamState = field(init=False)
    lr: float = 3e-4

    def __post_init__(self) -> None:
        self.state = AdamState.zeros_like(self.params, lr=self.lr)

    def step(self, grads: Sequence[np.ndarray]) -> None:
        adam_step(self.params, grads, self.state)
