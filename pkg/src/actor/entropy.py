from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.core.errors import NumericFailure


@dataclass
class EntropyTuner:
    log_alpha: float
    target_entropy: float
    lr: float = 3e-4

    @classmethod
    def for_action_dim(cls, act_dim: int, init_alpha: float = 1.0, lr: float = 3e-4) -> "EntropyTuner":
        return cls(log_alpha=math.log(init_alpha), target_entropy=-float(act_dim), lr=lr)

    @property
    def alpha(self) -> float:
        return math.exp(self.log_alpha)


def alpha_gradient(tuner: EntropyTuner, batch_logprobs: np.ndarray) -> float:
    return -tuner.alpha * float(np.mean(np.asarray(batch_logprobs) + tuner.target_entropy))


def alpha_update(tuner: EntropyTuner, batch_logprobs: np.ndarray) -> EntropyTuner:
    """One descent step on J = -exp(log_alpha) * mean(log_prob + target_entropy)."""
    grad = alpha_gradient(tuner, batch_logprobs)
    if not math.isfinite(grad):
        raise NumericFailure(f"non-finite temperature gradient: {grad}")
    tuner.log_alpha -= tuner.lr * grad
    return tuner
