from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BootstrapMask:
    bits: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape  # type: ignore[return-value]

    def digest(self) -> str:
        return hashlib.sha256(np.packbits(self.bits).tobytes()).hexdigest()


def draw_mask(n: int, k: int, kappa: float, rng: np.random.Generator) -> BootstrapMask:
    """Bernoulli(1 - kappa) keep-bits for every (datapoint, member) pair."""
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0,1), got {kappa}")
    bits = rng.random((int(n), int(k))) >= kappa
    return BootstrapMask(bits=bits)
