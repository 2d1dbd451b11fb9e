from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class BehaviorSelector:
    k: int
    psr: int = 5
    active_head: int = 0
    step_counter: int = 0

    def __post_init__(self) -> None:
        if self.k < 1 or self.psr < 1:
            raise ValueError(f"need k >= 1 and psr >= 1, got k={self.k} psr={self.psr}")


def select_head(selector: BehaviorSelector, rng: np.random.Generator) -> int:
    """Posterior sampling: redraw the acting head at the start of every psr-step window."""
    if selector.step_counter % selector.psr == 0:
        selector.active_head = int(rng.integers(selector.k))
    selector.step_counter += 1
    return selector.active_head
