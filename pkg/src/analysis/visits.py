from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


@dataclass
class VisitRecorder:
    """Keeps (step, obs[dims[0]], obs[dims[1]]) at every `every`-th step and drops the rest."""

    every: int
    dims: tuple[int, int]
    rows: list[tuple[int, float, float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.every < 1:
            raise ValueError("visit interval must be >= 1")

    def observe(self, step: int, obs: np.ndarray) -> None:
        if step % self.every:
            return
        o = np.asarray(obs).reshape(-1)
        da, db = self.dims
        if max(da, db) >= o.size:
            raise ValueError(f"visit dims {self.dims} out of range for {o.size}-dim observations")
        self.rows.append((int(step), float(o[da]), float(o[db])))


def log_visits(obs_stream: Iterable[np.ndarray], every: int, dims: tuple[int, int]) -> list[tuple[int, float, float]]:
    """Steps count from 1."""
    recorder = VisitRecorder(every, dims)
    for step, obs in enumerate(obs_stream, start=1):
        recorder.observe(step, obs)
    return recorder.rows
