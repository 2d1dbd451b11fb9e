from __future__ import annotations

import numpy as np

# Fixed spawn order; append new names at the end only.
STREAM_NAMES: tuple[str, ...] = (
    "env",
    "eval_env",
    "init",
    "warmup",
    "replay",
    "masks",
    "noise",
    "heads",
    "eval_heads",
    "diag",
)


class RngStreams:
    def __init__(self, seed: int):
        self.seed = int(seed)
        children = np.random.SeedSequence(self.seed).spawn(len(STREAM_NAMES))
        self._streams = {name: np.random.default_rng(ss) for name, ss in zip(STREAM_NAMES, children)}

    def __getitem__(self, name: str) -> np.random.Generator:
        try:
            return self._streams[name]
        except KeyError:
            raise KeyError(f"unknown rng stream: {name}") from None

    def __getattr__(self, name: str) -> np.random.Generator:
        if name.startswith("_"):
            raise AttributeError(name)
        return self[name]
