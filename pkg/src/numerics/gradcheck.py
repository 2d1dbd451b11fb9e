from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def central_difference(
    loss_fn: Callable[[], float],
    arrays: Sequence[np.ndarray],
    h: float = 1e-5,
) -> list[np.ndarray]:
    """Numerical gradient of loss_fn w.r.t. every entry of arrays (perturbed in place, restored)."""
    out: list[np.ndarray] = []
    for a in arrays:
        g = np.zeros_like(a)
        flat = a.reshape(-1)
        g_flat = g.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            up = loss_fn()
            flat[j] = orig - h
            down = loss_fn()
            flat[j] = orig
            g_flat[j] = (up - down) / (2.0 * h)
        out.append(g)
    return out


def relative_error(analytic: Sequence[np.ndarray], numeric: Sequence[np.ndarray], floor: float = 1e-8) -> float:
    """||a - n|| / max(||a||, ||n||, floor) over all arrays flattened into one vector."""
    pairs = list(zip(analytic, numeric, strict=True))
    if not pairs:
        return 0.0
    a = np.concatenate([np.ravel(x) for x, _ in pairs])
    n = np.concatenate([np.ravel(y) for _, y in pairs])
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(n)), floor)
    return float(np.linalg.norm(a - n)) / scale
