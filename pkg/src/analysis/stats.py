from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

# differences spread less than this (relative) are treated as constant
DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class EvalCurve:
    steps: tuple[int, ...]
    returns: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.steps) != len(self.returns):
            raise ValueError(f"{len(self.steps)} steps but {len(self.returns)} returns")
        if any(b <= a for a, b in zip(self.steps, self.steps[1:])):
            raise ValueError("evaluation steps must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, float]]) -> "EvalCurve":
        return cls(steps=tuple(int(s) for s, _ in pairs), returns=tuple(float(r) for _, r in pairs))

    @property
    def final(self) -> float:
        if not self.returns:
            raise ValueError("empty evaluation curve")
        return self.returns[-1]


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    p_value: float
    degenerate: bool


def _as_array(values: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{what} of an empty list")
    return arr


def iqm(values: Sequence[float]) -> float:
    """Mean after dropping floor(n/4) values from each end."""
    return float(stats.trim_mean(_as_array(values, "iqm"), 0.25))


def quartiles(values: Sequence[float]) -> tuple[float, float]:
    q25, q75 = np.percentile(_as_array(values, "quartiles"), [25, 75], method="inverted_cdf")
    return float(q25), float(q75)


def aulc(curve: EvalCurve) -> float:
    return float(_as_array(curve.returns, "aulc").mean())


def paired_ttest_onesided(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """H1: mean(a - b) > 0."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError(f"paired t-test needs equal-length lists of >= 2 values, got {x.shape} and {y.shape}")
    diff = x - y
    tol = DEGENERATE_RTOL * max(1.0, float(np.abs(diff).max()))
    if np.ptp(diff) <= tol:
        mean = float(diff.mean())
        if abs(mean) <= tol:
            mean = 0.0
        t = float("nan") if mean == 0.0 else float(np.sign(mean) * np.inf)
        return TTestResult(t_stat=t, p_value=0.0 if mean > 0.0 else 1.0, degenerate=True)
    res = stats.ttest_rel(x, y, alternative="greater")
    return TTestResult(t_stat=float(res.statistic), p_value=float(res.pvalue), degenerate=False)
