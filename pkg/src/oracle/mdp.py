from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ROW_TOL = 1e-12


@dataclass(frozen=True)
class FiniteMdp:
    """Policy-induced chain: P[s, s'] transition matrix, r[s] reward, discount gamma."""

    P: np.ndarray
    r: np.ndarray
    gamma: float

    def __post_init__(self) -> None:
        P = np.asarray(self.P, dtype=np.float64)
        r = np.asarray(self.r, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "r", r)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] != r.size:
            raise ValueError(f"P {P.shape} and r {r.shape} do not describe one chain")
        if (P < 0).any() or np.abs(P.sum(axis=1) - 1.0).max() > ROW_TOL:
            raise ValueError("P must be row-stochastic")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0,1), got {self.gamma}")

    @property
    def n_states(self) -> int:
        return int(self.r.size)


def _normalized_rows(raw: np.ndarray) -> np.ndarray:
    return raw / raw.sum(axis=1, keepdims=True)


def random_mdp(rng: np.random.Generator, n_states: int, gamma: float) -> FiniteMdp:
    P = _normalized_rows(rng.dirichlet(np.ones(n_states), size=n_states))
    return FiniteMdp(P=P, r=rng.uniform(0.0, 1.0, size=n_states), gamma=gamma)


def identical_rows_mdp(rng: np.random.Generator, n_states: int, gamma: float) -> FiniteMdp:
    """Next state drawn i.i.d. from one distribution regardless of the current state."""
    row = rng.dirichlet(np.ones(n_states))
    P = _normalized_rows(np.tile(row, (n_states, 1)))
    return FiniteMdp(P=P, r=rng.uniform(0.0, 1.0, size=n_states), gamma=gamma)


def swap_chain(gamma: float, r: tuple[float, float] = (0.0, 1.0)) -> FiniteMdp:
    return FiniteMdp(P=np.array([[0.0, 1.0], [1.0, 0.0]]), r=np.array(r, dtype=np.float64), gamma=gamma)


def stationary_dist(m: FiniteMdp, tol: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    """Left fixed point of P by power iteration from the uniform distribution."""
    p = np.full(m.n_states, 1.0 / m.n_states)
    for _ in range(max_iter):
        nxt = p @ m.P
        nxt /= nxt.sum()
        if np.abs(nxt - p).max() < tol:
            return nxt
        p = nxt
    raise RuntimeError(f"stationary distribution did not converge in {max_iter} iterations")


def q_pi_exact(m: FiniteMdp) -> np.ndarray:
    return np.linalg.solve(np.eye(m.n_states) - m.gamma * m.P, m.r)


def bellman(m: FiniteMdp, x: np.ndarray) -> np.ndarray:
    return m.r + m.gamma * (m.P @ np.asarray(x, dtype=np.float64))


def weighted_sq_norm(v: np.ndarray, d: np.ndarray) -> float:
    return float(np.dot(d, np.asarray(v, dtype=np.float64) ** 2))


def conditional_variance(m: FiniteMdp, x: np.ndarray) -> np.ndarray:
    """Var_{s' ~ P(.|s)}[x(s')] for every s."""
    x = np.asarray(x, dtype=np.float64)
    mean = m.P @ x
    return np.maximum(m.P @ (x * x) - mean * mean, 0.0)
