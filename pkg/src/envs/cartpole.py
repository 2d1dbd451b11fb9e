from __future__ import annotations

import math

import numpy as np

from src.envs.base import Environment, StepResult, clip_action

GRAVITY = 9.8
MASS_CART = 1.0
MASS_POLE = 0.1
TOTAL_MASS = MASS_CART + MASS_POLE
HALF_LENGTH = 0.5
POLE_MASS_LENGTH = MASS_POLE * HALF_LENGTH
FORCE_SCALE = 10.0
DT = 0.02
X_LIMIT = 2.4
EPISODE_LIMIT = 1000
SUCCESS_X = 0.25
SUCCESS_COS = 0.995


def swingup_success(x: float, theta: float) -> bool:
    return abs(x) < SUCCESS_X and math.cos(theta) > SUCCESS_COS


def cartpole_swingup_step(
    state: tuple[float, float, float, float],
    action: np.ndarray | float,
) -> tuple[tuple[float, float, float, float], StepResult]:
    """theta = 0 is upright; reward is the sparse upright-and-centred indicator."""
    x, x_dot, theta, theta_dot = (float(s) for s in state)
    force = FORCE_SCALE * float(clip_action(action, 1)[0])
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    temp = (force + POLE_MASS_LENGTH * theta_dot * theta_dot * sin_t) / TOTAL_MASS
    theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
        HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos_t * cos_t / TOTAL_MASS)
    )
    x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS

    x = x + DT * x_dot
    x_dot = x_dot + DT * x_acc
    theta = theta + DT * theta_dot
    theta_dot = theta_dot + DT * theta_acc
    if abs(x) > X_LIMIT:
        # sticky wall
        x = math.copysign(X_LIMIT, x)
        x_dot = 0.0

    reward = 1.0 if swingup_success(x, theta) else 0.0
    new_state = (x, x_dot, theta, theta_dot)
    return new_state, StepResult(next_obs=_observation(new_state), reward=reward, done=False, truncated=False)


def _observation(state: tuple[float, float, float, float]) -> np.ndarray:
    x, x_dot, theta, theta_dot = state
    return np.array([x, x_dot, math.cos(theta), math.sin(theta), theta_dot], dtype=np.float64)


class CartpoleSwingup(Environment):
    name = "cartpole-swingup-sparse"
    obs_dim = 5
    act_dim = 1
    max_steps = EPISODE_LIMIT

    def __init__(self) -> None:
        super().__init__()
        self.state = (0.0, 0.0, math.pi, 0.0)

    def _reset_state(self, rng: np.random.Generator) -> None:
        self.state = (0.0, 0.0, math.pi + float(rng.uniform(-0.01, 0.01)), 0.0)

    def _advance(self, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        self.state, res = cartpole_swingup_step(self.state, action)
        return res.next_obs, res.reward, False

    def observe(self) -> np.ndarray:
        return _observation(self.state)

    def obs_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        inf = np.inf
        return np.array([-X_LIMIT, -inf, -1.0, -1.0, -inf]), np.array([X_LIMIT, inf, 1.0, 1.0, inf])
