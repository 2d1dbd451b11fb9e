from __future__ import annotations

import numpy as np

from src.envs.base import DelayedRewardConfig, Environment, StepResult, clip_action

DT = 0.1
INIT_NOISE = 0.01


def pointmass_step(
    state: tuple[float, float],
    action: np.ndarray | float,
    cfg: DelayedRewardConfig,
) -> tuple[tuple[float, float], StepResult]:
    """Delayed forward reward: velocity pays only once the post-step position passes c."""
    x, v = float(state[0]), float(state[1])
    a = float(clip_action(action, 1)[0])
    v_next = min(1.0, max(-1.0, v + DT * a))
    x_next = x + DT * v_next
    forward = v_next if x_next > cfg.positional_delay_c else 0.0
    reward = forward - cfg.action_cost_w_a * a * a + cfg.health_reward_H
    obs = np.array([x_next, v_next], dtype=np.float64)
    return (x_next, v_next), StepResult(next_obs=obs, reward=reward, done=False, truncated=False)


class PointMass(Environment):
    obs_dim = 2
    act_dim = 1

    def __init__(self, cfg: DelayedRewardConfig, name: str = "pointmass"):
        super().__init__()
        self.cfg = cfg
        self.name = name
        self.max_steps = cfg.episode_limit
        self.state = (0.0, 0.0)

    def _reset_state(self, rng: np.random.Generator) -> None:
        x, v = rng.uniform(-INIT_NOISE, INIT_NOISE, size=2)
        self.state = (float(x), float(v))

    def _advance(self, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        self.state, res = pointmass_step(self.state, action, self.cfg)
        return res.next_obs, res.reward, False

    def observe(self) -> np.ndarray:
        return np.array(self.state, dtype=np.float64)

    def obs_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        reach = INIT_NOISE + DT * self.cfg.episode_limit
        return np.array([-reach, -1.0]), np.array([reach, 1.0])
