from src.core.errors import ConfigError
from src.envs.base import DelayedRewardConfig, Environment, StepResult
from src.envs.cartpole import CartpoleSwingup
from src.envs.mountaincar import MountainCarSparse
from src.envs.pointmass import PointMass

# CLI name -> pointmass reward tier (c, w_a, H)
POINTMASS_TIERS: dict[str, DelayedRewardConfig] = {
    "pointmass": DelayedRewardConfig(positional_delay_c=0.0, action_cost_w_a=0.5, health_reward_H=1.0),
    "pointmass-delayed": DelayedRewardConfig(positional_delay_c=1.0, action_cost_w_a=0.5, health_reward_H=0.0),
    "pointmass-very-delayed": DelayedRewardConfig(positional_delay_c=2.0, action_cost_w_a=0.5, health_reward_H=0.0),
}

ENV_NAMES: tuple[str, ...] = (*POINTMASS_TIERS, "cartpole-swingup-sparse", "mountaincar-sparse")


def make_env(name: str) -> Environment:
    key = name.strip().lower()
    if key in POINTMASS_TIERS:
        return PointMass(POINTMASS_TIERS[key], name=key)
    if key == "cartpole-swingup-sparse":
        return CartpoleSwingup()
    if key == "mountaincar-sparse":
        return MountainCarSparse()
    raise ConfigError(f"unknown env: {name}; choose from {list(ENV_NAMES)}")


__all__ = ["ENV_NAMES", "DelayedRewardConfig", "Environment", "StepResult", "make_env"]
