from __future__ import annotations

from dataclasses import replace

from src.agent.log import TrainLog, write_run
from src.agent.loop import EvalResult, Learner, evaluate, run_training
from src.core.config import TrainConfig
from src.core.errors import ConfigError
from src.core.rng import RngStreams
from src.envs import make_env


def load_learner(cfg: TrainConfig, obs_dim: int, act_dim: int, streams: RngStreams) -> Learner:
    key = cfg.agent.lower()
    if key == "pbac":
        from src.agent.pbac import PbacLearner

        return PbacLearner(cfg, obs_dim, act_dim, streams)
    if key == "bootdqnp":
        from src.agent.bootdqnp import BootDqnpLearner

        return BootDqnpLearner(cfg, obs_dim, act_dim, streams)
    if key == "sac":
        from src.agent.sac import SacLearner

        return SacLearner(cfg, obs_dim, act_dim, streams)
    raise ConfigError(f"unknown agent: {cfg.agent}")


def train(cfg: TrainConfig, streams: RngStreams | None = None) -> tuple[TrainLog, Learner]:
    streams = streams or RngStreams(cfg.seed)
    env, eval_env = make_env(cfg.env), make_env(cfg.env)
    learner = load_learner(cfg, env.obs_dim, env.act_dim, streams)
    return run_training(cfg, learner, env, eval_env, streams), learner


def train_pbac(cfg: TrainConfig, streams: RngStreams | None = None) -> TrainLog:
    return train(replace(cfg, agent="pbac"), streams)[0]


def train_bootdqnp(cfg: TrainConfig, streams: RngStreams | None = None) -> TrainLog:
    return train(replace(cfg, agent="bootdqnp"), streams)[0]


def train_sac_baseline(cfg: TrainConfig, streams: RngStreams | None = None) -> TrainLog:
    return train(replace(cfg, agent="sac"), streams)[0]


__all__ = [
    "EvalResult",
    "Learner",
    "TrainLog",
    "evaluate",
    "load_learner",
    "run_training",
    "train",
    "train_bootdqnp",
    "train_pbac",
    "train_sac_baseline",
    "write_run",
]
