from __future__ import annotations

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from src.actor.network import ActorNet, sample_action
from src.actor.selector import BehaviorSelector, select_head
from src.agent.log import EvalRecord, LossStats, TrainLog, TrainRecord
from src.analysis.bound import BoundDiagnostics
from src.analysis.visits import VisitRecorder
from src.core.config import TrainConfig
from src.core.errors import NumericFailure
from src.core.logger import get_logger
from src.core.rng import RngStreams
from src.envs.base import Environment
from src.replay.buffer import ReplayBuffer, Transition

logger = get_logger(__name__)


class Policy(Protocol):
    def start_episode(self) -> None: ...

    def act(self, obs: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class EvalResult:
    mean: float
    returns: tuple[float, ...]


class HeadPolicy:
    """Deterministic tanh(mean) of one head, redrawn uniformly at every episode start."""

    def __init__(self, actor: ActorNet, rng: np.random.Generator):
        self.actor = actor
        self.rng = rng
        self.head = 0

    def start_episode(self) -> None:
        self.head = int(self.rng.integers(self.actor.k))

    def act(self, obs: np.ndarray) -> np.ndarray:
        return sample_action(self.actor, self.head, obs, deterministic=True).action


def evaluate(policy: Policy, env: Environment, episodes: int, rng: np.random.Generator) -> EvalResult:
    if episodes < 1:
        raise ValueError("evaluate needs episodes >= 1")
    returns: list[float] = []
    for _ in range(episodes):
        policy.start_episode()
        obs = env.reset(rng)
        total = 0.0
        while True:
            res = env.step(policy.act(obs))
            total += res.reward
            if res.done or res.truncated:
                break
            obs = res.next_obs
        returns.append(total)
    return EvalResult(mean=float(np.mean(returns)), returns=tuple(returns))


class Learner(ABC):
    name: str = ""

    def __init__(self, cfg: TrainConfig, obs_dim: int, act_dim: int, streams: RngStreams):
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.streams = streams
        self.phase = "init"

    @property
    @abstractmethod
    def n_heads(self) -> int:
        raise NotImplementedError

    @property
    def alpha(self) -> float:
        return float("nan")

    @abstractmethod
    def behavior_action(self, obs: np.ndarray, head: int) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def eval_policy(self) -> Policy:
        raise NotImplementedError

    @abstractmethod
    def update(self, buffer: ReplayBuffer, head: int) -> LossStats:
        """One gradient phase."""
        raise NotImplementedError

    @abstractmethod
    def named_arrays(self) -> dict[str, np.ndarray]:
        """Every parameter array (online, target and frozen) under a stable name."""
        raise NotImplementedError

    def bound_diagnostics(self, buffer: ReplayBuffer, head: int) -> BoundDiagnostics | None:
        return None

    def save(self, path: str | Path) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        np.savez(p, **self.named_arrays())
        return p

    def load(self, path: str | Path) -> None:
        arrays = self.named_arrays()
        with np.load(Path(path)) as saved:
            missing = sorted(set(arrays) - set(saved.files))
            if missing:
                raise ValueError(f"{path}: missing arrays {missing[:3]}")
            for name, target in arrays.items():
                if saved[name].shape != target.shape:
                    raise ValueError(f"{path}: {name} has shape {saved[name].shape}, expected {target.shape}")
                target[...] = saved[name]


def named(prefix: str, arrays: list[np.ndarray]) -> dict[str, np.ndarray]:
    return {f"{prefix}.{i:03d}": a for i, a in enumerate(arrays)}


def run_training(
    cfg: TrainConfig,
    learner: Learner,
    env: Environment,
    eval_env: Environment,
    streams: RngStreams,
) -> TrainLog:
    log = TrainLog()
    buffer = ReplayBuffer(cfg.buffer_size, env.obs_dim, env.act_dim)
    selector = BehaviorSelector(k=learner.n_heads, psr=cfg.psr)
    policy = learner.eval_policy()
    every = cfg.eval_interval
    visits = VisitRecorder(cfg.visit_every, cfg.visit_dims)
    last_return = float("nan")
    started = time.perf_counter()

    obs = env.reset(streams.env)
    episode_return = 0.0
    step = 0
    try:
        for step in range(1, cfg.total_steps + 1):
            learner.phase = "act"
            head = select_head(selector, streams.heads)
            visits.observe(step, obs)
            if step <= cfg.warmup_steps:
                action = streams.warmup.uniform(-1.0, 1.0, size=env.act_dim)
            else:
                action = learner.behavior_action(obs, head)
            res = env.step(action)
            buffer.push(Transition(s=obs, a=action, r=res.reward, s_next=res.next_obs, done=res.done))
            episode_return += res.reward

            stats = LossStats()
            if step > cfg.warmup_steps:
                for _ in range(cfg.replay_ratio):
                    stats = learner.update(buffer, head)
                    log.gradient_phases += 1

            finished = float("nan")
            if res.done or res.truncated:
                finished = last_return = episode_return
                episode_return = 0.0
                obs = env.reset(streams.env)
            else:
                obs = res.next_obs
            log.append_train(TrainRecord(step, finished, stats, learner.alpha, head))

            if step % every == 0 or step == cfg.total_steps:
                learner.phase = "eval"
                result = evaluate(policy, eval_env, cfg.eval_episodes, streams.eval_env)
                log.append_eval(EvalRecord(step, result.mean, result.returns))
                diag = learner.bound_diagnostics(buffer, head)
                if diag is not None:
                    log.bounds.append((step, diag))
                logger.info("step=%d eval_return=%.4f", step, result.mean)

            if step % cfg.log_every == 0:
                logger.info(
                    "step=%d last_return=%.4f alpha=%.4g diversity=%.4g coherence=%.4g propagation=%.4g",
                    step, last_return, learner.alpha, stats.diversity, stats.coherence, stats.propagation,
                )
    except NumericFailure as exc:
        log.failure = {"step": step, "phase": learner.phase, "message": str(exc)}
        logger.error("numeric failure at step %d during %s: %s", step, learner.phase, exc)

    log.visits = visits.rows
    log.buffer_size = len(buffer)
    log.wall_seconds = time.perf_counter() - started
    logger.info(
        "%s on %s finished: %d steps, %d gradient phases, %.1fs wall",
        learner.name, env.name, step, log.gradient_phases, log.wall_seconds,
    )
    return log
