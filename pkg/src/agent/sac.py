from __future__ import annotations

import numpy as np

from src.actor.entropy import EntropyTuner, alpha_update
from src.actor.loss import actor_loss_grad
from src.actor.network import ActorNet, sample_action
from src.agent.log import LossStats
from src.agent.loop import HeadPolicy, Learner, Policy, named
from src.core.config import TrainConfig
from src.core.rng import RngStreams
from src.critic.ensemble import CriticEnsemble, update_targets
from src.critic.soft_td import min_target_loss_grad
from src.numerics.optim import OptimizerGroup
from src.replay.buffer import ReplayBuffer

N_CRITICS = 2


class SacLearner(Learner):
    """Undirected soft actor-critic control: twin critics, min target, one stochastic head."""

    name = "sac"

    def __init__(self, cfg: TrainConfig, obs_dim: int, act_dim: int, streams: RngStreams):
        super().__init__(cfg, obs_dim, act_dim, streams)
        init = streams.init
        self.critic = CriticEnsemble.create(obs_dim, act_dim, N_CRITICS, cfg.hidden, init, gamma=cfg.gamma, tau=cfg.tau)
        self.actor = ActorNet.create(obs_dim, act_dim, 1, cfg.hidden, init)
        self.tuner = EntropyTuner.for_action_dim(act_dim, init_alpha=cfg.init_alpha, lr=cfg.lr)
        self.critic_opt = OptimizerGroup(params=self.critic.member_arrays(), lr=cfg.lr)
        self.actor_opt = OptimizerGroup(params=self.actor.arrays(), lr=cfg.lr)

    @property
    def n_heads(self) -> int:
        return 1

    @property
    def alpha(self) -> float:
        return self.tuner.alpha

    def behavior_action(self, obs: np.ndarray, head: int) -> np.ndarray:
        return sample_action(self.actor, 0, obs, self.streams.noise).action

    def eval_policy(self) -> Policy:
        return HeadPolicy(self.actor, self.streams.eval_heads)

    def update(self, buffer: ReplayBuffer, head: int) -> LossStats:
        cfg = self.cfg
        batch = buffer.sample(cfg.batch_size, self.streams.replay)
        alpha = self.tuner.alpha

        self.phase = "critic"
        nxt = sample_action(self.actor, 0, batch.s_next, self.streams.noise)
        loss, grads = min_target_loss_grad(self.critic, batch, nxt.action, nxt.log_prob, alpha, cfg.baseline_loss)
        self.critic_opt.step(grads.arrays())

        self.phase = "actor"
        res = actor_loss_grad(self.actor, self.critic, batch.s, alpha, rng=self.streams.noise, reduce="min")
        self.actor_opt.step(res.arrays())

        self.phase = "alpha"
        alpha_update(self.tuner, res.log_probs)

        self.phase = "targets"
        update_targets(self.critic)
        return LossStats(diversity=loss)

    def named_arrays(self) -> dict[str, np.ndarray]:
        return {
            **named("critic", self.critic.member_arrays()),
            **named("critic_target", self.critic.target_arrays()),
            **named("actor", self.actor.arrays()),
            "log_alpha": np.array([self.tuner.log_alpha]),
        }

    def load(self, path) -> None:
        super().load(path)
        with np.load(path) as saved:
            self.tuner.log_alpha = float(saved["log_alpha"][0])
