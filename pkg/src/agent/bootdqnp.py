from __future__ import annotations

import numpy as np

from src.actor.loss import actor_loss_grad
from src.actor.network import ActorNet, sample_action
from src.agent.log import LossStats
from src.agent.loop import HeadPolicy, Learner, Policy, named
from src.core.config import TrainConfig
from src.core.rng import RngStreams
from src.critic.bootdqn import PriorFunction, bootdqnp_loss_grad
from src.critic.ensemble import CriticEnsemble, update_targets
from src.numerics.optim import OptimizerGroup
from src.replay.buffer import ReplayBuffer
from src.replay.masks import draw_mask


class BootDqnpLearner(Learner):
    """Bootstrapped ensemble with frozen randomized priors and deterministic tanh heads."""

    name = "bootdqnp"

    def __init__(self, cfg: TrainConfig, obs_dim: int, act_dim: int, streams: RngStreams):
        super().__init__(cfg, obs_dim, act_dim, streams)
        init = streams.init
        k = cfg.ensemble_size
        self.critic = CriticEnsemble.create(obs_dim, act_dim, k, cfg.hidden, init, gamma=cfg.gamma, tau=cfg.tau)
        self.priors = PriorFunction.create(obs_dim, act_dim, k, cfg.hidden, init, beta=cfg.prior_scale)
        self.actor = ActorNet.create(obs_dim, act_dim, k, cfg.hidden, init, stochastic=False)
        self.critic_opt = OptimizerGroup(params=self.critic.member_arrays(), lr=cfg.lr)
        self.actor_opt = OptimizerGroup(params=self.actor.arrays(), lr=cfg.lr)
        self.last_mask_digest = ""

    @property
    def n_heads(self) -> int:
        return self.actor.k

    def behavior_action(self, obs: np.ndarray, head: int) -> np.ndarray:
        return sample_action(self.actor, head, obs).action

    def eval_policy(self) -> Policy:
        return HeadPolicy(self.actor, self.streams.eval_heads)

    def update(self, buffer: ReplayBuffer, head: int) -> LossStats:
        cfg = self.cfg
        batch = buffer.sample(cfg.batch_size, self.streams.replay)
        mask = draw_mask(len(batch), self.critic.k, cfg.kappa, self.streams.masks)
        self.last_mask_digest = mask.digest()

        self.phase = "critic"
        nxt = sample_action(self.actor, head, batch.s_next)
        loss, grads = bootdqnp_loss_grad(self.critic, self.priors, batch, mask, nxt.action, cfg.baseline_loss)
        self.critic_opt.step(grads.arrays())

        self.phase = "actor"
        res = actor_loss_grad(self.actor, self.critic, batch.s, 0.0, priors=self.priors)
        self.actor_opt.step(res.arrays())

        self.phase = "targets"
        update_targets(self.critic)
        return LossStats(diversity=loss)

    def named_arrays(self) -> dict[str, np.ndarray]:
        return {
            **named("critic", self.critic.member_arrays()),
            **named("critic_target", self.critic.target_arrays()),
            **named("prior", self.priors.arrays()),
            **named("actor", self.actor.arrays()),
        }
