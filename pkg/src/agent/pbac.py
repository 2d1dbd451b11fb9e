from __future__ import annotations

import numpy as np

from src.actor.entropy import EntropyTuner, alpha_update
from src.actor.loss import actor_loss_grad
from src.actor.network import ActorNet, sample_action
from src.agent.log import LossStats
from src.agent.loop import HeadPolicy, Learner, Policy, named
from src.analysis.bound import BoundDiagnostics, make_diagnostics
from src.core.config import TrainConfig
from src.core.rng import RngStreams
from src.critic.ensemble import CriticEnsemble, ensemble_values, update_targets
from src.critic.pbac_loss import PriorConfig, kl_from_values, pbac_loss_grad
from src.numerics.optim import OptimizerGroup
from src.replay.buffer import ReplayBuffer
from src.replay.masks import draw_mask


class PbacLearner(Learner):
    """Bootstrapped critic ensemble trained on the PAC-Bayes objective, multi-head soft actor."""

    name = "pbac"

    def __init__(self, cfg: TrainConfig, obs_dim: int, act_dim: int, streams: RngStreams):
        super().__init__(cfg, obs_dim, act_dim, streams)
        init = streams.init
        k = cfg.ensemble_size
        self.critic = CriticEnsemble.create(obs_dim, act_dim, k, cfg.hidden, init, gamma=cfg.gamma, tau=cfg.tau)
        self.actor = ActorNet.create(obs_dim, act_dim, k, cfg.hidden, init)
        self.tuner = EntropyTuner.for_action_dim(act_dim, init_alpha=cfg.init_alpha, lr=cfg.lr)
        self.prior = PriorConfig(sigma0_sq=cfg.sigma0_sq)
        self.critic_opt = OptimizerGroup(params=self.critic.member_arrays(), lr=cfg.lr)
        self.actor_opt = OptimizerGroup(params=self.actor.arrays(), lr=cfg.lr)
        self.last_mask_digest = ""

    @property
    def n_heads(self) -> int:
        return self.actor.k

    @property
    def alpha(self) -> float:
        return self.tuner.alpha

    def behavior_action(self, obs: np.ndarray, head: int) -> np.ndarray:
        return sample_action(self.actor, head, obs, self.streams.noise).action

    def eval_policy(self) -> Policy:
        return HeadPolicy(self.actor, self.streams.eval_heads)

    def update(self, buffer: ReplayBuffer, head: int) -> LossStats:
        cfg = self.cfg
        batch = buffer.sample(cfg.batch_size, self.streams.replay)
        mask = draw_mask(len(batch), self.critic.k, cfg.kappa, self.streams.masks)
        self.last_mask_digest = mask.digest()
        alpha = self.tuner.alpha

        self.phase = "critic"
        # targets use the acting head
        nxt = sample_action(self.actor, head, batch.s_next, self.streams.noise)
        breakdown, grads = pbac_loss_grad(
            self.critic, batch, mask, nxt.action, nxt.log_prob, alpha, self.prior, cfg.loss_terms
        )
        self.critic_opt.step(grads.arrays())

        self.phase = "actor"
        res = actor_loss_grad(self.actor, self.critic, batch.s, alpha, rng=self.streams.noise)
        self.actor_opt.step(res.arrays())

        self.phase = "alpha"
        alpha_update(self.tuner, res.log_probs)

        self.phase = "targets"
        update_targets(self.critic)
        return LossStats(breakdown.diversity, breakdown.coherence, breakdown.propagation)

    def bound_diagnostics(self, buffer: ReplayBuffer, head: int) -> BoundDiagnostics | None:
        cfg = self.cfg
        rng = self.streams.diag
        batch = buffer.sample(cfg.batch_size, rng)
        nxt = sample_action(self.actor, head, batch.s_next, rng)
        values = ensemble_values(self.critic, batch.s, batch.a)
        targets = ensemble_values(self.critic, batch.s_next, nxt.action, use_targets=True)
        cont = cfg.gamma * (1.0 - batch.done)
        y = batch.r[:, None] + cont[:, None] * (targets - self.tuner.alpha * nxt.log_prob[:, None])
        risk = float(np.mean((y - values) ** 2))
        kl = kl_from_values(values, targets, batch.r, batch.done, cfg.gamma, cfg.sigma0_sq)
        variance = float(values.var(axis=0).mean())
        return make_diagnostics(
            risk, kl, variance, cfg.gamma, n=len(buffer),
            nu=cfg.nu, lambda_bar=cfg.lambda_bar, delta=cfg.delta, reward_bound=cfg.reward_bound,
        )

    def named_arrays(self) -> dict[str, np.ndarray]:
        return {
            **named("critic", self.critic.member_arrays()),
            **named("critic_target", self.critic.target_arrays()),
            **named("actor", self.actor.arrays()),
            "log_alpha": np.array([self.tuner.log_alpha]),
        }

    def load(self, path) -> None:
        super().load(path)
        # log_alpha is held as a float, so the in-place copy above does not reach it
        with np.load(path) as saved:
            self.tuner.log_alpha = float(saved["log_alpha"][0])
