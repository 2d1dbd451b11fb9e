import math
from dataclasses import replace

import numpy as np
import pytest

from src.agent import (
    evaluate,
    load_learner,
    run_training,
    train,
    train_bootdqnp,
    train_pbac,
    train_sac_baseline,
    write_run,
)
from src.agent.log import EvalRecord, TrainLog
from src.analysis import csv_io
from src.core.config import TrainConfig
from src.core.errors import ConfigError, NumericFailure
from src.core.rng import RngStreams
from src.envs import make_env
from src.envs.base import Environment
from src.numerics.mlp import params_digest
from src.replay.buffer import ReplayBuffer, Transition

TINY = TrainConfig(
    env="pointmass-delayed",
    total_steps=40,
    warmup_steps=20,
    batch_size=8,
    replay_ratio=2,
    buffer_size=100,
    ensemble_size=3,
    hidden=8,
    eval_every=20,
    eval_episodes=1,
    visit_every=10,
    log_every=10,
)


def _digest(learner) -> str:
    return params_digest(list(learner.named_arrays().values()))


class ConstantRewardEnv(Environment):
    name = "constant"
    obs_dim = 1
    act_dim = 1
    max_steps = 200

    def __init__(self, reward: float):
        super().__init__()
        self.reward = reward

    def _reset_state(self, rng):
        pass

    def _advance(self, action):
        return self.observe(), self.reward, False

    def observe(self):
        return np.zeros(1)

    def obs_bounds(self):
        return np.zeros(1), np.zeros(1)


class FixedPolicy:
    def __init__(self):
        self.episodes = 0

    def start_episode(self):
        self.episodes += 1

    def act(self, obs):
        return np.zeros(1)


class TestEvaluate:
    @pytest.mark.parametrize("reward,expected", [(0.0, 0.0), (1.0, 200.0)])
    def test_constant_reward(self, reward, expected):
        policy = FixedPolicy()
        result = evaluate(policy, ConstantRewardEnv(reward), 3, np.random.default_rng(0))
        assert result.returns == (expected,) * 3
        assert result.mean == expected
        assert policy.episodes == 3

    def test_needs_an_episode(self):
        with pytest.raises(ValueError):
            evaluate(FixedPolicy(), ConstantRewardEnv(0.0), 0, np.random.default_rng(0))


class TestTraining:
    @pytest.mark.parametrize("agent", ["pbac", "bootdqnp", "sac"])
    def test_warmup_only_run_has_no_updates(self, agent):
        cfg = replace(TINY, agent=agent, total_steps=20, warmup_steps=20)
        streams = RngStreams(cfg.seed)
        env, eval_env = make_env(cfg.env), make_env(cfg.env)
        learner = load_learner(cfg, env.obs_dim, env.act_dim, streams)
        before = _digest(learner)
        log = run_training(cfg, learner, env, eval_env, streams)
        assert log.gradient_phases == 0
        assert log.buffer_size == 20
        assert _digest(learner) == before

    @pytest.mark.parametrize("agent", ["pbac", "bootdqnp", "sac"])
    def test_phase_count(self, agent):
        log, _ = train(replace(TINY, agent=agent))
        assert log.failure is None
        assert log.gradient_phases == TINY.replay_ratio * (TINY.total_steps - TINY.warmup_steps)
        assert [e.step for e in log.evals] == [20, 40]
        assert [r.step for r in log.train] == list(range(1, 41))

    def test_same_seed_is_bit_identical(self):
        log_a, learner_a = train(TINY)
        log_b, learner_b = train(TINY)
        np.testing.assert_array_equal([r.row() for r in log_a.train], [r.row() for r in log_b.train])
        assert [e.returns for e in log_a.evals] == [e.returns for e in log_b.evals]
        assert _digest(learner_a) == _digest(learner_b)
        assert learner_a.last_mask_digest == learner_b.last_mask_digest

    def test_each_phase_draws_a_fresh_mask(self):
        streams = RngStreams(TINY.seed)
        env = make_env(TINY.env)
        learner = load_learner(TINY, env.obs_dim, env.act_dim, streams)
        buffer = ReplayBuffer(TINY.buffer_size, env.obs_dim, env.act_dim)
        rng = np.random.default_rng(3)
        for _ in range(TINY.batch_size * 4):
            buffer.push(
                Transition(s=rng.normal(size=env.obs_dim), a=rng.uniform(-1, 1, size=env.act_dim), r=1.0,
                           s_next=rng.normal(size=env.obs_dim), done=False)
            )
        digests = []
        for _ in range(3):
            learner.update(buffer, head=0)
            digests.append(learner.last_mask_digest)
        assert len(set(digests)) == 3

    def test_different_seed_differs(self):
        _, a = train(TINY)
        _, b = train(replace(TINY, seed=1))
        assert _digest(a) != _digest(b)

    def test_head_held_for_psr_steps(self):
        log, _ = train(replace(TINY, psr=4))
        heads = [r.active_head for r in log.train]
        for start in range(0, len(heads), 4):
            assert len(set(heads[start : start + 4])) == 1
        assert all(0 <= h < TINY.ensemble_size for h in heads)

    def test_sac_always_uses_head_zero(self):
        log, _ = train(replace(TINY, agent="sac"))
        assert {r.active_head for r in log.train} == {0}

    def test_priors_stay_frozen(self):
        cfg = replace(TINY, agent="bootdqnp")
        streams = RngStreams(cfg.seed)
        env, eval_env = make_env(cfg.env), make_env(cfg.env)
        learner = load_learner(cfg, env.obs_dim, env.act_dim, streams)
        before = params_digest(learner.priors.arrays())
        run_training(cfg, learner, env, eval_env, streams)
        assert params_digest(learner.priors.arrays()) == before

    def test_pbac_logs_bound_diagnostics(self):
        log, _ = train(TINY)
        assert [step for step, _ in log.bounds] == [20, 40]
        assert all(math.isfinite(d.rhs) for _, d in log.bounds)
        assert all(not math.isnan(r.loss.diversity) for r in log.train[20:])
        assert all(math.isnan(r.loss.diversity) for r in log.train[:20])

    def test_numeric_failure_is_recorded(self):
        streams = RngStreams(0)
        env, eval_env = make_env(TINY.env), make_env(TINY.env)
        learner = load_learner(TINY, env.obs_dim, env.act_dim, streams)

        def explode(buffer, head):
            learner.phase = "critic"
            raise NumericFailure("non-finite critic loss")

        learner.update = explode
        log = run_training(TINY, learner, env, eval_env, streams)
        assert log.failure == {"step": 21, "phase": "critic", "message": "non-finite critic loss"}
        assert len(log.train) == 20

    def test_named_entry_points_force_their_agent(self):
        sac_cfg = replace(TINY, agent="sac")
        assert [step for step, _ in train_pbac(sac_cfg).bounds] == [20, 40]
        assert train_bootdqnp(TINY).bounds == []
        assert {r.active_head for r in train_sac_baseline(TINY).train} == {0}

    def test_unknown_agent(self):
        with pytest.raises(ConfigError):
            load_learner(replace(TINY, agent="td3"), 2, 1, RngStreams(0))


class TestPersistence:
    @pytest.mark.parametrize("agent", ["pbac", "bootdqnp", "sac"])
    def test_save_load_round_trip(self, tmp_path, agent):
        cfg = replace(TINY, agent=agent)
        _, learner = train(cfg)
        path = learner.save(tmp_path / "params.npz")
        fresh = load_learner(replace(cfg, seed=9), learner.obs_dim, learner.act_dim, RngStreams(9))
        assert _digest(fresh) != _digest(learner)
        fresh.load(path)
        assert _digest(fresh) == _digest(learner)
        if agent != "bootdqnp":
            assert fresh.alpha == learner.alpha

    def test_load_rejects_shape_mismatch(self, tmp_path):
        _, learner = train(TINY)
        path = learner.save(tmp_path / "params.npz")
        wider = load_learner(replace(TINY, hidden=16), learner.obs_dim, learner.act_dim, RngStreams(0))
        with pytest.raises(ValueError):
            wider.load(path)

    def test_write_run(self, tmp_path):
        log, _ = train(TINY)
        written = write_run(log, tmp_path, TINY.eval_episodes)
        assert set(written) == {"train", "eval", "visits", "bound"}
        frame = csv_io.read_eval(written["eval"])
        assert list(frame["step"]) == [20, 40]
        train_rows = csv_io.read_table(written["train"], csv_io.TRAIN_COLUMNS)
        assert list(train_rows["step"]) == list(range(1, 41))

    def test_failure_file(self, tmp_path):
        log = TrainLog(failure={"step": 3, "phase": "actor", "message": "boom"})
        written = write_run(log, tmp_path, 1)
        assert "failure" in written
        assert '"phase": "actor"' in written["failure"].read_text()

    def test_eval_log_must_increase(self):
        log = TrainLog()
        log.append_eval(EvalRecord(10, 0.0, (0.0,)))
        with pytest.raises(ValueError):
            log.append_eval(EvalRecord(10, 0.0, (0.0,)))
