import numpy as np
import pytest
from scipy.stats import chisquare

from src.core.rng import RngStreams
from src.replay import ReplayBuffer, Transition, draw_mask


def _t(i: float, done: bool = False) -> Transition:
    return Transition(s=np.array([i, -i]), a=np.array([i / 10]), r=i, s_next=np.array([i + 1, -i - 1]), done=done)


def _filled(capacity: int, count: int) -> ReplayBuffer:
    buf = ReplayBuffer(capacity, obs_dim=2, act_dim=1)
    for i in range(count):
        buf.push(_t(float(i), done=i % 3 == 0))
    return buf


class TestReplayBuffer:
    def test_size_tracks_pushes_until_capacity(self):
        buf = ReplayBuffer(4, obs_dim=2, act_dim=1)
        for i in range(6):
            buf.push(_t(float(i)))
            assert len(buf) == min(i + 1, 4)

    def test_ring_overwrites_oldest(self):
        buf = _filled(3, 5)
        # slots 0 and 1 were overwritten by transitions 3 and 4
        np.testing.assert_array_equal(buf.r[: len(buf)], [3.0, 4.0, 2.0])
        np.testing.assert_array_equal(buf.s[: len(buf), 0], [3.0, 4.0, 2.0])
        assert buf.write_index == 2

    def test_push_stores_row(self):
        buf = _filled(10, 4)
        np.testing.assert_array_equal(buf.s[3], [3.0, -3.0])
        np.testing.assert_array_equal(buf.s_next[3], [4.0, -4.0])
        assert buf.done[3] == 1.0 and buf.done[2] == 0.0
        assert len(buf) == 4

    def test_bad_shapes_rejected(self):
        buf = ReplayBuffer(4, obs_dim=2, act_dim=1)
        with pytest.raises(ValueError):
            buf.push(Transition(s=np.zeros(3), a=np.zeros(1), r=0.0, s_next=np.zeros(2), done=False))
        assert len(buf) == 0

    def test_zero_capacity_rejected(self):
        with pytest.raises(ValueError):
            ReplayBuffer(0, obs_dim=1, act_dim=1)

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            ReplayBuffer(4, obs_dim=2, act_dim=1).sample(2, np.random.default_rng(0))

    def test_single_entry_sampled_with_replacement(self):
        buf = _filled(8, 1)
        batch = buf.sample(5, np.random.default_rng(0))
        assert len(batch) == 5
        np.testing.assert_array_equal(batch.indices, np.zeros(5, dtype=int))

    def test_sample_rows_match_stored_rows(self):
        buf = _filled(16, 16)
        batch = buf.sample(32, np.random.default_rng(3))
        for j, idx in enumerate(batch.indices):
            i = float(idx)
            np.testing.assert_array_equal(batch.s[j], [i, -i])
            np.testing.assert_array_equal(batch.a[j], [i / 10])
            np.testing.assert_array_equal(batch.s_next[j], [i + 1, -i - 1])
            assert batch.r[j] == i
            assert batch.done[j] == float(idx % 3 == 0)

    def test_sample_is_seed_deterministic(self):
        buf = _filled(50, 50)
        a = buf.sample(20, RngStreams(7).replay)
        b = buf.sample(20, RngStreams(7).replay)
        np.testing.assert_array_equal(a.indices, b.indices)

    def test_indices_uniform_over_large_buffer(self):
        size, n = 100_000, 256
        buf = ReplayBuffer(size, obs_dim=1, act_dim=1)
        row = Transition(s=np.zeros(1), a=np.zeros(1), r=0.0, s_next=np.zeros(1), done=False)
        for _ in range(size):
            buf.push(row)
        rng = np.random.default_rng(11)
        draws = np.concatenate([buf.sample(n, rng).indices for _ in range(1_000_000 // n + 1)])
        counts = np.bincount(draws, minlength=size)
        assert chisquare(counts).pvalue > 0.01


class TestBootstrapMask:
    def test_shape_and_dtype(self):
        mask = draw_mask(5, 3, 0.5, np.random.default_rng(0))
        assert mask.shape == (5, 3)
        assert mask.bits.dtype == bool

    def test_keep_rate_close_to_one_minus_kappa(self):
        mask = draw_mask(2000, 10, 0.8, np.random.default_rng(1))
        assert mask.bits.mean() == pytest.approx(0.2, abs=0.01)

    @pytest.mark.parametrize("kappa", [0.0, 1.0, 1.5, -0.1])
    def test_kappa_outside_open_interval(self, kappa):
        with pytest.raises(ValueError):
            draw_mask(4, 2, kappa, np.random.default_rng(0))

    def test_fresh_draws_differ(self):
        rng = np.random.default_rng(2)
        assert draw_mask(64, 4, 0.5, rng).digest() != draw_mask(64, 4, 0.5, rng).digest()

    def test_digest_is_stable(self):
        a = draw_mask(64, 4, 0.5, np.random.default_rng(9))
        b = draw_mask(64, 4, 0.5, np.random.default_rng(9))
        assert a.digest() == b.digest()

    def test_bits_uncorrelated_across_members_and_rows(self):
        bits = draw_mask(1000, 1000, 0.05, np.random.default_rng(12)).bits.astype(np.float64)
        across_members = np.corrcoef(bits[:, :-1].ravel(), bits[:, 1:].ravel())[0, 1]
        across_rows = np.corrcoef(bits[:-1].ravel(), bits[1:].ravel())[0, 1]
        assert abs(across_members) < 0.01
        assert abs(across_rows) < 0.01
