import numpy as np
import pytest

from src.core.errors import NumericFailure
from src.numerics import (
    Activation,
    AdamState,
    DenseLayer,
    MlpParams,
    adam_step,
    crelu,
    init_mlp,
    layer_norm,
    mlp_backward,
    mlp_forward,
    polyak_update,
)
from src.numerics.gradcheck import central_difference, relative_error
from src.numerics.mlp import params_digest


def _linear(weight, bias):
    weight = np.asarray(weight, dtype=np.float64)
    out = weight.shape[0]
    return DenseLayer(weight=weight, bias=np.asarray(bias, dtype=np.float64), ln_gain=np.ones(out), ln_shift=np.zeros(out))


class TestCrelu:
    def test_examples(self):
        np.testing.assert_array_equal(crelu(np.array([1.0, -2.0])), [1.0, 0.0, 0.0, 2.0])
        np.testing.assert_array_equal(crelu(np.zeros(2)), np.zeros(4))
        np.testing.assert_array_equal(crelu(np.array([3.5])), [3.5, 0.0])

    def test_halves_recover_input(self):
        x = np.random.default_rng(0).normal(size=7)
        out = crelu(x)
        assert (out >= 0).all()
        np.testing.assert_allclose(out[:7] - out[7:], x, atol=0)


class TestLayerNorm:
    def test_constant_input(self):
        np.testing.assert_allclose(layer_norm(np.full(3, 4.2), np.ones(3), np.zeros(3)), np.zeros(3), atol=1e-12)

    def test_hand_examples(self):
        np.testing.assert_allclose(layer_norm(np.array([1.0, -1.0]), np.ones(2), np.zeros(2), eps=0.0), [1.0, -1.0])
        np.testing.assert_allclose(
            layer_norm(np.array([1.0, -1.0]), np.full(2, 2.0), np.ones(2), eps=0.0), [3.0, -1.0]
        )

    def test_standardizes(self):
        x = np.random.default_rng(1).normal(size=9) * 5 + 3
        out = layer_norm(x, np.ones(9), np.zeros(9), eps=0.0)
        assert abs(out.mean()) < 1e-10
        assert abs(out.var() - 1.0) < 1e-10

    def test_rejects_single_feature(self):
        with pytest.raises(ValueError):
            layer_norm(np.array([1.0]), np.ones(1), np.zeros(1))


class TestMlpForward:
    def test_single_affine_layer(self):
        params = MlpParams(layers=[_linear([[2.0]], [1.0])], activation=Activation.IDENTITY)
        out, _ = mlp_forward(params, np.array([3.0]))
        np.testing.assert_allclose(out, [7.0])

    def test_zero_weights_give_bias(self):
        rng = np.random.default_rng(2)
        params = init_mlp([3, 4, 2], rng)
        for layer in params.layers:
            layer.weight[...] = 0.0
        params.layers[-1].bias[...] = [0.5, -1.5]
        for _ in range(3):
            out, _ = mlp_forward(params, rng.normal(size=3))
            np.testing.assert_allclose(out, [0.5, -1.5])

    def test_matches_straight_line_reimplementation(self):
        l1 = _linear(np.full((3, 2), 0.1), np.zeros(3))
        l2 = _linear(np.full((1, 6), 0.1), np.zeros(1))
        params = MlpParams(layers=[l1, l2])
        x = np.ones(2)

        z = np.full(3, 0.2)
        h = (z - z.mean()) / np.sqrt(z.var() + 1e-5)
        expected = 0.1 * np.concatenate([np.maximum(h, 0), np.maximum(-h, 0)]).sum()
        out, _ = mlp_forward(params, x)
        np.testing.assert_allclose(out, [expected], atol=1e-12)

    def test_batched_equals_rowwise(self):
        rng = np.random.default_rng(3)
        params = init_mlp([4, 5, 5, 2], rng)
        x = rng.normal(size=(6, 4))
        batched, _ = mlp_forward(params, x)
        for i in range(6):
            np.testing.assert_allclose(mlp_forward(params, x[i])[0], batched[i], atol=1e-13)

    def test_dimension_mismatch(self):
        params = init_mlp([3, 4, 1], np.random.default_rng(4))
        with pytest.raises(ValueError):
            mlp_forward(params, np.ones(2))

    def test_incompatible_layers_rejected(self):
        with pytest.raises(ValueError):
            MlpParams(layers=[_linear(np.ones((3, 2)), np.zeros(3)), _linear(np.ones((1, 3)), np.zeros(1))])


class TestMlpBackward:
    def test_linear_bias_grad_is_upstream(self):
        params = MlpParams(layers=[_linear([[1.0, 2.0], [3.0, 4.0]], [0.0, 0.0])], activation=Activation.IDENTITY)
        _, cache = mlp_forward(params, np.array([1.0, -1.0]))
        g = np.array([0.3, -0.7])
        grads, _ = mlp_backward(cache, g)
        np.testing.assert_array_equal(grads.layers[0].bias, g)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        depth = int(rng.integers(1, 4))
        sizes = [int(rng.integers(2, 6))] + [int(rng.integers(2, 9)) for _ in range(depth)]
        params = init_mlp(sizes, rng, activate_output=bool(seed % 2) and depth > 1)
        x = rng.normal(size=(3, sizes[0]))
        w = rng.normal(size=(3, params.out_dim))

        def loss():
            return float((mlp_forward(params, x)[0] * w).sum())

        grads, _ = mlp_backward(mlp_forward(params, x)[1], w)
        assert relative_error(grads.arrays(), central_difference(loss, params.arrays())) < 1e-4

    def test_input_grad_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        params = init_mlp([3, 4, 4, 1], rng)
        x = rng.normal(size=(2, 3))
        _, cache = mlp_forward(params, x)
        _, gx = mlp_backward(cache, np.ones((2, 1)))
        num = central_difference(lambda: float(mlp_forward(params, x)[0].sum()), [x])[0]
        np.testing.assert_allclose(gx, num, atol=1e-7)

    def test_constant_network_has_zero_input_grad(self):
        params = init_mlp([3, 4, 1], np.random.default_rng(5))
        params.layers[-1].weight[...] = 0.0
        _, cache = mlp_forward(params, np.ones(3))
        _, gx = mlp_backward(cache, np.ones(1))
        np.testing.assert_array_equal(gx, np.zeros(3))

    def test_stale_cache(self):
        params = init_mlp([3, 4, 2], np.random.default_rng(6))
        _, cache = mlp_forward(params, np.ones((5, 3)))
        with pytest.raises(ValueError, match="stale cache"):
            mlp_backward(cache, np.ones((4, 2)))


class TestStackedMlp:
    def test_each_slice_matches_its_member(self):
        rng = np.random.default_rng(21)
        params = init_mlp([3, 5, 5, 2], rng, stack=4)
        x = rng.normal(size=(6, 3))
        out, _ = mlp_forward(params, x)
        assert out.shape == (4, 6, 2)
        for k in range(4):
            np.testing.assert_allclose(out[k], mlp_forward(params.member(k), x)[0], rtol=0, atol=1e-13)

    def test_per_member_inputs(self):
        rng = np.random.default_rng(22)
        params = init_mlp([2, 4, 1], rng, stack=3)
        x = rng.normal(size=(3, 5, 2))
        out, _ = mlp_forward(params, x)
        for k in range(3):
            np.testing.assert_allclose(out[k], mlp_forward(params.member(k), x[k])[0], rtol=0, atol=1e-13)

    def test_member_writes_reach_the_stack(self):
        params = init_mlp([2, 3, 1], np.random.default_rng(23), stack=2)
        params.member(1).layers[-1].bias[...] = 7.0
        assert params.layers[-1].bias[1, 0] == 7.0
        assert params.layers[-1].bias[0, 0] != 7.0

    def test_member_bounds(self):
        stacked = init_mlp([2, 3, 1], np.random.default_rng(24), stack=2)
        with pytest.raises(IndexError):
            stacked.member(2)
        with pytest.raises(ValueError):
            init_mlp([2, 3, 1], np.random.default_rng(24)).member(0)

    @pytest.mark.parametrize("seed", range(5))
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        params = init_mlp([3, 4, 4, 2], rng, stack=3)
        x = rng.normal(size=(5, 3))
        w = rng.normal(size=(3, 5, 2))

        def loss():
            return float((mlp_forward(params, x)[0] * w).sum())

        grads, _ = mlp_backward(mlp_forward(params, x)[1], w)
        assert [g.shape for g in grads.arrays()] == [p.shape for p in params.arrays()]
        assert relative_error(grads.arrays(), central_difference(loss, params.arrays())) < 1e-4

    def test_input_grad_only(self):
        rng = np.random.default_rng(25)
        params = init_mlp([3, 4, 1], rng, stack=2)
        x = rng.normal(size=(4, 3))
        _, cache = mlp_forward(params, x)
        none, gx = mlp_backward(cache, np.ones((2, 4, 1)), param_grads=False)
        _, full = mlp_backward(cache, np.ones((2, 4, 1)))
        assert none is None
        np.testing.assert_array_equal(gx, full)
        assert gx.shape == (2, 4, 3)


class TestRelativeError:
    def test_pooled_over_arrays(self):
        # a tiny array off by 100% does not dominate a large exact one
        analytic = [np.array([1e-9]), np.full(4, 10.0)]
        numeric = [np.array([2e-9]), np.full(4, 10.0)]
        assert relative_error(analytic, numeric) < 1e-10

    def test_empty(self):
        assert relative_error([], []) == 0.0


class TestAdam:
    def test_first_step_hand_value(self):
        p = [np.zeros(1)]
        state = AdamState.zeros_like(p, lr=1e-3)
        adam_step(p, [np.array([0.1])], state)
        assert p[0][0] == pytest.approx(-9.99999e-4, rel=1e-6)
        assert state.step_count == 1

    def test_zero_gradient_leaves_params(self):
        p = [np.array([1.0, -2.0])]
        state = AdamState.zeros_like(p)
        adam_step(p, [np.zeros(2)], state)
        np.testing.assert_array_equal(p[0], [1.0, -2.0])

    def test_bias_correction_keeps_step_size(self):
        p = [np.zeros(1)]
        state = AdamState.zeros_like(p, lr=1e-3)
        adam_step(p, [np.array([0.1])], state)
        first = p[0][0]
        adam_step(p, [np.array([0.1])], state)
        assert abs((p[0][0] - first) - first) < 1e-6

    def test_non_finite_gradient_rejected_without_mutation(self):
        p = [np.ones(2)]
        state = AdamState.zeros_like(p)
        with pytest.raises(NumericFailure):
            adam_step(p, [np.array([np.nan, 1.0])], state)
        np.testing.assert_array_equal(p[0], np.ones(2))
        assert state.step_count == 0


class TestPolyak:
    def test_tau_limits(self):
        target, online = [np.array([1.0, 2.0])], [np.array([5.0, 6.0])]
        polyak_update(target, online, 0.0)
        np.testing.assert_array_equal(target[0], [1.0, 2.0])
        polyak_update(target, online, 1.0)
        np.testing.assert_array_equal(target[0], [5.0, 6.0])

    def test_scalar_example(self):
        target = [np.zeros(1)]
        polyak_update(target, [np.array([2.0])], 0.005)
        assert target[0][0] == pytest.approx(0.01, abs=1e-15)

    def test_geometric_convergence(self):
        target, online = [np.array([3.0])], [np.array([1.0])]
        for _ in range(50):
            polyak_update(target, online, 0.1)
        assert abs(target[0][0] - 1.0) == pytest.approx(0.9**50 * 2.0, rel=1e-10)

    def test_digest_changes_with_params(self):
        params = init_mlp([2, 3, 1], np.random.default_rng(7))
        before = params_digest(params.arrays())
        params.layers[0].bias[0] += 1.0
        assert params_digest(params.arrays()) != before
