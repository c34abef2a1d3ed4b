import numpy as np
import pytest

from cpmtl.numerics import (
    MLPSpec,
    NonFiniteError,
    ParamVector,
    Segment,
    ShapeError,
    finite_diff_grad,
    init_mlp_params,
    mlp_forward,
    mlp_grad,
    mlp_layout,
)


def small_spec():
    return MLPSpec((2, 3, 1), ("tanh", "identity"))


class TestParamVector:
    def test_segment_table_must_cover_data(self):
        with pytest.raises(ShapeError):
            ParamVector(np.zeros(5), (Segment("a", 0, (2,)),))

    def test_segment_offsets_must_be_ascending_and_disjoint(self):
        with pytest.raises(ShapeError):
            ParamVector(
                np.zeros(4), (Segment("a", 0, (2,)), Segment("b", 1, (2,)))
            )

    def test_view_is_writable_and_shaped(self):
        pv = ParamVector.from_views([("W", np.zeros((2, 3))), ("b", np.zeros(3))])
        pv.view("W")[1, 2] = 7.0
        assert pv.data[5] == 7.0
        assert pv.view("W").shape == (2, 3)

    def test_view_unknown_name(self):
        pv = ParamVector.from_views([("W", np.zeros(2))])
        with pytest.raises(ShapeError):
            pv.view("nope")

    def test_subvector_shares_storage_and_strips_prefix(self):
        pv = ParamVector.from_views(
            [("hyper.W0", np.zeros((2, 2))), ("hyper.b0", np.zeros(2)), ("tail", np.zeros(1))]
        )
        sub = pv.subvector("hyper")
        assert sub.names() == ["W0", "b0"]
        sub.view("b0")[0] = 3.0
        assert pv.view("hyper.b0")[0] == 3.0

    def test_copy_is_independent(self):
        pv = ParamVector.from_views([("a", np.ones(3))])
        other = pv.copy()
        other.data[0] = 9.0
        assert pv.data[0] == 1.0

    def test_from_views_round_trip(self):
        w = np.arange(6.0).reshape(2, 3)
        pv = ParamVector.from_views([("W", w)])
        np.testing.assert_array_equal(pv.view("W"), w)


class TestMLPSpec:
    def test_layout_matches_param_count(self):
        spec = small_spec()
        assert sum(s.size for s in mlp_layout(spec)) == spec.param_count
        assert [s.name for s in mlp_layout(spec)] == ["W0", "b0", "W1", "b1"]

    def test_unknown_activation_rejected(self):
        with pytest.raises(ValueError):
            MLPSpec((2, 2), ("sigmoid",))

    def test_activation_count_must_match_layers(self):
        with pytest.raises(ValueError):
            MLPSpec((2, 3, 1), ("tanh",))

    def test_dict_round_trip(self):
        spec = small_spec()
        assert MLPSpec.from_dict(spec.to_dict()) == spec


class TestForward:
    def test_zero_params_tanh_gives_zero_output(self, rng):
        spec = small_spec()
        params = ParamVector(np.zeros(spec.param_count), mlp_layout(spec))
        out = mlp_forward(spec, params, rng.standard_normal(2))
        np.testing.assert_array_equal(out, np.zeros(1))

    def test_single_affine_layer(self):
        spec = MLPSpec((1, 1), ("identity",))
        params = ParamVector.from_views([("W0", np.array([[2.0]])), ("b0", np.array([1.0]))])
        np.testing.assert_allclose(mlp_forward(spec, params, np.array([3.0])), [7.0])

    def test_matches_hand_composed_evaluation(self):
        rng = np.random.default_rng(7)
        spec = MLPSpec((2, 3, 1), ("tanh", "identity"))
        params = init_mlp_params(spec, rng)
        x = rng.standard_normal(2)
        hidden = np.tanh(params.view("W0") @ x + params.view("b0"))
        expected = params.view("W1") @ hidden + params.view("b1")
        np.testing.assert_allclose(mlp_forward(spec, params, x), expected, rtol=1e-12)

    def test_batched_forward_matches_loop(self, rng):
        spec = small_spec()
        params = init_mlp_params(spec, rng)
        X = rng.standard_normal((5, 2))
        batched = mlp_forward(spec, params, X)
        rows = np.stack([mlp_forward(spec, params, x) for x in X])
        np.testing.assert_allclose(batched, rows, rtol=1e-14)

    def test_wrong_input_size_rejected(self, rng):
        spec = small_spec()
        params = init_mlp_params(spec, rng)
        with pytest.raises(ShapeError):
            mlp_forward(spec, params, np.zeros(3))

    def test_non_finite_params_detected(self, rng):
        spec = small_spec()
        params = init_mlp_params(spec, rng)
        params.view("W0")[0, 0] = np.nan
        with pytest.raises(NonFiniteError):
            mlp_forward(spec, params, np.zeros(2))


class TestGrad:
    def test_matches_finite_differences(self, rng):
        spec = MLPSpec((2, 4, 2), ("tanh", "identity"))
        params = init_mlp_params(spec, rng)
        x = rng.standard_normal(2)
        upstream = rng.standard_normal(2)
        result = mlp_grad(spec, params, x, upstream)
        fd = finite_diff_grad(
            lambda pv: float(upstream @ mlp_forward(spec, pv, x)), params
        )
        np.testing.assert_allclose(result.param_grad.data, fd.data, rtol=1e-5, atol=1e-8)

    def test_relu_grad_matches_finite_differences(self, rng):
        spec = MLPSpec((3, 4, 1), ("relu", "identity"))
        params = init_mlp_params(spec, rng)
        x = rng.standard_normal(3) + 0.5
        result = mlp_grad(spec, params, x, np.ones(1))
        fd = finite_diff_grad(lambda pv: float(mlp_forward(spec, pv, x)[0]), params)
        np.testing.assert_allclose(result.param_grad.data, fd.data, rtol=1e-4, atol=1e-7)

    def test_batched_grad_sums_over_batch(self, rng):
        spec = small_spec()
        params = init_mlp_params(spec, rng)
        X = rng.standard_normal((4, 2))
        U = rng.standard_normal((4, 1))
        batched = mlp_grad(spec, params, X, U)
        summed = np.zeros(params.size)
        for x, u in zip(X, U):
            summed += mlp_grad(spec, params, x, u).param_grad.data
        np.testing.assert_allclose(batched.param_grad.data, summed, rtol=1e-12)

    def test_input_grad_matches_finite_differences(self, rng):
        spec = small_spec()
        params = init_mlp_params(spec, rng)
        x = rng.standard_normal(2)
        got = mlp_grad(spec, params, x, np.ones(1)).input_grad
        h = 1e-6
        fd = np.zeros(2)
        for i in range(2):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd[i] = (mlp_forward(spec, params, xp)[0] - mlp_forward(spec, params, xm)[0]) / (2 * h)
        np.testing.assert_allclose(got, fd, rtol=1e-6, atol=1e-9)

    def test_upstream_shape_checked(self, rng):
        spec = small_spec()
        params = init_mlp_params(spec, rng)
        with pytest.raises(ShapeError):
            mlp_grad(spec, params, np.zeros(2), np.zeros(2))


class TestFiniteDiff:
    def test_quadratic_exact(self):
        pv = ParamVector.from_views([("x", np.array([1.0, 2.0]))])
        grad = finite_diff_grad(lambda v: float(v.data @ v.data), pv)
        np.testing.assert_allclose(grad.data, [2.0, 4.0], rtol=1e-8)

    def test_rejects_nonpositive_step(self):
        pv = ParamVector.from_views([("x", np.zeros(1))])
        with pytest.raises(ValueError):
            finite_diff_grad(lambda v: 0.0, pv, h=0.0)
