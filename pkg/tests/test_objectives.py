import numpy as np
import pytest

from cpmtl.numerics import ShapeError
from cpmtl.objectives import (
    ProblemDescriptor,
    RegressionProblem,
    SyntheticProblem,
    problem_from_descriptor,
)


def numeric_loss_grads(problem, theta, batch=None, h=1e-6):
    """Central-difference oracle for the analytic per-task gradients."""
    theta = np.asarray(theta, dtype=np.float64)
    grads = np.zeros((problem.m, theta.size))
    for i in range(theta.size):
        tp, tm = theta.copy(), theta.copy()
        tp[i] += h
        tm[i] -= h
        grads[:, i] = (problem.losses(tp, batch) - problem.losses(tm, batch)) / (2 * h)
    return grads


class TestSyntheticProblem:
    def test_losses_at_valley_minima(self, synthetic_problem):
        theta = np.zeros(10)
        theta[0] = 1.0
        theta[1:] = np.sin(5.0)
        L = synthetic_problem.losses(theta)
        assert L[0] == pytest.approx(0.0, abs=1e-12)
        assert L[1] == pytest.approx(1.0 - np.exp(-4.0), abs=1e-12)

    def test_losses_bounded_in_unit_interval(self, synthetic_problem, rng):
        # far from the valleys the exponential underflows, so 1.0 is attained
        for _ in range(20):
            L = synthetic_problem.losses(rng.standard_normal(10) * 3)
            assert np.all(L >= 0.0) and np.all(L <= 1.0)

    def test_hand_computed_value(self, synthetic_problem):
        theta = np.zeros(10)
        a1 = 1.0 + np.mean(np.zeros(9) ** 2)
        np.testing.assert_allclose(
            synthetic_problem.losses(theta),
            [1.0 - np.exp(-a1), 1.0 - np.exp(-1.0)],
            rtol=1e-14,
        )

    def test_grads_match_finite_differences(self, synthetic_problem, rng):
        for _ in range(10):
            theta = rng.uniform(-1.5, 1.5, size=10)
            np.testing.assert_allclose(
                synthetic_problem.loss_grads(theta),
                numeric_loss_grads(synthetic_problem, theta),
                rtol=1e-5,
                atol=1e-8,
            )

    def test_oracle_set_zeroes_residual_term(self, synthetic_problem):
        thetas = synthetic_problem.oracle_set(31)
        for theta in thetas:
            L = synthetic_problem.losses(theta)
            t = theta[0]
            assert L[0] == pytest.approx(1.0 - np.exp(-((t - 1.0) ** 2)), abs=1e-12)
            assert L[1] == pytest.approx(1.0 - np.exp(-((t + 1.0) ** 2)), abs=1e-12)

    def test_oracle_front_matches_losses_on_oracle_set(self, synthetic_problem):
        front = synthetic_problem.oracle_front(51)
        losses = np.array(
            [synthetic_problem.losses(t) for t in synthetic_problem.oracle_set(51)]
        )[::-1]
        np.testing.assert_allclose(front, losses, atol=1e-12)

    def test_oracle_front_monotone(self, synthetic_problem):
        front = synthetic_problem.oracle_front(101)
        assert np.all(np.diff(front[:, 0]) >= 0)
        assert np.all(np.diff(front[:, 1]) <= 0)

    def test_wrong_theta_size_rejected(self, synthetic_problem):
        with pytest.raises(ShapeError):
            synthetic_problem.losses(np.zeros(3))

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            SyntheticProblem(n=1)


class TestRegressionProblem:
    def test_dataset_is_seed_deterministic(self):
        a, b = RegressionProblem(data_seed=5), RegressionProblem(data_seed=5)
        np.testing.assert_array_equal(a.inputs, b.inputs)
        assert not np.array_equal(a.inputs, RegressionProblem(data_seed=6).inputs)

    def test_zero_params_losses_are_target_means(self, regression_problem):
        theta = np.zeros(regression_problem.theta_dim)
        L = regression_problem.losses(theta)
        np.testing.assert_allclose(
            L,
            [
                np.mean(regression_problem.targets_1**2),
                np.mean(regression_problem.targets_2**2),
            ],
            rtol=1e-12,
        )

    def test_grads_match_finite_differences(self, regression_problem, rng):
        theta = rng.standard_normal(regression_problem.theta_dim) * 0.3
        batch = np.arange(32)
        np.testing.assert_allclose(
            regression_problem.loss_grads(theta, batch),
            numeric_loss_grads(regression_problem, theta, batch),
            rtol=1e-4,
            atol=1e-7,
        )

    def test_batch_selects_rows(self, regression_problem, rng):
        theta = rng.standard_normal(regression_problem.theta_dim) * 0.3
        batch = np.array([3, 17, 40])
        out = regression_problem.predict(theta, batch)
        full = regression_problem.predict(theta)
        np.testing.assert_allclose(out, full[batch], rtol=1e-14)

    def test_empty_batch_rejected(self, regression_problem):
        with pytest.raises(ValueError):
            regression_problem.losses(
                np.zeros(regression_problem.theta_dim), np.array([], dtype=int)
            )

    def test_empirical_c_near_population_value(self, regression_problem):
        # E[(sin(pi x) - cos(pi x))^2] = 1 for x ~ U[-1, 1]
        assert regression_problem.empirical_c == pytest.approx(1.0, abs=0.1)

    def test_oracle_front_endpoints_and_sqrt_identity(self, regression_problem):
        front = regression_problem.oracle_front(101, c=regression_problem.empirical_c)
        c = regression_problem.empirical_c
        np.testing.assert_allclose(front[0], [c, 0.0], atol=1e-12)
        np.testing.assert_allclose(front[-1], [0.0, c], atol=1e-12)
        np.testing.assert_allclose(
            np.sqrt(front[:, 0]) + np.sqrt(front[:, 1]), np.sqrt(c), atol=1e-12
        )


class TestDescriptor:
    def test_round_trip(self, regression_problem, synthetic_problem):
        for problem in (regression_problem, synthetic_problem):
            desc = problem.descriptor
            rebuilt = problem_from_descriptor(ProblemDescriptor.from_dict(desc.to_dict()))
            assert rebuilt.descriptor == desc
            theta = np.linspace(-0.1, 0.1, problem.theta_dim)
            np.testing.assert_array_equal(rebuilt.losses(theta), problem.losses(theta))

    def test_validation(self):
        with pytest.raises(ValueError):
            ProblemDescriptor(1, 10, "synthetic")
        with pytest.raises(ValueError):
            problem_from_descriptor(ProblemDescriptor(2, 10, "mystery"))
