"""Shared fixtures.

Trained-checkpoint fixtures are session-scoped because training is the
expensive part of the suite; everything downstream (sweeps, metrics,
serving, the acceptance criteria) reuses them. Fixtures that feed runtime
acceptance bounds also report their wall-clock training time.
"""

import time

import numpy as np
import pytest

from _criteria_report import RESULTS
from cpmtl.objectives import RegressionProblem, SyntheticProblem
from cpmtl.trainer import TrainingConfig, train


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def synthetic_problem():
    return SyntheticProblem()


@pytest.fixture(scope="session")
def regression_problem():
    return RegressionProblem()


@pytest.fixture(scope="session")
def constrained_synthetic_ckpt(synthetic_problem):
    """The full constrained run on the synthetic problem (defaults, seed 1).

    Returns (checkpoint, step reports, training seconds).
    """
    cfg = TrainingConfig(mode="constrained", steps=10000, seed=1)
    t0 = time.perf_counter()
    ckpt, reports = train(cfg, synthetic_problem)
    return ckpt, reports, time.perf_counter() - t0


@pytest.fixture(scope="session")
def constrained_synthetic_ckpts(synthetic_problem, constrained_synthetic_ckpt):
    """Constrained runs for seeds 1-3 (seed 1 reused from the main fixture)."""
    out = {1: constrained_synthetic_ckpt[0]}
    for seed in (2, 3):
        cfg = TrainingConfig(mode="constrained", steps=10000, seed=seed)
        out[seed], _ = train(cfg, synthetic_problem)
    return out


@pytest.fixture(scope="session")
def linear_synthetic_ckpts(synthetic_problem):
    """Linear-scalarization runs on the synthetic problem, seeds 1-3.

    Longer than the constrained runs: interior front points are stationary
    for the weighted sum (the front is concave) and drain toward the
    endpoints slowly.
    """
    out = {}
    for seed in (1, 2, 3):
        cfg = TrainingConfig(mode="linear", steps=60000, seed=seed)
        out[seed], _ = train(cfg, synthetic_problem)
    return out


@pytest.fixture(scope="session")
def regression_linear_ckpt(regression_problem):
    """Linear run on the regression problem (defaults, seed 1).

    Returns (checkpoint, training seconds).
    """
    cfg = TrainingConfig(mode="linear", steps=10000, seed=1)
    t0 = time.perf_counter()
    ckpt, _ = train(cfg, regression_problem)
    return ckpt, time.perf_counter() - t0


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
