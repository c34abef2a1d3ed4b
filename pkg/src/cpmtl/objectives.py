"""Built-in multiobjective problems.

Two problems sit behind one small interface:

* ``SyntheticProblem`` -- a two-objective benchmark on R^n whose optimal
  trade-off set is the curve theta_i = sin(5 theta_1), theta_1 in [-1, 1],
  giving a concave front in loss space.
* ``RegressionProblem`` -- a two-task toy regression where one shared scalar
  output must fit both sin(pi x) and cos(pi x); the conflict is structural
  and the optimal front is convex.

Both expose losses, analytic per-task gradients, and (where known) the
analytic front for scoring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import MLPSpec, ParamVector, ShapeError, mlp_forward, mlp_grad, mlp_layout

__all__ = [
    "ProblemDescriptor",
    "SyntheticProblem",
    "RegressionProblem",
    "problem_from_descriptor",
]


@dataclass(frozen=True)
class ProblemDescriptor:
    m: int
    theta_dim: int
    kind: str  # "synthetic" | "regression"
    data_seed: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"need at least 2 tasks, got {self.m}")
        if self.theta_dim < 1:
            raise ValueError(f"theta_dim must be >= 1, got {self.theta_dim}")

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "theta_dim": self.theta_dim,
            "kind": self.kind,
            "data_seed": self.data_seed,
        }

    @staticmethod
    def from_dict(d: dict) -> "ProblemDescriptor":
        return ProblemDescriptor(d["m"], d["theta_dim"], d["kind"], d.get("data_seed", 0))


class SyntheticProblem:
    """Two exponential-valley objectives with a sin-curve optimal set.

    f1(theta) = 1 - exp(-(theta_1 - 1)^2 - mean_{i>=2}(theta_i - sin(5 theta_1))^2)
    f2(theta) = 1 - exp(-(theta_1 + 1)^2)

    Both losses live in [0, 1).
    """

    m = 2
    kind = "synthetic"
    has_oracle = True

    def __init__(self, n: int = 10):
        if n < 2:
            raise ValueError(f"n must be >= 2, got {n}")
        self.n = n

    @property
    def theta_dim(self) -> int:
        return self.n

    @property
    def descriptor(self) -> ProblemDescriptor:
        return ProblemDescriptor(self.m, self.n, self.kind)

    def _check(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64).ravel()
        if theta.size != self.n:
            raise ShapeError(f"theta has {theta.size} entries, expected {self.n}")
        return theta

    def losses(self, theta: np.ndarray, batch=None) -> np.ndarray:
        theta = self._check(theta)
        resid = theta[1:] - np.sin(5.0 * theta[0])
        a1 = (theta[0] - 1.0) ** 2 + np.mean(resid**2)
        a2 = (theta[0] + 1.0) ** 2
        return np.array([1.0 - np.exp(-a1), 1.0 - np.exp(-a2)])

    def loss_grads(self, theta: np.ndarray, batch=None) -> np.ndarray:
        """Analytic (m, n) gradient matrix."""
        theta = self._check(theta)
        s, c = np.sin(5.0 * theta[0]), np.cos(5.0 * theta[0])
        resid = theta[1:] - s
        a1 = (theta[0] - 1.0) ** 2 + np.mean(resid**2)
        e1 = np.exp(-a1)
        g1 = np.zeros(self.n)
        g1[0] = e1 * (2.0 * (theta[0] - 1.0) - 10.0 * c * np.mean(resid))
        g1[1:] = e1 * 2.0 * resid / (self.n - 1)
        e2 = np.exp(-((theta[0] + 1.0) ** 2))
        g2 = np.zeros(self.n)
        g2[0] = e2 * 2.0 * (theta[0] + 1.0)
        return np.stack([g1, g2])

    def oracle_set(self, samples: int) -> np.ndarray:
        """Points on the optimal trade-off curve in solution space."""
        if samples < 2:
            raise ValueError("need at least 2 samples")
        t = np.linspace(-1.0, 1.0, samples)
        theta = np.empty((samples, self.n))
        theta[:, 0] = t
        theta[:, 1:] = np.sin(5.0 * t)[:, None]
        return theta

    def oracle_front(self, samples: int) -> np.ndarray:
        t = np.linspace(-1.0, 1.0, samples)
        f1 = 1.0 - np.exp(-((t - 1.0) ** 2))
        f2 = 1.0 - np.exp(-((t + 1.0) ** 2))
        # grid ordered so f1 increases / f2 decreases
        return np.stack([f1, f2], axis=1)[::-1]


class RegressionProblem:
    """Two-task scalar regression with a single shared output head.

    Inputs x ~ U[-1, 1] (seed-pinned); task 1 target sin(pi x), task 2 target
    cos(pi x). Losses are MSEs of the one shared output against each target,
    so no parameterization can zero both: the ideal blend w*sin + (1-w)*cos
    gives the convex front ((1-w)^2 c, w^2 c) with c = E[(sin - cos)^2].
    """

    m = 2
    kind = "regression"
    has_oracle = True

    def __init__(self, data_seed: int = 0, n_points: int = 512):
        self.data_seed = data_seed
        self.n_points = n_points
        rng = np.random.default_rng(data_seed)
        self.inputs = rng.uniform(-1.0, 1.0, size=n_points)
        self.targets_1 = np.sin(np.pi * self.inputs)
        self.targets_2 = np.cos(np.pi * self.inputs)
        self.main_spec = MLPSpec((1, 16, 16, 1), ("tanh", "tanh", "identity"))
        self._layout = mlp_layout(self.main_spec)

    @property
    def theta_dim(self) -> int:
        return self.main_spec.param_count

    @property
    def descriptor(self) -> ProblemDescriptor:
        return ProblemDescriptor(self.m, self.theta_dim, self.kind, self.data_seed)

    @property
    def empirical_c(self) -> float:
        """E[(sin - cos)^2] over the sampled dataset (population value 1)."""
        return float(np.mean((self.targets_1 - self.targets_2) ** 2))

    def _wrap(self, theta: np.ndarray) -> ParamVector:
        theta = np.asarray(theta, dtype=np.float64).ravel()
        if theta.size != self.theta_dim:
            raise ShapeError(
                f"theta has {theta.size} entries, expected {self.theta_dim}"
            )
        return ParamVector(theta, self._layout)

    def _batch(self, batch) -> np.ndarray:
        idx = np.arange(self.n_points) if batch is None else np.asarray(batch)
        if idx.size == 0:
            raise ValueError("empty batch")
        return idx

    def predict(self, theta: np.ndarray, batch=None) -> np.ndarray:
        idx = self._batch(batch)
        x = self.inputs[idx][:, None]
        return mlp_forward(self.main_spec, self._wrap(theta), x)[:, 0]

    def losses(self, theta: np.ndarray, batch=None) -> np.ndarray:
        idx = self._batch(batch)
        out = self.predict(theta, idx)
        return np.array(
            [
                np.mean((out - self.targets_1[idx]) ** 2),
                np.mean((out - self.targets_2[idx]) ** 2),
            ]
        )

    def loss_grads(self, theta: np.ndarray, batch=None) -> np.ndarray:
        idx = self._batch(batch)
        params = self._wrap(theta)
        x = self.inputs[idx][:, None]
        grads = np.zeros((self.m, self.theta_dim))
        out = mlp_forward(self.main_spec, params, x)[:, 0]
        for i, targets in enumerate((self.targets_1, self.targets_2)):
            upstream = (2.0 / idx.size) * (out - targets[idx])[:, None]
            grads[i] = mlp_grad(self.main_spec, params, x, upstream).param_grad.data
        return grads

    def oracle_front(self, samples: int, c: float = 1.0) -> np.ndarray:
        """Analytic convex front ((1-w)^2 c, w^2 c) on a uniform w grid.

        ``c`` defaults to the population value 1 for x ~ U[-1, 1].
        """
        if samples < 2:
            raise ValueError("need at least 2 samples")
        w = np.linspace(0.0, 1.0, samples)
        return np.stack([(1.0 - w) ** 2 * c, w**2 * c], axis=1)


def problem_from_descriptor(desc: ProblemDescriptor):
    if desc.kind == "synthetic":
        return SyntheticProblem(n=desc.theta_dim)
    if desc.kind == "regression":
        return RegressionProblem(data_seed=desc.data_seed)
    raise ValueError(f"unknown problem kind {desc.kind!r}")
