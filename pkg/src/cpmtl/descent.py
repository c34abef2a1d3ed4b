"""Update directions for preference-conditioned multiobjective descent.

Three routes produce a direction over the generator parameters:

* ``linear_direction`` -- the fixed preference-weighted gradient sum.
* ``constrained_direction`` -- the min-norm element of the convex hull of
  the task gradients plus the gradients of the activated angular-region
  constraints, found by solving the dual simplex-constrained QP with
  Frank-Wolfe. Constraint gradients are always recomposed as weighted sums
  of the task gradients, never differentiated separately.
* ``batched_direction`` -- several preferences at once: either an equally
  weighted sum of linear directions, or one joint min-norm solve over all
  K*m task gradients where each preference uses the other K-1 preferences
  as its references (K(K-1) cross constraints).
* ``restoration_direction`` / ``batched_restoration_direction`` -- when a
  solution sits outside its preference region, the min-norm combination of
  the violated constraint gradients alone. Reducing only the violated
  constraints moves the solution along the front toward its region, which
  the joint QP cannot do: at a front point the task gradients become
  collinear, the hull of all gradients contains the origin, and the QP
  direction vanishes even though the solution is in the wrong region.

Sign convention: a direction d here is a convex/affine combination of task
gradients and the parameter update is phi <- phi - eta * d. Descent-validity
checks (``lemma1_check``) are therefore applied to -d.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import ShapeError
from .preferences import PreferenceVector, RegionSpec, constraint_values

__all__ = [
    "DualSolution",
    "DescentDirection",
    "linear_direction",
    "min_norm_dual",
    "constrained_direction",
    "lemma1_check",
    "batched_direction",
    "restoration_direction",
    "batched_restoration_direction",
    "DEFAULT_ACTIVATION_SLACK",
    "DEFAULT_CRITICALITY",
    "DEFAULT_RESTORATION_MARGIN",
]

DEFAULT_ACTIVATION_SLACK = 1e-3
DEFAULT_CRITICALITY = 1e-8
DEFAULT_RESTORATION_MARGIN = 1e-5


@dataclass
class DualSolution:
    """Simplex weights from the dual QP, split into loss (lambda) and
    constraint (beta) multipliers, plus the recombined direction."""

    lam: np.ndarray
    beta: np.ndarray
    alpha: float
    direction: np.ndarray
    objective_history: list = field(default_factory=list, repr=False)

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([self.lam, self.beta])


@dataclass
class DescentDirection:
    d: np.ndarray
    is_critical: bool
    weights: np.ndarray  # per-task combination weights (may be negative)
    dual: DualSolution | None = None
    active_constraint_grads: np.ndarray | None = None


def linear_direction(p: PreferenceVector, grads: np.ndarray) -> DescentDirection:
    """d = sum_i p_i grad_i with the preference itself as the weights."""
    grads = np.asarray(grads, dtype=np.float64)
    if grads.ndim != 2 or grads.shape[0] != p.m:
        raise ShapeError(
            f"expected {p.m} stacked gradients, got shape {grads.shape}"
        )
    d = p.values @ grads
    return DescentDirection(d=d, is_critical=False, weights=p.values.copy())


def _frank_wolfe(M: np.ndarray, max_iters: int, tol: float):
    """Minimize w^T M w over the simplex; M is the Gram matrix of the vectors.

    Exact two-point line search each iteration, started from the shortest
    single vector. Returns (weights, objective history).
    """
    k = M.shape[0]
    w = np.zeros(k)
    w[int(np.argmin(np.diag(M)))] = 1.0
    Mw = M @ w
    obj = float(w @ Mw)
    history = [obj]
    for _ in range(max_iters):
        s = int(np.argmin(Mw))
        dd, ds, ss = obj, float(Mw[s]), float(M[s, s])
        denom = dd - 2.0 * ds + ss
        if denom <= 0.0:
            gamma = 1.0 if ss < dd else 0.0
        else:
            gamma = min(1.0, max(0.0, (dd - ds) / denom))
        if gamma == 0.0:
            break
        w = (1.0 - gamma) * w
        w[s] += gamma
        Mw = (1.0 - gamma) * Mw + gamma * M[s]
        new_obj = float(w @ Mw)
        history.append(new_obj)
        if obj - new_obj < tol:
            obj = new_obj
            break
        obj = new_obj
    return w, history


def min_norm_dual(
    vectors, max_iters: int = 100, tol: float = 1e-12, n_losses: int | None = None
) -> DualSolution:
    """Min-norm point of the convex hull of ``vectors`` via Frank-Wolfe.

    ``n_losses`` splits the returned simplex weights into lambda (first
    block) and beta (rest); by default everything is lambda.
    """
    V = np.asarray(vectors, dtype=np.float64)
    if V.ndim != 2 or V.shape[0] == 0:
        raise ShapeError(f"need a nonempty stack of equal-length vectors, got {V.shape}")
    w, history = _frank_wolfe(V @ V.T, max_iters, tol)
    d = w @ V
    if n_losses is None:
        n_losses = V.shape[0]
    return DualSolution(
        lam=w[:n_losses],
        beta=w[n_losses:],
        alpha=-float(d @ d),
        direction=d,
        objective_history=history,
    )


def constrained_direction(
    region: RegionSpec,
    L: np.ndarray,
    loss_grads: np.ndarray,
    eps: float = DEFAULT_ACTIVATION_SLACK,
    delta: float = DEFAULT_CRITICALITY,
    max_iters: int = 100,
    tol: float = 1e-12,
) -> DescentDirection:
    """Min-norm direction over task gradients and activated region constraints.

    A constraint is active when G_j >= -eps. Its gradient is recomposed as
    sum_i (u_j_i - p_i) grad_i, so the final direction is always expressible
    as per-task weights alpha_i = lambda_i + sum_j beta_j (u_j_i - p_i).
    """
    if eps < 0:
        raise ValueError("activation slack must be >= 0")
    loss_grads = np.asarray(loss_grads, dtype=np.float64)
    m = region.p.m
    if loss_grads.ndim != 2 or loss_grads.shape[0] != m:
        raise ShapeError(
            f"expected {m} stacked gradients, got shape {loss_grads.shape}"
        )
    G = constraint_values(region, L)
    active = np.flatnonzero(G >= -eps)
    coeffs = region.U.vectors[active] - region.p.values  # (|I|, m)
    cons_grads = coeffs @ loss_grads
    V = np.concatenate([loss_grads, cons_grads], axis=0)
    dual = min_norm_dual(V, max_iters=max_iters, tol=tol, n_losses=m)
    alpha = dual.lam + (dual.beta @ coeffs if active.size else 0.0)
    return DescentDirection(
        d=dual.direction,
        is_critical=bool(np.linalg.norm(dual.direction) < delta),
        weights=np.asarray(alpha),
        dual=dual,
        active_constraint_grads=cons_grads,
    )


def lemma1_check(
    d: DescentDirection,
    loss_grads: np.ndarray,
    active_constraint_grads: np.ndarray | None = None,
    tol: float = 1e-7,
) -> bool:
    """Descent validity of a non-critical direction.

    With d_desc = -d, every task gradient and every active constraint
    gradient must satisfy g . d_desc <= -||d||^2 / 2 + tol.
    """
    if d.is_critical:
        raise ValueError("lemma check is only defined for non-critical directions")
    bound = -0.5 * float(d.d @ d.d) + tol
    rows = [np.asarray(loss_grads, dtype=np.float64)]
    if active_constraint_grads is not None and len(active_constraint_grads):
        rows.append(np.asarray(active_constraint_grads, dtype=np.float64))
    stacked = np.concatenate(rows, axis=0)
    return bool(np.all(stacked @ (-d.d) <= bound))


def batched_direction(
    prefs: list[PreferenceVector],
    losses: np.ndarray,
    loss_grads: np.ndarray,
    mode: str,
    eps: float = DEFAULT_ACTIVATION_SLACK,
    delta: float = DEFAULT_CRITICALITY,
    max_iters: int = 100,
    tol: float = 1e-12,
) -> DescentDirection:
    """Direction for K preferences sampled in one step.

    ``losses`` is (K, m); ``loss_grads`` is (K, m, dim). In constrained mode
    each preference's references are the other K-1 preferences, giving up to
    K(K-1) cross constraints; active ones join one min-norm solve over all
    K*m task gradients. Returned weights are (K, m).
    """
    K = len(prefs)
    if K == 0:
        raise ValueError("need at least one preference")
    losses = np.asarray(losses, dtype=np.float64)
    loss_grads = np.asarray(loss_grads, dtype=np.float64)
    m = prefs[0].m
    if losses.shape != (K, m) or loss_grads.shape[:2] != (K, m):
        raise ShapeError(
            f"inconsistent shapes: losses {losses.shape}, grads {loss_grads.shape}"
        )
    dim = loss_grads.shape[2]

    if mode == "linear":
        P = np.stack([p.values for p in prefs])
        d = np.einsum("ki,kid->d", P, loss_grads)
        return DescentDirection(d=d, is_critical=False, weights=P)
    if mode != "constrained":
        raise ValueError(f"unknown mode {mode!r}")

    flat = loss_grads.reshape(K * m, dim)
    coeff_rows = []  # each: (k, m-coefficients over that k's task gradients)
    for k in range(K):
        for j in range(K):
            if j == k:
                continue
            diff = prefs[j].values - prefs[k].values
            if float(diff @ losses[k]) >= -eps:
                coeff_rows.append((k, diff))
    cons_grads = np.array([c @ loss_grads[k] for k, c in coeff_rows]).reshape(-1, dim)
    V = np.concatenate([flat, cons_grads], axis=0) if len(coeff_rows) else flat
    dual = min_norm_dual(V, max_iters=max_iters, tol=tol, n_losses=K * m)
    weights = dual.lam.reshape(K, m).copy()
    for (k, c), b in zip(coeff_rows, dual.beta):
        weights[k] += b * c
    return DescentDirection(
        d=dual.direction,
        is_critical=bool(np.linalg.norm(dual.direction) < delta),
        weights=weights,
        dual=dual,
        active_constraint_grads=cons_grads if len(coeff_rows) else np.zeros((0, dim)),
    )


def restoration_direction(
    region: RegionSpec,
    L: np.ndarray,
    loss_grads: np.ndarray,
    margin: float = DEFAULT_RESTORATION_MARGIN,
    delta: float = DEFAULT_CRITICALITY,
    max_iters: int = 100,
    tol: float = 1e-12,
) -> DescentDirection | None:
    """Min-norm combination of the violated region-constraint gradients.

    Returns None when no constraint exceeds ``margin`` (the solution is in
    or near enough its region). The margin keeps well-placed solutions
    still: G grows only quadratically with the angular error, so a small
    positive margin translates into a tight angular dead band.
    """
    loss_grads = np.asarray(loss_grads, dtype=np.float64)
    m = region.p.m
    if loss_grads.ndim != 2 or loss_grads.shape[0] != m:
        raise ShapeError(
            f"expected {m} stacked gradients, got shape {loss_grads.shape}"
        )
    G = constraint_values(region, L)
    violated = np.flatnonzero(G > margin)
    if violated.size == 0:
        return None
    coeffs = region.U.vectors[violated] - region.p.values  # (|V|, m)
    cons_grads = coeffs @ loss_grads
    dual = min_norm_dual(cons_grads, max_iters=max_iters, tol=tol, n_losses=0)
    return DescentDirection(
        d=dual.direction,
        is_critical=bool(np.linalg.norm(dual.direction) < delta),
        weights=dual.beta @ coeffs,
        dual=dual,
        active_constraint_grads=cons_grads,
    )


def batched_restoration_direction(
    prefs: list[PreferenceVector],
    losses: np.ndarray,
    loss_grads: np.ndarray,
    margin: float = DEFAULT_RESTORATION_MARGIN,
    delta: float = DEFAULT_CRITICALITY,
    max_iters: int = 100,
    tol: float = 1e-12,
) -> DescentDirection | None:
    """Batched counterpart of ``restoration_direction``.

    Checks the K(K-1) cross constraints (each preference against the other
    K-1) and, if any is violated beyond ``margin``, returns the min-norm
    combination of the violated constraint gradients. Returned weights are
    (K, m).
    """
    K = len(prefs)
    if K == 0:
        raise ValueError("need at least one preference")
    losses = np.asarray(losses, dtype=np.float64)
    loss_grads = np.asarray(loss_grads, dtype=np.float64)
    m = prefs[0].m
    if losses.shape != (K, m) or loss_grads.shape[:2] != (K, m):
        raise ShapeError(
            f"inconsistent shapes: losses {losses.shape}, grads {loss_grads.shape}"
        )
    dim = loss_grads.shape[2]
    coeff_rows = []
    for k in range(K):
        for j in range(K):
            if j == k:
                continue
            diff = prefs[j].values - prefs[k].values
            if float(diff @ losses[k]) > margin:
                coeff_rows.append((k, diff))
    if not coeff_rows:
        return None
    cons_grads = np.array([c @ loss_grads[k] for k, c in coeff_rows]).reshape(-1, dim)
    dual = min_norm_dual(cons_grads, max_iters=max_iters, tol=tol, n_losses=0)
    weights = np.zeros((K, m))
    for (k, c), b in zip(coeff_rows, dual.beta):
        weights[k] += b * c
    return DescentDirection(
        d=dual.direction,
        is_critical=bool(np.linalg.norm(dual.direction) < delta),
        weights=weights,
        dual=dual,
        active_constraint_grads=cons_grads,
    )
