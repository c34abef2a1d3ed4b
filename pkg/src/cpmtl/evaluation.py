"""Front reconstruction and scoring.

Sweeps a preference grid through a trained generator and scores the
resulting loss cloud: 2-D hypervolume, distance to the analytic front
(convergence and coverage), the fraction of samples that stay closest in
angle to their own preference, and non-dominated filtering.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .checkpoint import Checkpoint
from .hypergen import generate
from .objectives import problem_from_descriptor
from .preferences import PreferenceVector

__all__ = [
    "FrontSample",
    "FrontMetrics",
    "preference_grid",
    "sweep_front",
    "hypervolume_2d",
    "front_distance",
    "region_compliance",
    "compliance_reference_grid",
    "dominance_filter",
    "compute_metrics",
    "write_front_csv",
    "format_metrics",
]

log = logging.getLogger(__name__)

HV_REFERENCE = np.array([1.0, 1.0])
ORACLE_SAMPLES = 1000
COMPLIANCE_GRID_SIZE = 32
COMPLIANCE_GRID_SEED = 2024


@dataclass
class FrontSample:
    p: PreferenceVector
    losses: np.ndarray


@dataclass
class FrontMetrics:
    hypervolume: float
    mean_oracle_distance: float
    max_oracle_gap: float
    region_compliance_rate: float
    dominated_count: int

    def to_dict(self) -> dict:
        return {
            "hypervolume": self.hypervolume,
            "mean_oracle_distance": self.mean_oracle_distance,
            "max_oracle_gap": self.max_oracle_gap,
            "region_compliance_rate": self.region_compliance_rate,
            "dominated_count": self.dominated_count,
        }


def preference_grid(m: int, mode: str, grid_size: int) -> list[PreferenceVector]:
    """Uniform preference grid from the task-1 extreme to the task-m extreme.

    For m = 2 the grid is exact (uniform weight / uniform angle); for m >= 3
    it falls back to a seeded deterministic sample of the preference domain.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if m == 2:
        if mode == "simplex":
            w = np.linspace(0.0, 1.0, grid_size)
            return [PreferenceVector(np.array([1.0 - wi, wi]), "simplex") for wi in w]
        ang = np.linspace(0.0, np.pi / 2.0, grid_size)
        out = []
        for a in ang:
            v = np.maximum(np.array([np.cos(a), np.sin(a)]), 0.0)
            out.append(PreferenceVector(v / np.linalg.norm(v), "sphere"))
        return out
    rng = np.random.default_rng(grid_size)
    prefs = []
    for _ in range(grid_size):
        raw = rng.dirichlet(np.ones(m))
        prefs.append(PreferenceVector.normalize(raw, mode))
    return prefs


def sweep_front(ckpt: Checkpoint, grid_size: int, problem=None) -> list[FrontSample]:
    """Generate and evaluate the full preference grid on the fixed
    evaluation batch (the whole dataset)."""
    if problem is None:
        problem = problem_from_descriptor(ckpt.problem)
    if problem.m != ckpt.spec.m:
        raise ValueError(
            f"problem has {problem.m} tasks, checkpoint generator {ckpt.spec.m}"
        )
    grid = preference_grid(problem.m, ckpt.preference_mode, grid_size)
    samples = []
    for p in grid:
        theta = generate(ckpt.spec, ckpt.params, p).theta
        samples.append(FrontSample(p=p, losses=problem.losses(theta)))
    return samples


def _losses_of(samples) -> np.ndarray:
    if len(samples) and isinstance(samples[0], FrontSample):
        return np.stack([s.losses for s in samples])
    return np.asarray(samples, dtype=np.float64)


def dominance_filter(samples):
    """Non-dominated subset (stable order) and the dominated count."""
    L = _losses_of(samples)
    n = L.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        if not keep[i]:
            continue
        dominated = np.all(L[i] <= L, axis=1) & np.any(L[i] < L, axis=1)
        dominated[i] = False
        keep &= ~dominated
    kept = [samples[i] for i in range(n) if keep[i]]
    return kept, int(n - keep.sum())


def hypervolume_2d(samples, reference=HV_REFERENCE) -> float:
    """Area dominated by the sample set up to the reference point,
    computed by sort-and-sweep over the non-dominated subset."""
    L = _losses_of(samples)
    if L.shape[1] != 2:
        raise ValueError("hypervolume_2d needs exactly 2 objectives")
    reference = np.asarray(reference, dtype=np.float64)
    inside = np.all(L <= reference, axis=1)
    if not np.all(inside):
        log.warning("hypervolume: excluded %d samples beyond the reference point",
                    int((~inside).sum()))
    L = L[inside]
    if L.shape[0] == 0:
        return 0.0
    nd, _ = dominance_filter(L)
    nd = np.unique(np.asarray(nd), axis=0)  # sorted by f1 ascending
    area = 0.0
    for i, (f1, f2) in enumerate(nd):
        next_f1 = nd[i + 1][0] if i + 1 < len(nd) else reference[0]
        area += (next_f1 - f1) * (reference[1] - f2)
    return float(area)


def front_distance(samples, oracle: np.ndarray) -> tuple[float, float]:
    """(mean distance of samples to the oracle front, max distance of
    oracle points to the nearest sample)."""
    L = _losses_of(samples)
    oracle = np.asarray(oracle, dtype=np.float64)
    if L.shape[0] == 0 or oracle.shape[0] == 0:
        raise ValueError("need nonempty sample and oracle sets")
    d = np.linalg.norm(L[:, None, :] - oracle[None, :, :], axis=2)
    return float(d.min(axis=1).mean()), float(d.min(axis=0).max())


def compliance_reference_grid(
    m: int, count: int = COMPLIANCE_GRID_SIZE, seed: int = COMPLIANCE_GRID_SEED
) -> np.ndarray:
    """Fixed seeded unit-vector grid used by region_compliance, so the
    metric is stable across runs."""
    rng = np.random.default_rng(seed)
    raw = rng.dirichlet(np.ones(m), size=count)
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def region_compliance(samples: list[FrontSample], eval_references: np.ndarray) -> float:
    """Fraction of samples whose loss vector is closest in angle (largest
    inner product) to its own preference rather than to any grid vector.
    Grid vectors within 1e-6 of the preference are ignored; ties count as
    compliant."""
    refs = np.asarray(eval_references, dtype=np.float64)
    hits = 0
    for s in samples:
        p = s.p.values / np.linalg.norm(s.p.values)
        distinct = refs[np.linalg.norm(refs - p, axis=1) > 1e-6]
        own = float(p @ s.losses)
        if distinct.size == 0 or own >= np.max(distinct @ s.losses):
            hits += 1
    return hits / len(samples) if samples else 0.0


def compute_metrics(
    samples: list[FrontSample],
    problem,
    reference=HV_REFERENCE,
) -> FrontMetrics:
    L = _losses_of(samples)
    oracle = problem.oracle_front(ORACLE_SAMPLES)
    mean_d, max_gap = front_distance(L, oracle)
    _, dominated = dominance_filter(samples)
    refs = compliance_reference_grid(problem.m)
    return FrontMetrics(
        hypervolume=hypervolume_2d(L, reference) if problem.m == 2 else float("nan"),
        mean_oracle_distance=mean_d,
        max_oracle_gap=max_gap,
        region_compliance_rate=region_compliance(samples, refs),
        dominated_count=dominated,
    )


def write_front_csv(path, samples: list[FrontSample]):
    """CSV export: header p_1..p_m,f_1..f_m, 17-significant-digit reals."""
    m = samples[0].p.m
    header = ",".join([f"p_{i+1}" for i in range(m)] + [f"f_{i+1}" for i in range(m)])
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for s in samples:
            row = [f"{v:.17g}" for v in s.p.values] + [f"{v:.17g}" for v in s.losses]
            fh.write(",".join(row) + "\n")


def format_metrics(metrics: FrontMetrics) -> str:
    """Flat key-value text document, one ``name value`` pair per line."""
    lines = []
    for key, value in metrics.to_dict().items():
        if isinstance(value, float):
            lines.append(f"{key} {value:.17g}")
        else:
            lines.append(f"{key} {value}")
    return "\n".join(lines) + "\n"
