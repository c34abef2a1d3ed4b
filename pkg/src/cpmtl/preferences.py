"""Preference vectors, reference sets, angular regions, and embeddings.

A preference is a nonnegative m-vector normalized either onto the simplex
(weights for linear scalarization) or onto the unit sphere's nonnegative
orthant (directions for the constrained formulation). A region is the set of
loss vectors closer in angle to the preference than to any reference vector;
for unit vectors that reduces to inner-product comparisons, so membership is
a handful of dot products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import ShapeError

__all__ = [
    "PreferenceVector",
    "ReferenceSet",
    "RegionSpec",
    "SamplerConfig",
    "EmbeddingTable",
    "sample_preference",
    "sample_references",
    "constraint_values",
    "in_region",
    "embed",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class PreferenceVector:
    values: np.ndarray
    norm_mode: str  # "simplex" | "sphere"

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=np.float64).ravel()
        )
        if self.norm_mode not in ("simplex", "sphere"):
            raise ValueError(f"unknown norm mode {self.norm_mode!r}")
        if np.any(self.values < 0):
            raise ValueError("preference entries must be nonnegative")
        if self.norm_mode == "simplex":
            if abs(self.values.sum() - 1.0) > _NORM_TOL:
                raise ValueError(f"simplex preference sums to {self.values.sum()}")
        elif abs(np.linalg.norm(self.values) - 1.0) > _NORM_TOL:
            raise ValueError(f"sphere preference has norm {np.linalg.norm(self.values)}")

    @property
    def m(self) -> int:
        return self.values.size

    @staticmethod
    def normalize(raw, norm_mode: str) -> "PreferenceVector":
        """Project a raw nonnegative vector onto the requested normalization."""
        raw = np.asarray(raw, dtype=np.float64).ravel()
        if np.any(raw < 0):
            raise ValueError("preference entries must be nonnegative")
        total = raw.sum() if norm_mode == "simplex" else np.linalg.norm(raw)
        if total <= 0:
            raise ValueError("preference must have at least one positive entry")
        return PreferenceVector(raw / total, norm_mode)


@dataclass(frozen=True)
class ReferenceSet:
    """K unit vectors in the nonnegative orthant."""

    vectors: np.ndarray  # (K, m)

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=np.float64)
        if vecs.ndim != 2:
            vecs = vecs.reshape(0, 0) if vecs.size == 0 else np.atleast_2d(vecs)
        object.__setattr__(self, "vectors", vecs)
        if vecs.size and np.any(np.abs(np.linalg.norm(vecs, axis=1) - 1.0) > _NORM_TOL):
            raise ValueError("reference vectors must be unit length")

    @property
    def K(self) -> int:
        return self.vectors.shape[0]

    @staticmethod
    def empty(m: int) -> "ReferenceSet":
        return ReferenceSet(np.zeros((0, m)))


@dataclass(frozen=True)
class RegionSpec:
    """The angular region around ``p`` carved out by the reference set."""

    p: PreferenceVector
    U: ReferenceSet

    def __post_init__(self):
        if self.p.norm_mode != "sphere":
            raise ValueError("region preference must be sphere-normalized")
        if self.U.K and self.U.vectors.shape[1] != self.p.m:
            raise ShapeError(
                f"references have dim {self.U.vectors.shape[1]}, preference {self.p.m}"
            )


@dataclass(frozen=True)
class SamplerConfig:
    preference_distribution: str = "uniform-sphere-orthant"
    reference_count: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if self.preference_distribution not in (
            "uniform-simplex",
            "uniform-sphere-orthant",
        ):
            raise ValueError(
                f"unknown distribution {self.preference_distribution!r}"
            )
        if self.reference_count < 0:
            raise ValueError("reference_count must be >= 0")

    @property
    def norm_mode(self) -> str:
        return "simplex" if self.preference_distribution == "uniform-simplex" else "sphere"


@dataclass(frozen=True)
class EmbeddingTable:
    """One trainable q-dimensional embedding per task."""

    rows: np.ndarray  # (m, q)
    trainable: bool = True

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] < 1:
            raise ShapeError(f"embedding table must be (m, q), got shape {rows.shape}")
        object.__setattr__(self, "rows", rows)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def q(self) -> int:
        return self.rows.shape[1]


def sample_preference(
    m: int, cfg: SamplerConfig, rng: np.random.Generator
) -> PreferenceVector:
    """Draw one preference: flat Dirichlet on the simplex, L2-renormalized
    for the sphere orthant. Symmetric across coordinates in both modes."""
    raw = rng.dirichlet(np.ones(m))
    if cfg.norm_mode == "simplex":
        return PreferenceVector(raw / raw.sum(), "simplex")
    return PreferenceVector(raw / np.linalg.norm(raw), "sphere")


def sample_references(
    m: int, cfg: SamplerConfig, rng: np.random.Generator, p: PreferenceVector
) -> ReferenceSet:
    """Draw K fresh unit reference vectors, redrawing any that collide with p."""
    vecs = np.zeros((cfg.reference_count, m))
    for j in range(cfg.reference_count):
        while True:
            raw = rng.dirichlet(np.ones(m))
            u = raw / np.linalg.norm(raw)
            if np.linalg.norm(u - p.values) > 1e-9:
                vecs[j] = u
                break
    return ReferenceSet(vecs)


def constraint_values(region: RegionSpec, L: np.ndarray) -> np.ndarray:
    """G_j = (u_j - p) . L for each reference; all G_j <= 0 <=> L in region."""
    L = np.asarray(L, dtype=np.float64).ravel()
    if L.size != region.p.m:
        raise ShapeError(f"loss vector has {L.size} entries, expected {region.p.m}")
    if region.U.K == 0:
        return np.zeros(0)
    return (region.U.vectors - region.p.values) @ L


def in_region(region: RegionSpec, L: np.ndarray) -> bool:
    """True iff p attains the largest inner product with L (ties inclusive).

    The all-zero loss vector is degenerate (every angle undefined) and is
    defined to be in-region.
    """
    return bool(np.all(constraint_values(region, L) <= 0.0))


def embed(p: PreferenceVector, table: EmbeddingTable) -> np.ndarray:
    """The preference embedding sum_i p_i e_i; linear in p."""
    if table.m != p.m:
        raise ShapeError(f"embedding table has {table.m} rows, preference has {p.m}")
    return p.values @ table.rows
