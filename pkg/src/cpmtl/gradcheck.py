"""Finite-difference verification of the generator gradient pullback.

Covers the full configuration matrix (direct/hyper-main input, raw/embedded
preference, chunked/unchunked output, with/without shared segments) by
probing random directions: the reverse-mode directional derivative of a
random scalarized end-to-end loss must match central finite differences.
"""

from __future__ import annotations

import numpy as np

from .hypergen import (
    ChunkingSpec,
    GeneratorSpec,
    generate,
    init_generator_params,
    pullback_grad,
)
from .numerics import MLPSpec
from .objectives import RegressionProblem, SyntheticProblem
from .preferences import SamplerConfig, sample_preference

__all__ = ["generator_configs", "directional_errors", "run_gradcheck"]


def generator_configs() -> dict[str, tuple[GeneratorSpec, object]]:
    """The 8-entry (spec, problem) matrix exercised by gradcheck."""
    synthetic = SyntheticProblem(n=6)
    regression = RegressionProblem()
    main = regression.main_spec
    n_gen = main.param_count

    def hyper(in_size: int, out_size: int) -> MLPSpec:
        return MLPSpec((in_size, 12, out_size), ("tanh", "identity"))

    shared = ("W0", "b0")
    n_shared_free = n_gen - 16 - 16  # W0 (16x1) and b0 (16) owned directly
    return {
        "direct/raw": (
            GeneratorSpec(mode="direct", m=2, hyper_spec=hyper(2, 6)),
            synthetic,
        ),
        "direct/embedded": (
            GeneratorSpec(
                mode="direct", m=2, input_mode="embedded", embed_dim=5,
                hyper_spec=hyper(5, 6),
            ),
            synthetic,
        ),
        "hyper-main/raw": (
            GeneratorSpec(
                mode="hyper-main", m=2, hyper_spec=hyper(2, n_gen), main_spec=main,
            ),
            regression,
        ),
        "hyper-main/embedded": (
            GeneratorSpec(
                mode="hyper-main", m=2, input_mode="embedded", embed_dim=5,
                hyper_spec=hyper(5, n_gen), main_spec=main,
            ),
            regression,
        ),
        "hyper-main/raw/chunked": (
            GeneratorSpec(
                mode="hyper-main", m=2, hyper_spec=hyper(2 + 4, 64), main_spec=main,
                chunking=ChunkingSpec(chunk_size=64, chunk_embedding_dim=4),
            ),
            regression,
        ),
        "hyper-main/embedded/chunked": (
            GeneratorSpec(
                mode="hyper-main", m=2, input_mode="embedded", embed_dim=5,
                hyper_spec=hyper(5 + 4, 64), main_spec=main,
                chunking=ChunkingSpec(chunk_size=64, chunk_embedding_dim=4),
            ),
            regression,
        ),
        "hyper-main/raw/shared": (
            GeneratorSpec(
                mode="hyper-main", m=2, hyper_spec=hyper(2, n_shared_free),
                main_spec=main, shared_partition=shared,
            ),
            regression,
        ),
        "hyper-main/embedded/chunked/shared": (
            GeneratorSpec(
                mode="hyper-main", m=2, input_mode="embedded", embed_dim=5,
                hyper_spec=hyper(5 + 4, 64), main_spec=main,
                chunking=ChunkingSpec(chunk_size=64, chunk_embedding_dim=4),
                shared_partition=shared,
            ),
            regression,
        ),
    }


def directional_errors(
    spec: GeneratorSpec,
    problem,
    rng: np.random.Generator,
    probes: int,
    h: float = 1e-6,
) -> np.ndarray:
    """Relative errors of reverse-mode vs central-difference directional
    derivatives of a random loss scalarization, one per probe."""
    sampler = SamplerConfig(preference_distribution="uniform-sphere-orthant")
    params = init_generator_params(spec, rng)
    errors = np.empty(probes)
    for k in range(probes):
        p = sample_preference(spec.m, sampler, rng)
        w = rng.dirichlet(np.ones(problem.m))

        def scalar_loss(phi_data: np.ndarray) -> float:
            work = params.copy()
            work.data[...] = phi_data
            theta = generate(spec, work, p).theta
            return float(w @ problem.losses(theta))

        theta = generate(spec, params, p).theta
        theta_grads = problem.loss_grads(theta)
        phi_grads = pullback_grad(spec, params, p, theta_grads)
        analytic_grad = w @ phi_grads

        v = rng.standard_normal(params.size)
        v /= np.linalg.norm(v)
        fd = (scalar_loss(params.data + h * v) - scalar_loss(params.data - h * v)) / (2 * h)
        an = float(analytic_grad @ v)
        denom = max(abs(fd), abs(an))
        errors[k] = 0.0 if denom < 1e-10 else abs(fd - an) / denom
    return errors


def run_gradcheck(seed: int = 0, probes: int = 20, h: float = 1e-6) -> dict[str, float]:
    """Max relative error per configuration."""
    results = {}
    for name, (spec, problem) in generator_configs().items():
        rng = np.random.default_rng(seed)
        results[name] = float(directional_errors(spec, problem, rng, probes, h).max())
    return results
