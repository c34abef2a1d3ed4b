"""The preference-to-solution generator.

Two modes share one interface:

* ``direct`` -- one MLP maps the preference (or its embedding) straight to a
  solution vector for a low-dimensional problem.
* ``hyper-main`` -- the MLP emits the parameters of a main network instead,
  optionally in fixed-size chunks indexed by trainable chunk embeddings, and
  optionally leaving some main-net segments "shared": owned directly by the
  trainable vector and identical across all preferences.

All trainable state (hypernetwork weights, shared main-net segments, the
preference embedding table, chunk embeddings) lives in a single flat
ParamVector so the optimizer and the checkpoint format see one vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import (
    MLPSpec,
    ParamVector,
    Segment,
    ShapeError,
    init_mlp_params,
    mlp_forward,
    mlp_grad,
    mlp_layout,
)
from .preferences import EmbeddingTable, PreferenceVector, embed

__all__ = [
    "ChunkingSpec",
    "GeneratorSpec",
    "GeneratedParams",
    "generator_layout",
    "init_generator_params",
    "generate",
    "pullback_grad",
    "front_sweep_generate",
    "default_generator_spec",
]


@dataclass(frozen=True)
class ChunkingSpec:
    chunk_size: int
    chunk_embedding_dim: int

    def __post_init__(self):
        if self.chunk_size < 1 or self.chunk_embedding_dim < 1:
            raise ValueError("chunk size and embedding dim must be positive")

    def to_dict(self) -> dict:
        return {"chunk_size": self.chunk_size, "chunk_embedding_dim": self.chunk_embedding_dim}


@dataclass(frozen=True)
class GeneratorSpec:
    mode: str  # "direct" | "hyper-main"
    m: int
    input_mode: str = "raw"  # "raw" | "embedded"
    embed_dim: int = 0
    hyper_spec: MLPSpec | None = None
    main_spec: MLPSpec | None = None
    chunking: ChunkingSpec | None = None
    shared_partition: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in ("direct", "hyper-main"):
            raise ValueError(f"unknown generator mode {self.mode!r}")
        if self.input_mode not in ("raw", "embedded"):
            raise ValueError(f"unknown input mode {self.input_mode!r}")
        if self.input_mode == "embedded" and self.embed_dim < 1:
            raise ValueError("embedded input needs embed_dim >= 1")
        if self.hyper_spec is None:
            raise ValueError("hyper_spec is required")
        base = self.m if self.input_mode == "raw" else self.embed_dim
        expect_in = base + (self.chunking.chunk_embedding_dim if self.chunking else 0)
        if self.hyper_spec.in_size != expect_in:
            raise ShapeError(
                f"hyper input size {self.hyper_spec.in_size}, expected {expect_in}"
            )
        if self.mode == "direct":
            if self.main_spec is not None or self.shared_partition:
                raise ValueError("direct mode has no main network")
            if self.chunking is not None:
                raise ValueError("chunking only applies to hyper-main mode")
        else:
            if self.main_spec is None:
                raise ValueError("hyper-main mode needs main_spec")
            for name in self.shared_partition:
                if name not in {s.name for s in mlp_layout(self.main_spec)}:
                    raise ShapeError(f"shared segment {name!r} not in main network")
        out = self.hyper_spec.out_size
        if self.chunking:
            if out != self.chunking.chunk_size:
                raise ShapeError(
                    f"chunked hyper output {out} != chunk size {self.chunking.chunk_size}"
                )
            if self.n_chunks * out < self.generated_count:
                raise ShapeError("chunk grid does not cover the generated parameters")
        elif out != self.generated_count:
            raise ShapeError(
                f"hyper output {out} != generated parameter count {self.generated_count}"
            )

    @property
    def generated_segments(self) -> tuple[Segment, ...]:
        """Main-net segments the hypernetwork emits (direct mode: one blob)."""
        if self.mode == "direct":
            return (Segment("theta", 0, (self.hyper_spec.out_size,)),)
        segs, offset = [], 0
        for seg in mlp_layout(self.main_spec):
            if seg.name in self.shared_partition:
                continue
            segs.append(Segment(seg.name, offset, seg.shape))
            offset += seg.size
        return tuple(segs)

    @property
    def generated_count(self) -> int:
        if self.mode == "direct":
            return self.hyper_spec.out_size
        return sum(s.size for s in self.generated_segments)

    @property
    def n_chunks(self) -> int:
        if not self.chunking:
            return 1
        return math.ceil(self.generated_count / self.chunking.chunk_size)

    @property
    def theta_dim(self) -> int:
        if self.mode == "direct":
            return self.hyper_spec.out_size
        return self.main_spec.param_count

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "m": self.m,
            "input_mode": self.input_mode,
            "embed_dim": self.embed_dim,
            "hyper_spec": self.hyper_spec.to_dict(),
            "main_spec": self.main_spec.to_dict() if self.main_spec else None,
            "chunking": self.chunking.to_dict() if self.chunking else None,
            "shared_partition": list(self.shared_partition),
        }

    @staticmethod
    def from_dict(d: dict) -> "GeneratorSpec":
        return GeneratorSpec(
            mode=d["mode"],
            m=d["m"],
            input_mode=d["input_mode"],
            embed_dim=d["embed_dim"],
            hyper_spec=MLPSpec.from_dict(d["hyper_spec"]),
            main_spec=MLPSpec.from_dict(d["main_spec"]) if d.get("main_spec") else None,
            chunking=ChunkingSpec(**d["chunking"]) if d.get("chunking") else None,
            shared_partition=tuple(d.get("shared_partition", ())),
        )


@dataclass
class GeneratedParams:
    theta: np.ndarray
    source_preference: PreferenceVector


def generator_layout(spec: GeneratorSpec) -> tuple[Segment, ...]:
    """Segment table for the full trainable vector: hypernetwork weights
    first (contiguous), then shared main-net segments, then embeddings."""
    segs = []
    offset = 0
    for s in mlp_layout(spec.hyper_spec):
        segs.append(Segment(f"hyper.{s.name}", offset, s.shape))
        offset += s.size
    if spec.mode == "hyper-main":
        for s in mlp_layout(spec.main_spec):
            if s.name in spec.shared_partition:
                segs.append(Segment(f"shared.{s.name}", offset, s.shape))
                offset += s.size
    if spec.input_mode == "embedded":
        segs.append(Segment("embed", offset, (spec.m, spec.embed_dim)))
        offset += spec.m * spec.embed_dim
    if spec.chunking:
        shape = (spec.n_chunks, spec.chunking.chunk_embedding_dim)
        segs.append(Segment("chunk_embed", offset, shape))
        offset += shape[0] * shape[1]
    return tuple(segs)


def init_generator_params(spec: GeneratorSpec, rng: np.random.Generator) -> ParamVector:
    """Seeded init: fan-in-scaled hypernetwork (output head x0.1 when it
    emits main-net weights), fan-in init for shared segments, unit-scale
    preference embeddings, 0.1-scale chunk embeddings.

    In direct mode the first layer is initialized with a x5 gain: the
    produced solutions then vary visibly with the preference from step one,
    so training refines an already-spread manifold instead of having to
    pull one collapsed point apart.
    """
    layout = generator_layout(spec)
    params = ParamVector(np.zeros(sum(s.size for s in layout)), layout)
    out_scale = 0.1 if spec.mode == "hyper-main" else 1.0
    hyper = init_mlp_params(spec.hyper_spec, rng, out_scale=out_scale)
    params.subvector("hyper").data[...] = hyper.data
    if spec.mode == "direct":
        params.view("hyper.W0")[...] *= 5.0
    if spec.mode == "hyper-main":
        for s in mlp_layout(spec.main_spec):
            if s.name in spec.shared_partition and s.name.startswith("W"):
                fan_in = s.shape[1]
                params.view(f"shared.{s.name}")[...] = (
                    rng.standard_normal(s.shape) / np.sqrt(fan_in)
                )
    if spec.input_mode == "embedded":
        params.view("embed")[...] = rng.standard_normal((spec.m, spec.embed_dim))
    if spec.chunking:
        shape = (spec.n_chunks, spec.chunking.chunk_embedding_dim)
        params.view("chunk_embed")[...] = rng.standard_normal(shape) * 0.1
    return params


def _base_input(spec: GeneratorSpec, params: ParamVector, p: PreferenceVector) -> np.ndarray:
    if p.m != spec.m:
        raise ShapeError(f"preference has {p.m} tasks, generator expects {spec.m}")
    if spec.input_mode == "raw":
        return p.values
    return embed(p, EmbeddingTable(params.view("embed")))


def _hyper_output(spec: GeneratorSpec, params: ParamVector, base: np.ndarray) -> np.ndarray:
    hyper = params.subvector("hyper")
    if not spec.chunking:
        return mlp_forward(spec.hyper_spec, hyper, base)
    ce = params.view("chunk_embed")
    inputs = np.concatenate(
        [np.broadcast_to(base, (spec.n_chunks, base.size)), ce], axis=1
    )
    out = mlp_forward(spec.hyper_spec, hyper, inputs)
    return out.ravel()[: spec.generated_count]


def generate(spec: GeneratorSpec, params: ParamVector, p: PreferenceVector) -> GeneratedParams:
    """Map one preference to solution/main-network parameters."""
    base = _base_input(spec, params, p)
    out = _hyper_output(spec, params, base)
    if spec.mode == "direct":
        return GeneratedParams(theta=out, source_preference=p)
    theta = ParamVector(np.zeros(spec.main_spec.param_count), mlp_layout(spec.main_spec))
    for seg in spec.generated_segments:
        theta.view(seg.name)[...] = out[seg.offset : seg.offset + seg.size].reshape(seg.shape)
    for name in spec.shared_partition:
        theta.view(name)[...] = params.view(f"shared.{name}")
    return GeneratedParams(theta=theta.data, source_preference=p)


def pullback_grad(
    spec: GeneratorSpec,
    params: ParamVector,
    p: PreferenceVector,
    theta_grads: np.ndarray,
) -> np.ndarray:
    """Chain per-task solution-space gradients back to the trainable vector.

    ``theta_grads`` is (m, theta_dim); returns (m, len(params)). Gradients
    for shared segments route directly to their own slots; gradients w.r.t.
    the hypernetwork input land on the embedding table (scaled by p) when
    the input is embedded, and are dropped when the raw preference is the
    input (the preference is not trainable).
    """
    theta_grads = np.asarray(theta_grads, dtype=np.float64)
    if theta_grads.ndim != 2 or theta_grads.shape[1] != spec.theta_dim:
        raise ShapeError(
            f"theta_grads shape {theta_grads.shape}, expected (m, {spec.theta_dim})"
        )
    base = _base_input(spec, params, p)
    hyper = params.subvector("hyper")
    layout = generator_layout(spec)
    total = sum(s.size for s in layout)
    out_grads = np.zeros((theta_grads.shape[0], total))

    main_layout = mlp_layout(spec.main_spec) if spec.mode == "hyper-main" else None

    for i, tg in enumerate(theta_grads):
        phi_grad = ParamVector(out_grads[i], layout)
        # gradient w.r.t. the hypernetwork's flat output
        if spec.mode == "direct":
            up = tg
        else:
            theta_pv = ParamVector(tg.copy(), main_layout)
            up = np.zeros(spec.generated_count)
            for seg in spec.generated_segments:
                up[seg.offset : seg.offset + seg.size] = theta_pv.view(seg.name).ravel()
            for name in spec.shared_partition:
                phi_grad.view(f"shared.{name}")[...] = theta_pv.view(name)
        if not spec.chunking:
            res = mlp_grad(spec.hyper_spec, hyper, base, up)
            phi_grad.subvector("hyper").data[...] = res.param_grad.data
            base_grad = res.input_grad
        else:
            ce = params.view("chunk_embed")
            n_out = spec.chunking.chunk_size
            padded = np.zeros(spec.n_chunks * n_out)
            padded[: up.size] = up
            inputs = np.concatenate(
                [np.broadcast_to(base, (spec.n_chunks, base.size)), ce], axis=1
            )
            res = mlp_grad(spec.hyper_spec, hyper, inputs, padded.reshape(spec.n_chunks, n_out))
            phi_grad.subvector("hyper").data[...] = res.param_grad.data
            base_grad = res.input_grad[:, : base.size].sum(axis=0)
            phi_grad.view("chunk_embed")[...] = res.input_grad[:, base.size :]
        if spec.input_mode == "embedded":
            phi_grad.view("embed")[...] = np.outer(p.values, base_grad)
    return out_grads


def front_sweep_generate(
    spec: GeneratorSpec, params: ParamVector, grid: list[PreferenceVector]
) -> list[GeneratedParams]:
    if not grid:
        raise ValueError("empty preference grid")
    return [generate(spec, params, p) for p in grid]


def default_generator_spec(problem, mode: str = "constrained") -> GeneratorSpec:
    """The stock generator for each built-in problem: a direct 2x64 tanh
    MLP for the synthetic problem, an embedded (q=8) hypernetwork emitting
    the whole 1-16-16-1 main net for the regression problem."""
    if problem.kind == "synthetic":
        return GeneratorSpec(
            mode="direct",
            m=problem.m,
            input_mode="raw",
            hyper_spec=MLPSpec(
                (problem.m, 64, 64, problem.theta_dim), ("tanh", "tanh", "identity")
            ),
        )
    if problem.kind == "regression":
        main = problem.main_spec
        return GeneratorSpec(
            mode="hyper-main",
            m=problem.m,
            input_mode="embedded",
            embed_dim=8,
            hyper_spec=MLPSpec(
                (8, 64, 64, main.param_count), ("tanh", "tanh", "identity")
            ),
            main_spec=main,
        )
    raise ValueError(f"no default generator for problem kind {problem.kind!r}")
