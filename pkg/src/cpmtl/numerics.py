"""Dense MLP arithmetic: flat parameter vectors, forward/backward passes,
and a central finite-difference oracle.

Everything here is float64 and pure: no hidden state, no in-place surprises.
Backward passes are written by hand (one pass per scalar objective) so that
the finite-difference check in the test suite stays a genuinely independent
oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "ShapeError",
    "NonFiniteError",
    "Segment",
    "ParamVector",
    "MLPSpec",
    "GradResult",
    "mlp_layout",
    "init_mlp_params",
    "mlp_forward",
    "mlp_grad",
    "finite_diff_grad",
]


class ShapeError(ValueError):
    """Raised when a tensor/segment shape does not match its declaration."""


class NonFiniteError(FloatingPointError):
    """Raised when a NaN/inf shows up in a forward or backward pass."""


class Segment(NamedTuple):
    name: str
    offset: int
    shape: tuple[int, ...]

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))


@dataclass
class ParamVector:
    """A flat float64 vector plus a segment table mapping names to shapes.

    Segments must be disjoint, ascending, and cover the data exactly.
    """

    data: np.ndarray
    segments: tuple[Segment, ...]

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64).ravel()
        self.segments = tuple(
            Segment(s[0], int(s[1]), tuple(int(d) for d in s[2])) for s in self.segments
        )
        expected = 0
        for seg in self.segments:
            if seg.offset != expected:
                raise ShapeError(
                    f"segment {seg.name!r}: offset {seg.offset}, expected {expected}"
                )
            expected += seg.size
        if expected != self.data.size:
            raise ShapeError(
                f"segment table covers {expected} entries, data has {self.data.size}"
            )
        self._index = {seg.name: seg for seg in self.segments}

    @property
    def size(self) -> int:
        return self.data.size

    def names(self) -> list[str]:
        return [seg.name for seg in self.segments]

    def view(self, name: str) -> np.ndarray:
        """A writable view of one named segment, reshaped to its shape."""
        try:
            seg = self._index[name]
        except KeyError:
            raise ShapeError(f"no segment named {name!r}") from None
        return self.data[seg.offset : seg.offset + seg.size].reshape(seg.shape)

    def subvector(self, prefix: str) -> "ParamVector":
        """A ParamVector over the contiguous run of segments named ``prefix.*``.

        The data is a view, not a copy: writing through the subvector writes
        into this vector.
        """
        chosen = [s for s in self.segments if s.name.startswith(prefix + ".")]
        if not chosen:
            raise ShapeError(f"no segments with prefix {prefix!r}")
        start = chosen[0].offset
        end = chosen[-1].offset + chosen[-1].size
        if end - start != sum(s.size for s in chosen):
            raise ShapeError(f"segments with prefix {prefix!r} are not contiguous")
        segs = tuple(
            Segment(s.name[len(prefix) + 1 :], s.offset - start, s.shape) for s in chosen
        )
        return ParamVector(self.data[start:end], segs)

    def copy(self) -> "ParamVector":
        return ParamVector(self.data.copy(), self.segments)

    def zeros_like(self) -> "ParamVector":
        return ParamVector(np.zeros_like(self.data), self.segments)

    @staticmethod
    def from_views(segments: Sequence[tuple[str, np.ndarray]]) -> "ParamVector":
        """Build a vector by concatenating named arrays in order."""
        segs = []
        chunks = []
        offset = 0
        for name, arr in segments:
            arr = np.asarray(arr, dtype=np.float64)
            segs.append(Segment(name, offset, arr.shape))
            chunks.append(arr.ravel())
            offset += arr.size
        data = np.concatenate(chunks) if chunks else np.zeros(0)
        return ParamVector(data, tuple(segs))


_ACTIVATIONS = {"tanh", "relu", "identity"}


@dataclass(frozen=True)
class MLPSpec:
    """Feed-forward network shape: layer sizes and per-layer activations."""

    layer_sizes: tuple[int, ...]
    activations: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        object.__setattr__(self, "activations", tuple(self.activations))
        if len(self.layer_sizes) < 2:
            raise ShapeError("MLPSpec needs at least an input and an output layer")
        if any(n <= 0 for n in self.layer_sizes):
            raise ShapeError(f"layer sizes must be positive, got {self.layer_sizes}")
        if len(self.activations) != len(self.layer_sizes) - 1:
            raise ShapeError(
                f"{len(self.layer_sizes) - 1} layers but "
                f"{len(self.activations)} activations"
            )
        for act in self.activations:
            if act not in _ACTIVATIONS:
                raise ShapeError(f"unknown activation {act!r}")

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    @property
    def in_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_size(self) -> int:
        return self.layer_sizes[-1]

    @property
    def param_count(self) -> int:
        return sum(
            self.layer_sizes[l + 1] * self.layer_sizes[l] + self.layer_sizes[l + 1]
            for l in range(self.n_layers)
        )

    def to_dict(self) -> dict:
        return {"layer_sizes": list(self.layer_sizes), "activations": list(self.activations)}

    @staticmethod
    def from_dict(d: dict) -> "MLPSpec":
        return MLPSpec(tuple(d["layer_sizes"]), tuple(d["activations"]))


@dataclass
class GradResult:
    value: np.ndarray
    param_grad: ParamVector
    input_grad: np.ndarray | None = None


def mlp_layout(spec: MLPSpec) -> tuple[Segment, ...]:
    """The canonical segment table (W0, b0, W1, b1, ...) for an MLP."""
    segs = []
    offset = 0
    for l in range(spec.n_layers):
        fan_out, fan_in = spec.layer_sizes[l + 1], spec.layer_sizes[l]
        segs.append(Segment(f"W{l}", offset, (fan_out, fan_in)))
        offset += fan_out * fan_in
        segs.append(Segment(f"b{l}", offset, (fan_out,)))
        offset += fan_out
    return tuple(segs)


def init_mlp_params(
    spec: MLPSpec, rng: np.random.Generator, out_scale: float = 1.0
) -> ParamVector:
    """Gaussian init scaled by 1/sqrt(fan-in); biases zero.

    ``out_scale`` additionally multiplies the last layer's weights, used to
    keep hypernetwork output heads small at the start of training.
    """
    params = ParamVector(np.zeros(spec.param_count), mlp_layout(spec))
    for l in range(spec.n_layers):
        fan_in = spec.layer_sizes[l]
        scale = 1.0 / np.sqrt(fan_in)
        if l == spec.n_layers - 1:
            scale *= out_scale
        params.view(f"W{l}")[...] = rng.standard_normal(params.view(f"W{l}").shape) * scale
    return params


def _check_params(spec: MLPSpec, params: ParamVector):
    expected = mlp_layout(spec)
    if params.segments != expected:
        for seg, want in zip(params.segments, expected):
            if seg != want:
                raise ShapeError(
                    f"segment {seg.name!r}: got {seg}, expected {want}"
                )
        raise ShapeError(
            f"segment table has {len(params.segments)} entries, "
            f"expected {len(expected)}"
        )


def _apply_act(kind: str, z: np.ndarray) -> np.ndarray:
    if kind == "tanh":
        return np.tanh(z)
    if kind == "relu":
        return np.maximum(z, 0.0)
    return z


def _act_deriv(kind: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if kind == "tanh":
        return 1.0 - a * a
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    return np.ones_like(z)


def _forward_trace(spec: MLPSpec, params: ParamVector, x: np.ndarray):
    """Forward pass keeping pre-activations and activations for backprop.

    ``x`` may be a single input vector or a (batch, features) matrix.
    """
    x = np.asarray(x, dtype=np.float64)
    batched = x.ndim == 2
    if x.shape[-1] != spec.in_size:
        raise ShapeError(
            f"input has {x.shape[-1]} features, spec expects {spec.in_size}"
        )
    a = x
    zs, acts = [], [a]
    for l in range(spec.n_layers):
        W = params.view(f"W{l}")
        b = params.view(f"b{l}")
        z = (a @ W.T + b) if batched else (W @ a + b)
        a = _apply_act(spec.activations[l], z)
        if not np.all(np.isfinite(a)):
            raise NonFiniteError(f"non-finite value after layer {l}")
        zs.append(z)
        acts.append(a)
    return zs, acts


def mlp_forward(spec: MLPSpec, params: ParamVector, x: np.ndarray) -> np.ndarray:
    """Evaluate the network. Accepts a vector or a (batch, features) matrix."""
    _check_params(spec, params)
    _, acts = _forward_trace(spec, params, x)
    return acts[-1]


def mlp_grad(
    spec: MLPSpec, params: ParamVector, x: np.ndarray, upstream: np.ndarray
) -> GradResult:
    """Reverse-mode gradient of ``upstream . output`` w.r.t. params and input.

    For batched input, ``upstream`` has the same leading batch dimension and
    the parameter gradient is summed over the batch.
    """
    _check_params(spec, params)
    x = np.asarray(x, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    batched = x.ndim == 2
    if upstream.shape != ((x.shape[0], spec.out_size) if batched else (spec.out_size,)):
        raise ShapeError(
            f"upstream shape {upstream.shape} does not match output size {spec.out_size}"
        )
    zs, acts = _forward_trace(spec, params, x)

    grad = ParamVector(np.zeros(spec.param_count), mlp_layout(spec))
    delta = upstream
    for l in reversed(range(spec.n_layers)):
        delta = delta * _act_deriv(spec.activations[l], zs[l], acts[l + 1])
        if not np.all(np.isfinite(delta)):
            raise NonFiniteError(f"non-finite gradient at layer {l}")
        a_prev = acts[l]
        if batched:
            grad.view(f"W{l}")[...] = delta.T @ a_prev
            grad.view(f"b{l}")[...] = delta.sum(axis=0)
            delta = delta @ params.view(f"W{l}")
        else:
            grad.view(f"W{l}")[...] = np.outer(delta, a_prev)
            grad.view(f"b{l}")[...] = delta
            delta = params.view(f"W{l}").T @ delta
    return GradResult(value=acts[-1], param_grad=grad, input_grad=delta)


def finite_diff_grad(
    f: Callable[[ParamVector], float], at: ParamVector, h: float = 1e-6
) -> ParamVector:
    """Central finite differences of a scalar function, one coordinate at a time."""
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    work = at.copy()
    grad = at.zeros_like()
    for i in range(work.size):
        orig = work.data[i]
        work.data[i] = orig + h
        f_plus = float(f(work))
        work.data[i] = orig - h
        f_minus = float(f(work))
        work.data[i] = orig
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NonFiniteError(f"non-finite function value at coordinate {i}")
        grad.data[i] = (f_plus - f_minus) / (2.0 * h)
    return grad
