"""Binary checkpoint format.

Layout: 8-byte magic ``CPMTL\\0\\0\\1``, a 4-byte little-endian length,
a UTF-8 JSON header (format version, problem descriptor, generator spec,
preference mode, segment table, payload digest, training config, step, rng
state, optimizer metadata), then the raw little-endian float64 payloads in
header order: the trainable vector followed by any optimizer moment arrays.

Round trips are bit-exact; the digest covers the whole payload. A newer
minor format version loads with a warning; a different major version (or
magic) is rejected.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hypergen import GeneratorSpec, generator_layout
from .numerics import ParamVector
from .objectives import ProblemDescriptor

__all__ = [
    "Checkpoint",
    "CheckpointError",
    "VersionMismatchError",
    "TruncatedPayloadError",
    "DigestMismatchError",
    "save_checkpoint",
    "load_checkpoint",
]

MAGIC = b"CPMTL\x00\x00\x01"
FORMAT_VERSION = (1, 0)


class CheckpointError(Exception):
    pass


class VersionMismatchError(CheckpointError):
    pass


class TruncatedPayloadError(CheckpointError):
    pass


class DigestMismatchError(CheckpointError):
    pass


@dataclass
class Checkpoint:
    spec: GeneratorSpec
    params: ParamVector
    problem: ProblemDescriptor
    preference_mode: str
    config: dict
    step: int
    rng_state: dict | None = None
    optimizer_state: dict = field(default_factory=dict)  # name -> np.ndarray / scalar
    digest: str = ""
    warnings: list = field(default_factory=list)


def _payload_arrays(ckpt: Checkpoint) -> list[tuple[str, np.ndarray]]:
    arrays = [("params", ckpt.params.data)]
    for name in sorted(ckpt.optimizer_state):
        value = ckpt.optimizer_state[name]
        if isinstance(value, np.ndarray):
            arrays.append((f"opt.{name}", value))
    return arrays


def save_checkpoint(ckpt: Checkpoint, path) -> str:
    """Write the checkpoint; returns the payload digest."""
    arrays = _payload_arrays(ckpt)
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for _, a in arrays)
    digest = hashlib.sha256(payload).hexdigest()
    opt_scalars = {
        k: v for k, v in ckpt.optimizer_state.items() if not isinstance(v, np.ndarray)
    }
    header = {
        "format_version": list(FORMAT_VERSION),
        "problem": ckpt.problem.to_dict(),
        "generator_spec": ckpt.spec.to_dict(),
        "preference_mode": ckpt.preference_mode,
        "config": ckpt.config,
        "step": ckpt.step,
        "rng_state": ckpt.rng_state,
        "optimizer_scalars": opt_scalars,
        "payload": [{"name": n, "size": int(a.size)} for n, a in arrays],
        "payload_digest": digest,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(payload)
    ckpt.digest = digest
    return digest


def load_checkpoint(path) -> Checkpoint:
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + 4:
        raise TruncatedPayloadError(f"{path}: file shorter than the fixed header")
    if raw[: len(MAGIC)] != MAGIC:
        raise VersionMismatchError(f"{path}: bad magic {raw[:8]!r}")
    (hlen,) = struct.unpack("<I", raw[len(MAGIC) : len(MAGIC) + 4])
    hstart = len(MAGIC) + 4
    if len(raw) < hstart + hlen:
        raise TruncatedPayloadError(f"{path}: truncated header")
    try:
        header = json.loads(raw[hstart : hstart + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"{path}: unreadable header: {exc}") from exc

    warnings_log = []
    major, minor = header["format_version"]
    if major != FORMAT_VERSION[0]:
        raise VersionMismatchError(
            f"{path}: format major version {major}, supported {FORMAT_VERSION[0]}"
        )
    if minor > FORMAT_VERSION[1]:
        warnings_log.append(
            f"checkpoint written by newer minor format version {major}.{minor}"
        )

    payload = raw[hstart + hlen :]
    expected = sum(entry["size"] for entry in header["payload"]) * 8
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"{path}: payload has {len(payload)} bytes, header declares {expected}"
        )
    payload = payload[:expected]
    digest = hashlib.sha256(payload).hexdigest()
    if digest != header["payload_digest"]:
        raise DigestMismatchError(f"{path}: payload digest mismatch")

    arrays = {}
    offset = 0
    for entry in header["payload"]:
        n = entry["size"]
        arrays[entry["name"]] = np.frombuffer(
            payload, dtype="<f8", count=n, offset=offset * 8
        ).astype(np.float64)
        offset += n

    spec = GeneratorSpec.from_dict(header["generator_spec"])
    params = ParamVector(arrays.pop("params"), generator_layout(spec))
    optimizer_state = dict(header.get("optimizer_scalars", {}))
    for name, arr in arrays.items():
        optimizer_state[name.removeprefix("opt.")] = arr
    return Checkpoint(
        spec=spec,
        params=params,
        problem=ProblemDescriptor.from_dict(header["problem"]),
        preference_mode=header["preference_mode"],
        config=header["config"],
        step=header["step"],
        rng_state=header.get("rng_state"),
        optimizer_state=optimizer_state,
        digest=digest,
        warnings=warnings_log,
    )
