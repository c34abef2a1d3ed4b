"""HTTP serving layer: live preference-conditioned inference.

A process holds exactly one immutable checkpoint snapshot. Three endpoints:

* ``GET /meta`` -- problem identity, task count, preference mode, digest.
* ``POST /infer`` -- normalize a raw preference, generate, evaluate the
  losses on the fixed evaluation batch (the full dataset).
* ``GET /front?samples=N`` -- the sweep used for the UI overlay, cached
  per sample count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .checkpoint import Checkpoint
from .evaluation import sweep_front
from .hypergen import generate
from .objectives import problem_from_descriptor
from .preferences import PreferenceVector

__all__ = ["Snapshot", "create_app"]

FRONT_MIN_SAMPLES = 2
FRONT_MAX_SAMPLES = 2000


class InferRequest(BaseModel):
    preference: list[float]


@dataclass
class Snapshot:
    """Immutable serving state; safe for concurrent readers."""

    ckpt: Checkpoint
    problem: object
    front_cache: dict = field(default_factory=dict)

    @staticmethod
    def from_checkpoint(ckpt: Checkpoint) -> "Snapshot":
        return Snapshot(ckpt=ckpt, problem=problem_from_descriptor(ckpt.problem))

    def infer(self, raw_preference: list[float]) -> dict:
        m = self.problem.m
        if len(raw_preference) != m:
            raise HTTPException(
                status_code=400,
                detail={"field": "preference", "error": f"expected {m} entries"},
            )
        raw = np.asarray(raw_preference, dtype=np.float64)
        if np.any(raw < 0) or not np.any(raw > 0) or not np.all(np.isfinite(raw)):
            raise HTTPException(
                status_code=400,
                detail={
                    "field": "preference",
                    "error": "entries must be nonnegative with at least one positive",
                },
            )
        p = PreferenceVector.normalize(raw, self.ckpt.preference_mode)
        theta = generate(self.ckpt.spec, self.ckpt.params, p).theta
        losses = self.problem.losses(theta)
        return {
            "preference_normalized": p.values.tolist(),
            "losses": losses.tolist(),
            "mode": self.ckpt.preference_mode,
            "checkpoint_digest": self.ckpt.digest,
        }

    def front(self, samples: int) -> dict:
        if samples not in self.front_cache:
            sweep = sweep_front(self.ckpt, samples, self.problem)
            self.front_cache[samples] = {
                "samples": [
                    {"preference": s.p.values.tolist(), "losses": s.losses.tolist()}
                    for s in sweep
                ],
                "checkpoint_digest": self.ckpt.digest,
            }
        return self.front_cache[samples]

    def meta(self) -> dict:
        return {
            "problem": self.problem.kind,
            "m": self.problem.m,
            "preference_mode": self.ckpt.preference_mode,
            "checkpoint_digest": self.ckpt.digest,
            "has_oracle": bool(getattr(self.problem, "has_oracle", False)),
            "oracle_front": (
                self.problem.oracle_front(200).tolist()
                if getattr(self.problem, "has_oracle", False)
                else None
            ),
        }


def create_app(snapshot: Snapshot) -> FastAPI:
    app = FastAPI(title="cpmtl")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/meta")
    def meta():
        return snapshot.meta()

    @app.post("/infer")
    def infer(request: InferRequest):
        return snapshot.infer(request.preference)

    @app.get("/front")
    def front(samples: int = Query(default=200)):
        if not (FRONT_MIN_SAMPLES <= samples <= FRONT_MAX_SAMPLES):
            raise HTTPException(
                status_code=400,
                detail={
                    "field": "samples",
                    "error": f"must be in [{FRONT_MIN_SAMPLES}, {FRONT_MAX_SAMPLES}]",
                },
            )
        return snapshot.front(samples)

    return app
