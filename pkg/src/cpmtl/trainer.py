"""End-to-end training loop for the solution generator.

Each step: sample preference(s) (and reference vectors in constrained
single-preference mode), push them through the generator, evaluate per-task
losses and gradients on the problem, pull the gradients back to the
trainable vector, combine them into one update direction, and hand that
direction to the optimizer as if it were a gradient. Critical steps
(direction norm below the criticality threshold) skip the update entirely,
including optimizer moment updates.

In constrained mode, a solution sitting outside its preference region
beyond the restoration margin gets a restoration step (descend only the
violated constraints) instead of the joint min-norm step: at front points
the task gradients become collinear and the joint QP direction vanishes,
so without restoration the generated manifold cannot slide along the front
into its regions.

The whole loop is deterministic given (config, problem, seed); the rng
state, optimizer moments, and step counter all round-trip through the
checkpoint so a resumed run reproduces an uninterrupted one exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .checkpoint import Checkpoint, save_checkpoint
from .descent import (
    batched_direction,
    batched_restoration_direction,
    constrained_direction,
    linear_direction,
    restoration_direction,
)
from .hypergen import (
    GeneratorSpec,
    default_generator_spec,
    generate,
    init_generator_params,
    pullback_grad,
)
from .numerics import ParamVector
from .preferences import (
    PreferenceVector,
    RegionSpec,
    SamplerConfig,
    sample_preference,
    sample_references,
)

__all__ = ["TrainingConfig", "TrainingDiverged", "StepReport", "TrainState", "train", "format_log_record"]


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainingConfig:
    mode: str = "constrained"  # "linear" | "constrained"
    steps: int = 10000
    learning_rate: float = 3e-4
    optimizer: str = "adam"  # "adam" | "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    reference_count: int = 8
    batch_preferences: int = 1
    activation_slack: float = 1e-3
    criticality: float = 1e-4
    restoration_margin: float = 1e-5
    data_batch: int = 128
    seed: int = 1
    checkpoint_every: int = 0  # 0: final checkpoint only

    def __post_init__(self):
        if self.mode not in ("linear", "constrained"):
            raise ValueError(f"unknown training mode {self.mode!r}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.reference_count < 0:
            raise ValueError("reference count must be >= 0")
        if self.batch_preferences < 1:
            raise ValueError("batch_preferences must be >= 1")

    @property
    def preference_mode(self) -> str:
        return "simplex" if self.mode == "linear" else "sphere"

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "TrainingConfig":
        return TrainingConfig(**d)


@dataclass
class StepReport:
    step: int
    mode: str
    preferences: np.ndarray  # (K, m)
    losses: np.ndarray  # (K, m)
    direction_norm: float
    critical: bool
    restored: bool = False


def format_log_record(report: StepReport) -> str:
    """One training-log line: step, mode, preferences, losses, direction
    norm, critical flag; fixed field order, 17-significant-digit reals."""
    fields = [str(report.step), report.mode]
    fields += [f"{v:.17g}" for v in report.preferences.ravel()]
    fields += [f"{v:.17g}" for v in report.losses.ravel()]
    fields.append(f"{report.direction_norm:.17g}")
    fields.append("1" if report.critical else "0")
    return " ".join(fields)


class _Adam:
    def __init__(self, cfg: TrainingConfig, dim: int):
        self.cfg = cfg
        self.m = np.zeros(dim)
        self.v = np.zeros(dim)
        self.t = 0

    def update(self, direction: np.ndarray) -> np.ndarray:
        c = self.cfg
        self.t += 1
        self.m = c.beta1 * self.m + (1.0 - c.beta1) * direction
        self.v = c.beta2 * self.v + (1.0 - c.beta2) * direction**2
        m_hat = self.m / (1.0 - c.beta1**self.t)
        v_hat = self.v / (1.0 - c.beta2**self.t)
        return c.learning_rate * m_hat / (np.sqrt(v_hat) + c.eps_adam)

    def state(self) -> dict:
        return {"adam_m": self.m, "adam_v": self.v, "adam_t": self.t}

    def load(self, state: dict):
        self.m = np.array(state["adam_m"])
        self.v = np.array(state["adam_v"])
        self.t = int(state["adam_t"])


class _SGD:
    def __init__(self, cfg: TrainingConfig, dim: int):
        self.cfg = cfg

    def update(self, direction: np.ndarray) -> np.ndarray:
        return self.cfg.learning_rate * direction

    def state(self) -> dict:
        return {}

    def load(self, state: dict):
        pass


@dataclass
class TrainState:
    spec: GeneratorSpec
    params: ParamVector
    problem: object
    cfg: TrainingConfig
    rng: np.random.Generator
    optimizer: object
    step: int = 0
    critical_steps: int = 0

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            spec=self.spec,
            params=self.params.copy(),
            problem=self.problem.descriptor,
            preference_mode=self.cfg.preference_mode,
            config=self.cfg.to_dict(),
            step=self.step,
            rng_state=self.rng.bit_generator.state,
            optimizer_state=self.optimizer.state(),
        )


def init_train_state(
    cfg: TrainingConfig, problem, generator_spec: GeneratorSpec | None = None
) -> TrainState:
    spec = generator_spec or default_generator_spec(problem)
    if spec.theta_dim != problem.theta_dim:
        raise ValueError(
            f"generator emits {spec.theta_dim} parameters, "
            f"problem expects {problem.theta_dim}"
        )
    rng = np.random.default_rng(cfg.seed)
    params = init_generator_params(spec, rng)
    opt_cls = _Adam if cfg.optimizer == "adam" else _SGD
    return TrainState(
        spec=spec,
        params=params,
        problem=problem,
        cfg=cfg,
        rng=rng,
        optimizer=opt_cls(cfg, params.size),
    )


def resume_train_state(ckpt: Checkpoint, problem=None) -> TrainState:
    from .objectives import problem_from_descriptor

    cfg = TrainingConfig.from_dict(ckpt.config)
    if problem is None:
        problem = problem_from_descriptor(ckpt.problem)
    rng = np.random.default_rng()
    rng.bit_generator.state = ckpt.rng_state
    opt_cls = _Adam if cfg.optimizer == "adam" else _SGD
    optimizer = opt_cls(cfg, ckpt.params.size)
    optimizer.load(ckpt.optimizer_state)
    return TrainState(
        spec=ckpt.spec,
        params=ckpt.params.copy(),
        problem=problem,
        cfg=cfg,
        rng=rng,
        optimizer=optimizer,
        step=ckpt.step,
    )


def _data_batch(state: TrainState):
    problem = state.problem
    if not hasattr(problem, "n_points"):
        return None
    size = min(state.cfg.data_batch, problem.n_points)
    return state.rng.choice(problem.n_points, size=size, replace=False)


def train_step(state: TrainState) -> StepReport:
    cfg = state.cfg
    problem = state.problem
    m = problem.m
    sampler = SamplerConfig(
        preference_distribution=(
            "uniform-simplex" if cfg.preference_mode == "simplex" else "uniform-sphere-orthant"
        ),
        reference_count=cfg.reference_count,
    )
    prefs = [sample_preference(m, sampler, state.rng) for _ in range(cfg.batch_preferences)]
    batch = _data_batch(state)

    losses = np.zeros((len(prefs), m))
    grads = []
    for k, p in enumerate(prefs):
        theta = generate(state.spec, state.params, p).theta
        L = problem.losses(theta, batch)
        if not np.all(np.isfinite(L)):
            raise TrainingDiverged(
                f"non-finite loss at step {state.step} for preference {p.values}"
            )
        losses[k] = L
        theta_grads = problem.loss_grads(theta, batch)
        grads.append(pullback_grad(state.spec, state.params, p, theta_grads))
    grads = np.asarray(grads)  # (K, m, dim)

    restored = False
    if cfg.batch_preferences > 1:
        direction = None
        if cfg.mode == "constrained":
            direction = batched_restoration_direction(
                prefs,
                losses,
                grads,
                margin=cfg.restoration_margin,
                delta=cfg.criticality,
            )
            restored = direction is not None
        if direction is None:
            direction = batched_direction(
                prefs,
                losses,
                grads,
                mode=cfg.mode,
                eps=cfg.activation_slack,
                delta=cfg.criticality,
            )
    elif cfg.mode == "linear":
        direction = linear_direction(prefs[0], grads[0])
    else:
        refs = sample_references(m, sampler, state.rng, prefs[0])
        region = RegionSpec(prefs[0], refs)
        direction = restoration_direction(
            region,
            losses[0],
            grads[0],
            margin=cfg.restoration_margin,
            delta=cfg.criticality,
        )
        restored = direction is not None
        if direction is None:
            direction = constrained_direction(
                region,
                losses[0],
                grads[0],
                eps=cfg.activation_slack,
                delta=cfg.criticality,
            )

    state.step += 1
    if direction.is_critical:
        state.critical_steps += 1
    else:
        state.params.data -= state.optimizer.update(direction.d)
    return StepReport(
        step=state.step,
        mode=cfg.mode,
        preferences=np.stack([p.values for p in prefs]),
        losses=losses,
        direction_norm=float(np.linalg.norm(direction.d)),
        critical=direction.is_critical,
        restored=restored,
    )


def train(
    cfg: TrainingConfig,
    problem,
    generator_spec: GeneratorSpec | None = None,
    resume_from: Checkpoint | None = None,
    checkpoint_path=None,
    log_sink=None,
):
    """Run the training loop for ``cfg.steps`` total steps.

    Returns (checkpoint, reports). ``log_sink``, if given, receives one
    formatted log line per step. With ``checkpoint_path`` and
    ``cfg.checkpoint_every`` set, periodic checkpoints are written in place.
    """
    if resume_from is not None:
        state = resume_train_state(resume_from, problem)
    else:
        state = init_train_state(cfg, problem, generator_spec)
    reports = []
    while state.step < cfg.steps:
        report = train_step(state)
        reports.append(report)
        if log_sink is not None:
            log_sink(format_log_record(report))
        if (
            checkpoint_path
            and cfg.checkpoint_every
            and state.step % cfg.checkpoint_every == 0
        ):
            save_checkpoint(state.checkpoint(), checkpoint_path)
    ckpt = state.checkpoint()
    if checkpoint_path:
        save_checkpoint(ckpt, checkpoint_path)
    return ckpt, reports
