"""Command-line entry points: train, sweep, eval, gradcheck, serve.

Exit codes: 0 on success, 2 on usage errors (argparse), 1 on runtime
failures.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .checkpoint import CheckpointError, load_checkpoint
from .evaluation import compute_metrics, format_metrics, sweep_front, write_front_csv
from .objectives import RegressionProblem, SyntheticProblem, problem_from_descriptor
from .trainer import TrainingConfig, TrainingDiverged, train

__all__ = ["main", "run_cli"]


def _make_problem(name: str, data_seed: int = 0):
    if name == "synthetic":
        return SyntheticProblem()
    if name == "regression":
        return RegressionProblem(data_seed=data_seed)
    raise ValueError(f"unknown problem {name!r}")


def _cmd_train(args) -> int:
    cfg = TrainingConfig(
        mode=args.mode,
        steps=args.steps,
        learning_rate=args.lr,
        reference_count=args.refs,
        batch_preferences=args.batch_prefs,
        data_batch=args.data_batch,
        seed=args.seed,
        checkpoint_every=args.checkpoint_every,
    )
    problem = _make_problem(args.problem, args.data_seed)
    log_fh = open(args.log, "w") if args.log else None
    try:
        sink = (lambda line: print(line, file=log_fh)) if log_fh else None
        ckpt, reports = train(cfg, problem, checkpoint_path=args.out, log_sink=sink)
    finally:
        if log_fh:
            log_fh.close()
    critical = sum(1 for r in reports if r.critical)
    print(
        f"trained {len(reports)} steps ({critical} critical), "
        f"final losses {reports[-1].losses.ravel()}, checkpoint -> {args.out}"
    )
    return 0


def _cmd_sweep(args) -> int:
    ckpt = load_checkpoint(args.ckpt)
    problem = problem_from_descriptor(ckpt.problem)
    samples = sweep_front(ckpt, args.samples, problem)
    write_front_csv(args.out, samples)
    print(f"wrote {len(samples)} rows -> {args.out}")
    if args.plot:
        from .plots import plot_front

        oracle = problem.oracle_front(1000) if problem.has_oracle else None
        plot_front(samples, args.plot, oracle=oracle)
        print(f"wrote figure -> {args.plot}")
    return 0


def _cmd_eval(args) -> int:
    ckpt = load_checkpoint(args.ckpt)
    problem = problem_from_descriptor(ckpt.problem)
    samples = sweep_front(ckpt, args.samples, problem)
    metrics = compute_metrics(samples, problem)
    doc = format_metrics(metrics)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc)
        print(f"wrote metrics -> {args.out}")
    sys.stdout.write(doc)
    if args.plot:
        from .plots import plot_front

        oracle = problem.oracle_front(1000) if problem.has_oracle else None
        plot_front(samples, args.plot, oracle=oracle)
        print(f"wrote figure -> {args.plot}")
    return 0


def _cmd_gradcheck(args) -> int:
    from .gradcheck import run_gradcheck

    results = run_gradcheck(seed=args.seed, probes=args.probes)
    worst = 0.0
    for name, err in results.items():
        print(f"{name}: max relative error {err:.3e}")
        worst = max(worst, err)
    if worst >= args.tolerance:
        print(f"FAIL: worst error {worst:.3e} >= tolerance {args.tolerance:g}",
              file=sys.stderr)
        return 1
    print(f"OK: worst error {worst:.3e} < tolerance {args.tolerance:g}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .serving import Snapshot, create_app

    ckpt = load_checkpoint(args.ckpt)
    app = create_app(Snapshot.from_checkpoint(ckpt))
    port = int(os.environ.get("CPMTL_PORT", args.port))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpmtl",
        description="Preference-conditioned Pareto solution generator toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a generator and write a checkpoint")
    p.add_argument("--problem", choices=["synthetic", "regression"], required=True)
    p.add_argument("--mode", choices=["linear", "constrained"], default="constrained")
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--lr", type=float, default=3e-4)
    p.add_argument("--refs", type=int, default=3)
    p.add_argument("--batch-prefs", type=int, default=1)
    p.add_argument("--data-batch", type=int, default=128)
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--checkpoint-every", type=int, default=0)
    p.add_argument("--log", help="write per-step log records to this file")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("sweep", help="sweep a preference grid to CSV")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="also render the front figure to this path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("eval", help="score a checkpoint's front")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", help="metrics document output path")
    p.add_argument("--plot", help="also render the front figure to this path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference check of all generator modes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probes", type=int, default=20)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=_cmd_gradcheck)

    p = sub.add_parser("serve", help="serve a checkpoint over HTTP")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080,
                   help="overridden by the CPMTL_PORT environment variable")
    p.set_defaults(func=_cmd_serve)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CheckpointError, TrainingDiverged, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
