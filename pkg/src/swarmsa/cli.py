"""Command-line interface.

Subcommands:
  run              one trial -> per-trial CSV (+ optional snapshots CSV) + manifest
  trials           K seeded trials -> aggregate CSV (+ per-trial CSVs) + manifest
  sweep            (N, beta) grid from the config's sweep section -> cell CSVs + summary
  check-gradients  finite-difference check of every cataloged objective
  baseline-gap     constant-noise time average vs. the quadrature reference
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import harness, objectives
from .baselines import langevin_stationary_oracle
from .config import load_config
from .core import recording_steps, run
from .errors import SwarmError
from .rng import RngStream


def _add_common(p, trials=False):
    p.add_argument("--config", required=True, type=Path, help="config file path")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: all cores); never affects results")
    if trials:
        p.add_argument("--trials", type=int, default=None,
                       help="number of trials (default 20, or sweep.n_trials)")


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    import os

    return os.cpu_count() or 1


def _outdir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    stem = args.config.stem
    snap_steps = ()
    if args.snapshots > 0:
        snap_steps = np.unique(
            np.round(np.linspace(0, cfg.n_T, args.snapshots)).astype(int)
        )
    with harness.Stopwatch() as sw:
        record = run(cfg, RngStream(cfg.seed, trial=0), snapshot_steps=snap_steps)
    harness.write_trial_csv(out / f"{stem}-trial.csv", record)
    if record.snapshots:
        harness.write_snapshots_csv(out / f"{stem}-snapshots.csv", record)
    harness.write_manifest(out / f"{stem}-manifest.json", cfg, cfg.seed, [record], sw.elapsed)
    if record.aborted:
        print(f"trial aborted at step {record.abort[0]}: {record.abort[1]}", file=sys.stderr)
        return 1
    print(f"final fbar {record.fbar[-1]:.6g}, best value {record.final_best_value:.6g}")
    return 0


def cmd_trials(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    stem = args.config.stem
    n_trials = args.trials if args.trials is not None else 20
    with harness.Stopwatch() as sw:
        records = harness.run_trials(cfg, n_trials, workers=_workers(args))
    agg = harness.aggregate(records)
    harness.write_aggregate_csv(out / f"{stem}-aggregate.csv", agg)
    if args.per_trial:
        for r in records:
            harness.write_trial_csv(out / f"{stem}-trial-{r.trial:03d}.csv", r)
    harness.write_manifest(out / f"{stem}-manifest.json", cfg, cfg.seed, records, sw.elapsed)
    n_aborted = sum(1 for r in records if r.aborted)
    print(
        f"{agg.n_trials} trials aggregated ({n_aborted} aborted); "
        f"final mean fbar {agg.mean[-1]:.6g}"
    )
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.sweep is None:
        print("config has no sweep section", file=sys.stderr)
        return 2
    out = _outdir(args)
    stem = args.config.stem
    n_trials = args.trials if args.trials is not None else cfg.sweep.n_trials
    with harness.Stopwatch() as sw:
        result = harness.sweep(
            cfg, cfg.sweep.Ns, cfg.sweep.betas, n_trials=n_trials, workers=_workers(args)
        )
    for c in result.cells:
        harness.write_aggregate_csv(out / f"{stem}-N{c.N}-beta{c.beta:g}.csv", c.aggregate)
    harness.write_sweep_csv(out / f"{stem}-summary.csv", result)
    harness.write_manifest(out / f"{stem}-manifest.json", cfg, cfg.seed, [], sw.elapsed)
    print(f"{len(result.cells)} cells x {result.n_trials} trials written to {out}")
    for N in cfg.sweep.Ns:
        row = [c for c in result.cells if c.N == N]
        best = min(row, key=lambda c: c.final_mean)
        print(f"  N={N}: best beta {best.beta:g} (final mean {best.final_mean:.4g})")
    return 0


def cmd_check_gradients(args) -> int:
    failures = 0
    print(f"{'objective':28s} {'dim':>3s} {'max rel err':>12s}  result")
    for obj in objectives.full_catalog(d=args.dim):
        res = objectives.gradient_check(obj, n_points=args.points, seed=args.seed)
        status = "pass" if res.passed else "FAIL"
        failures += 0 if res.passed else 1
        print(f"{res.objective:28s} {obj.dim:3d} {res.max_rel_err:12.3e}  {status}")
    return 0 if failures == 0 else 1


def cmd_baseline_gap(args) -> int:
    cfg = _load(args)
    if cfg.mode != "langevin":
        print("baseline-gap requires a config with mode: langevin", file=sys.stderr)
        return 2
    objective = cfg.objective()
    with harness.Stopwatch() as sw:
        record = run(cfg, RngStream(cfg.seed, trial=0))
    if record.aborted:
        print(f"run aborted at step {record.abort[0]}: {record.abort[1]}", file=sys.stderr)
        return 1
    steps = recording_steps(cfg.n_T, cfg.record_stride)
    second_half = steps >= cfg.n_T // 2
    time_avg = float(record.fmean[second_half].mean())
    oracle = langevin_stationary_oracle(objective)
    gap = oracle - objective.global_min_value
    rel = abs(time_avg - oracle) / abs(oracle) if oracle != 0 else float("inf")
    print(f"time average of mean F (second half): {time_avg:.6g}")
    print(f"quadrature reference E[F] under exp(-F): {oracle:.6g}")
    print(f"relative deviation: {rel:.3%}")
    print(f"reference gap above the global minimum: {gap:.6g}")
    print(f"wall clock: {sw.elapsed:.1f} s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swarmsa", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single seeded trial")
    _add_common(p)
    p.add_argument("--snapshots", type=int, default=0,
                   help="also record K evenly spaced swarm snapshots")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("trials", help="seeded trial batch with aggregation")
    _add_common(p, trials=True)
    p.add_argument("--per-trial", action="store_true", help="emit per-trial CSVs")
    p.set_defaults(fn=cmd_trials)

    p = sub.add_parser("sweep", help="(N, beta) grid from the config's sweep section")
    _add_common(p, trials=True)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("check-gradients", help="finite-difference gradient checks")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--dim", type=int, default=2,
                   help="dimension for the Ackley/Rastrigin rows")
    p.set_defaults(fn=cmd_check_gradients)

    p = sub.add_parser("baseline-gap",
                       help="constant-noise time average vs. quadrature reference")
    _add_common(p)
    p.set_defaults(fn=cmd_baseline_gap)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SwarmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
