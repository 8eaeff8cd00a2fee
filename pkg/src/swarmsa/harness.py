"""Multi-trial orchestration: seeded trial fans, aggregation, sweeps, output.

Trial k always draws from RngStream(base_seed, trial=k), so a batch is
reproducible for any worker count and any grouping of trials; results are
returned in trial order regardless of completion order. Aborted trials
are kept in the returned list (flagged) but excluded from aggregation.

Output formats:
  aggregate CSV      header t,mean,q1,q3
  per-trial CSV      header t,fbar
  sweep summary CSV  header N,beta,final_mean,final_q1,final_q3,n_aborted
  run manifest       JSON: config echo, seed, build, per-trial abort flags,
                     wall clock (the manifest is informational; the CSVs
                     are the byte-reproducible outputs)
"""

from __future__ import annotations

import json
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig, config_hash, to_dict
from .core import TrialRecord, simulate_trials
from .errors import DuplicateCellError, EmptyInputError, MismatchedGridsError

QUANTILE_METHOD = "linear"  # interpolate between order statistics


@dataclass
class AggregateSeries:
    """Cross-trial pointwise mean and quartiles of the fbar trajectories."""

    times: np.ndarray
    mean: np.ndarray
    q1: np.ndarray
    q3: np.ndarray
    n_trials: int


@dataclass
class SweepCell:
    N: int
    beta: float
    aggregate: AggregateSeries
    final_mean: float
    final_q1: float
    final_q3: float
    n_aborted: int


@dataclass
class SweepResult:
    cells: list
    n_trials: int

    def cell(self, N, beta) -> SweepCell:
        for c in self.cells:
            if c.N == N and c.beta == beta:
                return c
        raise KeyError((N, beta))


def _chunks(items, n_chunks):
    n_chunks = max(1, min(n_chunks, len(items)))
    size, rem = divmod(len(items), n_chunks)
    out, start = [], 0
    for i in range(n_chunks):
        stop = start + size + (1 if i < rem else 0)
        out.append(items[start:stop])
        start = stop
    return [c for c in out if c]


def _run_chunk(config, base_seed, trials):
    return simulate_trials(config, base_seed, trials)


def run_trials(config: RunConfig, n_trials: int, base_seed=None,
               workers: int = 1) -> list[TrialRecord]:
    """Run n_trials independent trials; trial k uses RngStream(base_seed, k)."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    base_seed = config.seed if base_seed is None else base_seed
    trials = list(range(n_trials))
    if workers <= 1:
        return simulate_trials(config, base_seed, trials)
    chunks = _chunks(trials, workers)
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        futures = [pool.submit(_run_chunk, config, base_seed, c) for c in chunks]
        results = []
        for fut in futures:
            results.extend(fut.result())
    results.sort(key=lambda r: r.trial)
    return results


def aggregate(records) -> AggregateSeries:
    """Pointwise mean and quartiles of fbar across unaborted trials."""
    usable = [r for r in records if not r.aborted]
    if not usable:
        raise EmptyInputError("no unaborted trials to aggregate")
    times = usable[0].times
    for r in usable[1:]:
        if len(r.times) != len(times) or not np.array_equal(r.times, times):
            raise MismatchedGridsError("trial records have different time grids")
    stack = np.stack([r.fbar for r in usable])
    return AggregateSeries(
        times=times.copy(),
        mean=stack.mean(axis=0),
        q1=np.quantile(stack, 0.25, axis=0, method=QUANTILE_METHOD),
        q3=np.quantile(stack, 0.75, axis=0, method=QUANTILE_METHOD),
        n_trials=len(usable),
    )


def estimate_success_rate(records, f_star: float, epsilon_succ: float):
    """Fraction of unaborted trials with final fbar below f_star + epsilon_succ,
    with the binomial standard error."""
    if epsilon_succ <= 0:
        raise ValueError("epsilon_succ must be > 0")
    usable = [r for r in records if not r.aborted]
    if not usable:
        raise EmptyInputError("no unaborted trials")
    hits = sum(1 for r in usable if r.fbar[-1] < f_star + epsilon_succ)
    n = len(usable)
    rate = hits / n
    return rate, float(np.sqrt(rate * (1.0 - rate) / n))


def sweep(base_config: RunConfig, Ns, betas, n_trials: int = 40, base_seed=None,
          workers: int = 1) -> SweepResult:
    """Run the cartesian (N, beta) grid, n_trials per cell.

    Cell c uses the global trial indices [c*n_trials, (c+1)*n_trials) of the
    shared base seed, so every cell is independent and the whole sweep is
    reproducible for any worker count.
    """
    Ns, betas = list(Ns), list(betas)
    if not Ns or not betas:
        raise ValueError("sweep grids must be non-empty")
    cells = [(N, beta) for N in Ns for beta in betas]
    if len(set(cells)) != len(cells):
        raise DuplicateCellError("sweep grid contains duplicate (N, beta) cells")
    base_seed = base_config.seed if base_seed is None else base_seed

    out = []
    for idx, (N, beta) in enumerate(cells):
        cfg = replace(
            base_config,
            N=N,
            schedule=replace(base_config.schedule, beta=beta),
            sweep=None,
        )
        trials = list(range(idx * n_trials, (idx + 1) * n_trials))
        if workers <= 1:
            records = simulate_trials(cfg, base_seed, trials)
        else:
            chunks = _chunks(trials, workers)
            with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
                futures = [pool.submit(_run_chunk, cfg, base_seed, c) for c in chunks]
                records = [r for fut in futures for r in fut.result()]
            records.sort(key=lambda r: r.trial)
        agg = aggregate(records)
        out.append(
            SweepCell(
                N=N,
                beta=beta,
                aggregate=agg,
                final_mean=float(agg.mean[-1]),
                final_q1=float(agg.q1[-1]),
                final_q3=float(agg.q3[-1]),
                n_aborted=sum(1 for r in records if r.aborted),
            )
        )
    return SweepResult(cells=out, n_trials=n_trials)


# ---------------------------------------------------------------------------
# Persistence


def _fmt(v) -> str:
    return repr(float(v))


def write_aggregate_csv(path, agg: AggregateSeries) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,mean,q1,q3\n")
        for i in range(len(agg.times)):
            fh.write(
                f"{_fmt(agg.times[i])},{_fmt(agg.mean[i])},"
                f"{_fmt(agg.q1[i])},{_fmt(agg.q3[i])}\n"
            )


def write_trial_csv(path, record: TrialRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,fbar\n")
        for i in range(len(record.times)):
            fh.write(f"{_fmt(record.times[i])},{_fmt(record.fbar[i])}\n")


def write_sweep_csv(path, result: SweepResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("N,beta,final_mean,final_q1,final_q3,n_aborted\n")
        for c in result.cells:
            fh.write(
                f"{c.N},{_fmt(c.beta)},{_fmt(c.final_mean)},"
                f"{_fmt(c.final_q1)},{_fmt(c.final_q3)},{c.n_aborted}\n"
            )


def write_snapshots_csv(path, record: TrialRecord) -> None:
    if not record.snapshots:
        raise ValueError("record carries no snapshots")
    dim = record.snapshots[0].positions.shape[1]
    cols = ",".join(f"x{i}" for i in range(dim))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"t,agent,mass,{cols}\n")
        for snap in record.snapshots:
            for j in range(len(snap.masses)):
                xs = ",".join(_fmt(v) for v in snap.positions[j])
                fh.write(f"{_fmt(snap.t)},{j},{_fmt(snap.masses[j])},{xs}\n")


def _build_id() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def write_manifest(path, config: RunConfig, seed: int, records,
                   wall_clock_s: float) -> None:
    manifest = {
        "config": to_dict(config),
        "config_hash": config_hash(config),
        "seed": seed,
        "build": _build_id(),
        "quantile_convention": QUANTILE_METHOD,
        "n_trials": len(records),
        "trials": [
            {
                "trial": r.trial,
                "aborted": r.aborted,
                "abort_step": None if r.abort is None else int(r.abort[0]),
                "abort_cause": None if r.abort is None else r.abort[1],
            }
            for r in records
        ],
        "wall_clock_s": wall_clock_s,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


class Stopwatch:
    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._t0
        return False
