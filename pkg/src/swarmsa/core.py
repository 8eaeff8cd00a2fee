"""Swarm dynamics: mass transfer, annealed position updates, and the run loop.

One step advances all agents simultaneously:

    m_1 = m_0 * (1 - h * (F(x_0) - fbar_0))            mass transfer
    x_1 = x_0 - h * grad F(x_0) + sqrt(2 h gamma(m_0)) * xi,  xi ~ N(0, I_d)
    fbar_1 recomputed from (m_1, x_1)

fbar is the mass-weighted mean of F over the swarm (the provisional
minimum). The noise amplitude uses the masses from *before* the same
step's transfer; the transfer uses the pre-step fbar. Total mass is
conserved exactly in exact arithmetic because the transfer terms sum to
zero by the definition of fbar.

The batch kernel below advances many independent trials at once through
identical per-trial arithmetic (elementwise ops plus per-trial
reductions), so results are bit-identical however trials are grouped or
scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .annealing import AnnealingSchedule, gamma
from .config import RunConfig, config_hash
from .errors import (
    EmptySwarmError,
    NonFinitePositionError,
    SemanticError,
    StepSizeTooLargeError,
)
from .objectives import Objective
from .rng import RngStream


class Agent(NamedTuple):
    position: np.ndarray
    mass: float


@dataclass
class SwarmState:
    """All agents at one time step, with the cached provisional minimum."""

    positions: np.ndarray  # (N, d)
    masses: np.ndarray  # (N,)
    step_index: int
    provisional_min: float
    total_mass0: float

    @property
    def agents(self) -> list[Agent]:
        return [Agent(self.positions[j].copy(), float(self.masses[j]))
                for j in range(len(self.masses))]

    @classmethod
    def create(cls, positions, masses, objective: Objective) -> "SwarmState":
        positions = np.array(positions, dtype=float)
        masses = np.array(masses, dtype=float)
        if masses.size == 0:
            raise EmptySwarmError("swarm must contain at least one agent")
        if (masses <= 0).any():
            raise ValueError("all masses must be > 0")
        fbar = float(_weighted_hull_mean(masses, np.asarray(objective.eval(positions))))
        return cls(positions, masses, 0, fbar, float(masses.sum()))


@dataclass
class Snapshot:
    step: int
    t: float
    positions: np.ndarray
    masses: np.ndarray


@dataclass
class TrialRecord:
    """One trial's recorded trajectory and final outputs.

    times holds t = n*h at the recorded steps; fbar the provisional
    minimum there, fmean the unweighted mean of F over agents, and
    mass_total the sum of agent masses (conserved up to rounding).
    final_best_* come from argmin_j F(x_j) at the last completed step.
    abort is None for a clean run, else (step_index, cause) for the step
    whose update could not be completed; an aborted record keeps the
    trajectory recorded up to that step, and its final_best_* fields are
    NaN when divergence corrupted the state.
    """

    config_hash: str
    seed: int
    trial: int
    times: np.ndarray
    fbar: np.ndarray
    fmean: np.ndarray
    mass_total: np.ndarray
    final_best_value: float
    final_best_point: np.ndarray
    abort: Optional[tuple] = None
    snapshots: list = field(default_factory=list)

    @property
    def aborted(self) -> bool:
        return self.abort is not None


# ---------------------------------------------------------------------------
# Elementary operations


def _weighted_hull_mean(masses, values):
    # The weighted mean lies in [min, max] exactly; the clip repairs the
    # last-ulp rounding of the dot product so the hull property is exact.
    fb = (masses * values).sum(axis=-1) / masses.sum(axis=-1)
    return np.clip(fb, values.min(axis=-1), values.max(axis=-1))


def provisional_minimum(masses, values) -> float:
    """Mass-weighted mean of objective values (the provisional minimum)."""
    masses = np.asarray(masses, dtype=float)
    values = np.asarray(values, dtype=float)
    if masses.size == 0:
        raise EmptySwarmError("provisional_minimum of an empty swarm")
    if (masses <= 0).any():
        raise ValueError("all masses must be > 0")
    out = _weighted_hull_mean(masses, values)
    return float(out) if np.ndim(out) == 0 else out


def mass_update(masses, values, fbar, h) -> np.ndarray:
    """Simultaneous mass transfer using the pre-update provisional minimum.

    Returns m * (1 - h*(F - fbar)). Raises StepSizeTooLargeError if any
    factor is nonpositive; clamping instead would silently break the
    conservation of total mass.
    """
    masses = np.asarray(masses, dtype=float)
    values = np.asarray(values, dtype=float)
    factor = 1.0 - h * (values - fbar)
    if (factor <= 0.0).any():
        raise StepSizeTooLargeError(
            f"mass update factor reached {factor.min():.3g}; reduce h"
        )
    return masses * factor


def position_update(positions, masses, objective: Objective, schedule: AnnealingSchedule,
                    h, xi) -> np.ndarray:
    """Euler-Maruyama position step: drift -grad F, noise sqrt(2 h gamma(m)) xi.

    masses are the pre-transfer masses of the same step; xi is an (N, d)
    standard-normal draw (zeros give the noise-free step).
    """
    positions = np.asarray(positions, dtype=float)
    g = gamma(schedule, np.asarray(masses, dtype=float))
    coef = np.sqrt(2.0 * h * g)
    new = positions - h * np.asarray(objective.grad(positions)) + coef[..., None] * xi
    if not np.isfinite(new).all():
        raise NonFinitePositionError("position update produced non-finite coordinates")
    return new


def ssa_step(state: SwarmState, objective: Objective, schedule: AnnealingSchedule,
             h, rng: RngStream) -> SwarmState:
    """Advance one step: masses first (pre-step fbar), then positions
    (noise amplitude from pre-transfer masses), then recompute fbar."""
    values = np.asarray(objective.eval(state.positions))
    if not np.isfinite(values).all():
        raise NonFinitePositionError("objective values overflowed (diverged run)")
    new_masses = mass_update(state.masses, values, state.provisional_min, h)
    if schedule.variant == "zero":
        xi = np.zeros_like(state.positions)
    else:
        xi = rng.step_normals(state.step_index, state.positions.shape)
    new_positions = position_update(
        state.positions, state.masses, objective, schedule, h, xi
    )
    fbar = float(_weighted_hull_mean(new_masses, np.asarray(objective.eval(new_positions))))
    return SwarmState(
        positions=new_positions,
        masses=new_masses,
        step_index=state.step_index + 1,
        provisional_min=fbar,
        total_mass0=state.total_mass0,
    )


# ---------------------------------------------------------------------------
# Initialization


def initial_positions(config: RunConfig, rng: RngStream) -> np.ndarray:
    """Draw N i.i.d. uniform positions on the init box minus the exclusion."""
    gen = rng.init_generator()
    box = np.asarray(config.init_box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    out = np.empty((config.N, config.dim))
    filled = 0
    for _ in range(10000):
        cand = gen.uniform(lo, hi, size=(config.N - filled, config.dim))
        if config.exclusion is not None:
            cand = cand[~config.exclusion.contains(cand)]
        take = min(len(cand), config.N - filled)
        out[filled:filled + take] = cand[:take]
        filled += take
        if filled == config.N:
            return out
    raise SemanticError("exclusion region rejects nearly all of the init box")


def initial_masses(config: RunConfig) -> np.ndarray:
    if config.initial_masses is None:
        return np.full(config.N, 1.0 / config.N)
    return np.array(config.initial_masses, dtype=float)


def initial_state(config: RunConfig, rng: RngStream,
                  objective: Optional[Objective] = None) -> SwarmState:
    objective = objective or config.objective()
    return SwarmState.create(initial_positions(config, rng), initial_masses(config), objective)


def recording_steps(n_T: int, stride: int) -> np.ndarray:
    steps = list(range(0, n_T + 1, stride))
    if steps[-1] != n_T:
        steps.append(n_T)
    return np.asarray(steps, dtype=int)


# ---------------------------------------------------------------------------
# Run loop (batched over independent trials)


def run(config: RunConfig, rng: RngStream, snapshot_steps=()) -> TrialRecord:
    """Run one trial: initialize, iterate n_T steps, record fbar at the
    configured stride, and return the trajectory plus final best agent."""
    return simulate_trials(config, rng.seed, [rng.trial], snapshot_steps=snapshot_steps)[0]


def simulate_trials(config: RunConfig, base_seed: int, trials,
                    snapshot_steps=()) -> list[TrialRecord]:
    """Advance a batch of independent trials in lockstep.

    Trial k draws from RngStream(base_seed, trial=k); per-trial arithmetic
    is identical to a batch of one, so any grouping of trials yields
    bit-identical records. Trials whose update fails are finalized with an
    abort mark and dropped from the batch while the others continue.
    """
    trials = list(trials)
    objective = config.objective()
    schedule = config.schedule
    n_batch, n_agents, dim = len(trials), config.N, config.dim
    h, n_T = config.h, config.n_T
    noisy = schedule.variant != "zero"
    chash = config_hash(config)

    streams = [RngStream(base_seed, t) for t in trials]
    x = np.stack([initial_positions(config, s) for s in streams])
    m = np.tile(initial_masses(config), (n_batch, 1))

    rec_steps = recording_steps(n_T, config.record_stride)
    n_rec = len(rec_steps)
    rec_fbar = np.full((n_batch, n_rec), np.nan)
    rec_fmean = np.full((n_batch, n_rec), np.nan)
    rec_mass = np.full((n_batch, n_rec), np.nan)
    rec_count = np.zeros(n_batch, dtype=int)
    snap_steps = sorted(set(int(s) for s in snapshot_steps))
    snapshots: list[list] = [[] for _ in range(n_batch)]
    aborts: dict[int, tuple] = {}
    finals: dict[int, tuple] = {}

    orig = np.arange(n_batch)  # batch row -> output slot
    F, G = objective.eval_grad(x)
    fbar = _weighted_hull_mean(m, F)

    def record(ptr):
        rec_fbar[orig, ptr] = fbar
        rec_fmean[orig, ptr] = F.mean(axis=-1)
        rec_mass[orig, ptr] = m.sum(axis=-1)
        rec_count[orig] = ptr + 1

    def snapshot(step):
        t = step * h
        for row in range(len(orig)):
            snapshots[orig[row]].append(
                Snapshot(step, t, x[row].copy(), m[row].copy())
            )

    def finalize_rows(bad, step, cause, corrupted=False):
        nonlocal x, m, F, G, fbar, streams, orig
        for row in np.nonzero(bad)[0]:
            slot = orig[row]
            aborts[slot] = (step, cause)
            if corrupted:
                finals[slot] = (np.nan, np.full(dim, np.nan))
            else:
                j = int(np.argmin(F[row]))
                finals[slot] = (float(F[row, j]), x[row, j].copy())
        keep = ~bad
        x, m, F, G, fbar = x[keep], m[keep], F[keep], G[keep], fbar[keep]
        streams = [s for s, k in zip(streams, keep) if k]
        orig = orig[keep]

    rec_ptr = 0
    if rec_steps[rec_ptr] == 0:
        record(rec_ptr)
        rec_ptr += 1
    snap_ptr = 0
    if snap_ptr < len(snap_steps) and snap_steps[snap_ptr] == 0:
        snapshot(0)
        snap_ptr += 1

    xi = np.empty((n_batch, n_agents, dim))
    for n in range(n_T):
        if len(orig) == 0:
            break
        factor = 1.0 - h * (F - fbar[:, None])
        bad = (factor <= 0.0).any(axis=-1)
        if bad.any():
            finalize_rows(bad, n, "step-size-too-large")
            if len(orig) == 0:
                break
            factor = 1.0 - h * (F - fbar[:, None])
        g = gamma(schedule, m)  # noise amplitude from pre-transfer masses
        m = m * factor
        if noisy:
            buf = xi[: len(orig)]
            for row, stream in enumerate(streams):
                buf[row] = stream.step_normals(n, (n_agents, dim))
            x_new = x - h * G + np.sqrt(2.0 * h * g)[..., None] * buf
        else:
            x_new = x - h * G
        finite = np.isfinite(x_new).all(axis=(1, 2))
        if not finite.all():
            # pre-step positions are still intact and become the final state
            finalize_rows(~finite, n, "non-finite-position")
            x_new = x_new[finite]
            if len(orig) == 0:
                break
        x = x_new
        F, G = objective.eval_grad(x)
        fbar = _weighted_hull_mean(m, F)
        diverged = ~np.isfinite(fbar)
        if diverged.any():
            finalize_rows(diverged, n, "non-finite-position", corrupted=True)
            if len(orig) == 0:
                break
        if rec_ptr < n_rec and rec_steps[rec_ptr] == n + 1:
            record(rec_ptr)
            rec_ptr += 1
        if snap_ptr < len(snap_steps) and snap_steps[snap_ptr] == n + 1:
            snapshot(n + 1)
            snap_ptr += 1

    for row in range(len(orig)):
        j = int(np.argmin(F[row]))
        finals[orig[row]] = (float(F[row, j]), x[row, j].copy())

    records = []
    times = rec_steps * h
    for k, trial in enumerate(trials):
        n_valid = int(rec_count[k])
        value, point = finals[k]
        records.append(
            TrialRecord(
                config_hash=chash,
                seed=base_seed,
                trial=trial,
                times=times[:n_valid].copy(),
                fbar=rec_fbar[k, :n_valid].copy(),
                fmean=rec_fmean[k, :n_valid].copy(),
                mass_total=rec_mass[k, :n_valid].copy(),
                final_best_value=value,
                final_best_point=point,
                abort=aborts.get(k),
                snapshots=snapshots[k],
            )
        )
    return records
