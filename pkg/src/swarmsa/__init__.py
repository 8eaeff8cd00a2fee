"""Swarm-based simulated annealing.

A particle optimizer in which every agent carries a position and a scalar
mass. Agents above the swarm's mass-weighted mean objective (the
provisional minimum) shed mass to those below it, and each agent's noise
amplitude is a non-increasing function of its own mass: light agents
explore, heavy agents descend. The package ships the optimizer, the two
degenerate-noise reference systems, a benchmark catalog with analytic
gradients, and a reproducible multi-trial experiment harness.
"""

from .annealing import AnnealingSchedule, gamma
from .baselines import (
    BaselineKind,
    baseline_run,
    deterministic_fbar_monotone,
    langevin_stationary_oracle,
    success_rate_bound,
)
from .config import RunConfig, config_hash, load_config, parse_and_validate, serialize
from .core import (
    Agent,
    SwarmState,
    TrialRecord,
    initial_state,
    mass_update,
    position_update,
    provisional_minimum,
    run,
    simulate_trials,
    ssa_step,
)
from .harness import (
    AggregateSeries,
    SweepResult,
    aggregate,
    estimate_success_rate,
    run_trials,
    sweep,
)
from .objectives import (
    Objective,
    ackley,
    basin_1d,
    bukin6,
    drop_wave,
    fd_gradient,
    full_catalog,
    gradient_check,
    levy,
    levy13,
    rastrigin,
    schaffer2,
    suite_2d,
)
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "AggregateSeries",
    "AnnealingSchedule",
    "BaselineKind",
    "Objective",
    "RngStream",
    "RunConfig",
    "SwarmState",
    "SweepResult",
    "TrialRecord",
    "ackley",
    "aggregate",
    "baseline_run",
    "basin_1d",
    "bukin6",
    "config_hash",
    "deterministic_fbar_monotone",
    "drop_wave",
    "estimate_success_rate",
    "fd_gradient",
    "full_catalog",
    "gamma",
    "gradient_check",
    "initial_state",
    "langevin_stationary_oracle",
    "levy",
    "levy13",
    "load_config",
    "mass_update",
    "parse_and_validate",
    "position_update",
    "provisional_minimum",
    "rastrigin",
    "run",
    "run_trials",
    "schaffer2",
    "serialize",
    "simulate_trials",
    "ssa_step",
    "success_rate_bound",
    "suite_2d",
    "sweep",
]
