"""Degenerate-noise reference systems and their diagnostic checks.

Two pitfall baselines share the swarm loop with the annealed system but
use a mass-independent noise amplitude:

    deterministic  gamma == 0       (independent gradient descenders)
    langevin       gamma == sigma   (constant-noise diffusion)

Masses still evolve in both, but no longer influence the trajectories.
The deterministic swarm can never leave the basins it starts in, so its
success probability is capped by the chance that initialization hits the
global basin; the constant-noise swarm equilibrates toward the density
proportional to exp(-F/sigma), whose mean objective sits strictly above
the global minimum value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .annealing import AnnealingSchedule
from .config import RunConfig
from .core import TrialRecord, run
from .errors import DimensionUnsupportedError
from .objectives import Objective
from .rng import RngStream

TAGS = ("deterministic", "langevin")


@dataclass(frozen=True)
class BaselineKind:
    tag: str
    sigma: float = 0.0

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown baseline tag {self.tag!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.tag == "deterministic" and self.sigma != 0.0:
            raise ValueError("deterministic baseline has sigma = 0")

    def schedule(self) -> AnnealingSchedule:
        if self.tag == "deterministic":
            return AnnealingSchedule(variant="zero")
        return AnnealingSchedule(variant="constant", alpha=self.sigma)


def baseline_run(kind: BaselineKind, config: RunConfig, rng: RngStream) -> TrialRecord:
    """Run one baseline trial: the swarm loop with the degenerate schedule."""
    cfg = replace(config, mode=kind.tag, schedule=kind.schedule())
    return run(cfg, rng)


def success_rate_bound(p_basin: float, N: int) -> float:
    """Ceiling on the deterministic success probability: 1 - (1 - p)^N.

    p_basin is the probability that a single initial sample lands in the
    global basin; without noise, success requires at least one such hit.
    """
    if not 0.0 <= p_basin <= 1.0:
        raise ValueError(f"p_basin must be in [0, 1], got {p_basin}")
    if N < 1:
        raise ValueError("N must be >= 1")
    return 1.0 - (1.0 - p_basin) ** N


def deterministic_fbar_monotone(record: TrialRecord, tol_per_step: float = 0.0) -> bool:
    """True iff the recorded fbar series never rises by more than tol_per_step.

    The continuous-time noise-free system decreases fbar exactly; the Euler
    discretization is monotone up to O(h^2) per step, which the tolerance
    absorbs.
    """
    fbar = np.asarray(record.fbar)
    if len(fbar) < 2:
        return True
    return bool(np.all(np.diff(fbar) <= tol_per_step))


def langevin_stationary_oracle(objective: Objective, box=None,
                               quadrature_points: int = 2001) -> float:
    """E[F] under the density proportional to exp(-F) over the box.

    Tensor-grid trapezoid quadrature, d <= 2 only: this is a verification
    reference for the constant-noise (sigma = 1) system, not a feature.
    """
    if objective.dim > 2:
        raise DimensionUnsupportedError("quadrature oracle supports d <= 2 only")
    box = np.asarray(box if box is not None else objective.box, dtype=float)
    if objective.dim == 1:
        xs = np.linspace(box[0, 0], box[0, 1], quadrature_points)
        fv = np.asarray(objective.eval(xs[:, None]))
        w = np.exp(-(fv - fv.min()))
        return float(np.trapezoid(fv * w, xs) / np.trapezoid(w, xs))
    xs = np.linspace(box[0, 0], box[0, 1], quadrature_points)
    ys = np.linspace(box[1, 0], box[1, 1], quadrature_points)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([gx, gy], axis=-1)
    fv = np.asarray(objective.eval(pts))
    w = np.exp(-(fv - fv.min()))
    num = np.trapezoid(np.trapezoid(fv * w, ys, axis=1), xs)
    den = np.trapezoid(np.trapezoid(w, ys, axis=1), xs)
    return float(num / den)
