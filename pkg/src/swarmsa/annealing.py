"""Mass-to-noise schedules: the annealing rate gamma as a function of agent mass.

gamma replaces a time-based cooling protocol: it is non-increasing in the
mass, so light agents explore with large noise while heavy agents descend
with little or none.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VARIANTS = ("smooth_bump", "tanh_step", "constant", "zero")


@dataclass(frozen=True)
class AnnealingSchedule:
    """The map m -> gamma(m).

    variant:
        smooth_bump  alpha * exp(m / (m - beta)) for m < beta, 0 for m >= beta
        tanh_step    alpha * (-tanh(sharpness*(m - beta)) + 1) / 2
        constant     alpha (fixed-noise dynamics)
        zero         0 (noise-free dynamics)
    alpha is the noise amplitude, beta the mass cutoff. All variants are
    non-increasing in m and take values in [0, alpha].
    """

    variant: str
    alpha: float = 1.0
    beta: float = 1.0
    sharpness: float = 1000.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown schedule variant {self.variant!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.sharpness <= 0:
            raise ValueError("sharpness must be > 0")

    def __call__(self, m):
        return gamma(self, m)


def gamma(schedule: AnnealingSchedule, m):
    """Evaluate the annealing rate at mass m (scalar or array), pure function.

    The smooth_bump exponent m/(m - beta) tends to -inf as m -> beta from
    below; it is evaluated only on the m < beta branch so the exponential
    underflows cleanly to 0 instead of producing NaN.
    """
    m_arr = np.asarray(m, dtype=float)
    scalar = m_arr.ndim == 0
    v = schedule.variant
    if v == "zero":
        out = np.zeros_like(m_arr)
    elif v == "constant":
        out = np.full_like(m_arr, schedule.alpha)
    elif v == "tanh_step":
        out = schedule.alpha * (
            -0.5 * np.tanh(schedule.sharpness * (m_arr - schedule.beta)) + 0.5
        )
    else:  # smooth_bump
        out = np.zeros_like(m_arr)
        below = m_arr < schedule.beta
        if below.any():
            mb = m_arr[below]
            out[below] = schedule.alpha * np.exp(mb / (mb - schedule.beta))
    return float(out) if scalar else out
