import numpy as np
import pytest

from swarmsa.config import parse_and_validate
from swarmsa.objectives import Objective


def make_config(**overrides):
    """Build a small valid config through the public parse path."""
    base = {
        "objective": "ackley",
        "dim": 1,
        "N": 8,
        "h": 1e-4,
        "n_T": 200,
        "seed": 7,
        "schedule": "{variant: smooth_bump, alpha: 1.0, beta: 0.125}",
        "init": "{box: [-5, 5]}",
        "mode": "ssa",
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    lines = []
    for key, value in base.items():
        lines.append(f"{key}: {value}")
    return parse_and_validate("\n".join(lines))


def quadratic_objective(scale=0.5, d=1):
    """F(x) = scale * |x|^2 with exact gradient, for hand-checkable steps."""
    return Objective(
        name="quadratic",
        dim=d,
        eval=lambda x: scale * np.sum(np.asarray(x, float) ** 2, axis=-1),
        grad=lambda x: 2.0 * scale * np.asarray(x, float),
        global_min_value=0.0,
        global_min_point=np.zeros(d),
        smooth_everywhere=True,
        box=((-10.0, 10.0),) * d,
    )


def constant_objective(c=3.0, d=1):
    return Objective(
        name="const",
        dim=d,
        eval=lambda x: np.full(np.asarray(x).shape[:-1], float(c)),
        grad=lambda x: np.zeros_like(np.asarray(x, float)),
        global_min_value=float(c),
        global_min_point=None,
        smooth_everywhere=True,
        box=((-10.0, 10.0),) * d,
    )


@pytest.fixture
def ackley1d_config():
    return make_config(
        n_T=2000,
        init="{box: [-5, 5], exclusion: {kind: ball, center: [0.0], radius: 0.75}}",
    )
