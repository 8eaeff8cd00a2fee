import math

import numpy as np
import pytest

from swarmsa.annealing import VARIANTS, AnnealingSchedule, gamma


def test_smooth_bump_cutoff_is_exactly_zero():
    sched = AnnealingSchedule("smooth_bump", alpha=1.0, beta=0.125)
    assert gamma(sched, 0.2) == 0.0
    assert gamma(sched, 0.125) == 0.0


def test_smooth_bump_at_zero_mass():
    sched = AnnealingSchedule("smooth_bump", alpha=1.0, beta=0.125)
    assert gamma(sched, 0.0) == pytest.approx(1.0, rel=1e-15)


def test_smooth_bump_at_half_beta():
    # exponent (beta/2) / (beta/2 - beta) = -1
    sched = AnnealingSchedule("smooth_bump", alpha=1.0, beta=0.125)
    assert gamma(sched, 0.0625) == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_tanh_step_at_cutoff_is_half_alpha():
    sched = AnnealingSchedule("tanh_step", alpha=2.0, beta=0.0625)
    assert gamma(sched, 0.0625) == pytest.approx(1.0, rel=1e-15)


def test_constant_and_zero_variants():
    assert gamma(AnnealingSchedule("constant", alpha=0.7), 123.0) == 0.7
    assert gamma(AnnealingSchedule("zero"), 0.01) == 0.0


@pytest.mark.parametrize("variant", VARIANTS)
def test_monotone_nonincreasing(variant):
    sched = AnnealingSchedule(variant, alpha=1.5, beta=0.125)
    m = np.linspace(0.0, 0.5, 10001)
    vals = gamma(sched, m)
    assert np.all(np.diff(vals) <= 0.0)


@pytest.mark.parametrize("variant", VARIANTS)
def test_range_bound(variant):
    sched = AnnealingSchedule(variant, alpha=2.5, beta=0.1)
    m = np.linspace(0.0, 1.0, 10001)
    vals = gamma(sched, m)
    assert np.all(vals >= 0.0)
    assert np.all(vals <= 2.5)


def test_smooth_bump_continuous_at_cutoff():
    # the exponential underflows to 0 as m -> beta from below, never NaN/inf
    sched = AnnealingSchedule("smooth_bump", alpha=3.0, beta=0.125)
    just_below = 0.125 * (1.0 - 1e-6)
    val = gamma(sched, just_below)
    assert val == 0.0 or val < 1e-200 * sched.alpha
    assert np.isfinite(gamma(sched, np.array([just_below, 0.125, 0.1249999999]))).all()


def test_scalar_and_array_agree():
    sched = AnnealingSchedule("smooth_bump", alpha=1.0, beta=0.125)
    ms = np.array([0.0, 0.03, 0.0625, 0.1, 0.125, 0.4])
    arr = gamma(sched, ms)
    for i, m in enumerate(ms):
        assert arr[i] == gamma(sched, float(m))


def test_validation():
    with pytest.raises(ValueError):
        AnnealingSchedule("cosine")
    with pytest.raises(ValueError):
        AnnealingSchedule("smooth_bump", alpha=-1.0)
    with pytest.raises(ValueError):
        AnnealingSchedule("smooth_bump", beta=0.0)
    with pytest.raises(ValueError):
        AnnealingSchedule("tanh_step", sharpness=0.0)
