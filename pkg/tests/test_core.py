import math

import numpy as np
import pytest

from swarmsa.annealing import AnnealingSchedule
from swarmsa.core import (
    SwarmState,
    initial_masses,
    initial_positions,
    mass_update,
    position_update,
    provisional_minimum,
    recording_steps,
    run,
    simulate_trials,
    ssa_step,
)
from swarmsa.errors import (
    EmptySwarmError,
    NonFinitePositionError,
    StepSizeTooLargeError,
)
from swarmsa.objectives import Objective, ackley
from swarmsa.rng import RngStream
from tests.conftest import constant_objective, make_config, quadratic_objective

ZERO = AnnealingSchedule("zero")
BUMP = AnnealingSchedule("smooth_bump", alpha=1.0, beta=0.125)


class FixedNoise:
    """Stub stream returning a constant block, for hand-computed updates."""

    def __init__(self, value=1.0):
        self.value = value

    def step_normals(self, step, shape):
        return np.full(shape, self.value)


class TestProvisionalMinimum:
    def test_equal_weights(self):
        assert provisional_minimum([1.0, 1.0], [2.0, 4.0]) == 3.0

    def test_single_agent(self):
        assert provisional_minimum([0.3], [7.5]) == 7.5

    def test_weighted(self):
        # (1*2 + 3*4) / 4 = 3.5 by hand
        assert provisional_minimum([1.0, 3.0], [2.0, 4.0]) == 3.5

    def test_empty(self):
        with pytest.raises(EmptySwarmError):
            provisional_minimum([], [])

    def test_nonpositive_mass(self):
        with pytest.raises(ValueError):
            provisional_minimum([1.0, 0.0], [1.0, 2.0])

    def test_hull_property_random(self):
        gen = np.random.default_rng(3)
        for _ in range(200):
            m = gen.uniform(1e-12, 1.0, size=8)
            v = gen.normal(size=8) * gen.uniform(0, 1e6)
            fb = provisional_minimum(m, v)
            assert v.min() <= fb <= v.max()


class TestMassUpdate:
    def test_single_agent_unchanged(self):
        for h in (1e-4, 0.1, 10.0):
            out = mass_update([0.25], [5.0], 5.0, h)
            assert out[0] == 0.25

    def test_hand_example(self):
        # masses .5/.5, F 0/2, h=.1, fbar=1 -> [.55, .45], sum exactly 1
        out = mass_update([0.5, 0.5], [0.0, 2.0], 1.0, 0.1)
        assert out == pytest.approx([0.55, 0.45], abs=1e-15)
        assert out.sum() == pytest.approx(1.0, abs=1e-15)

    def test_step_size_too_large(self):
        # second factor 1 - 0.6*(4-2) = -0.2
        with pytest.raises(StepSizeTooLargeError):
            mass_update([0.5, 0.5], [0.0, 4.0], 2.0, 0.6)

    def test_mass_moves_downhill(self):
        gen = np.random.default_rng(11)
        m = gen.uniform(0.01, 1.0, size=16)
        v = gen.normal(size=16)
        fb = provisional_minimum(m, v)
        out = mass_update(m, v, fb, 1e-3)
        below, above = v < fb, v > fb
        assert np.all(out[below] > m[below])
        assert np.all(out[above] < m[above])

    def test_conservation(self):
        gen = np.random.default_rng(5)
        m = gen.uniform(0.01, 1.0, size=32)
        m /= m.sum()
        v = gen.normal(size=32)
        out = mass_update(m, v, provisional_minimum(m, v), 1e-2)
        assert abs(out.sum() - m.sum()) <= 1e-14


class TestPositionUpdate:
    def test_pure_gradient_step(self):
        # F = x^2/2, grad = x: 1 - 0.1*1 = 0.9
        f = quadratic_objective(scale=0.5)
        out = position_update(np.array([[1.0]]), np.array([1.0]), f, ZERO, 0.1,
                              np.zeros((1, 1)))
        assert out[0, 0] == pytest.approx(0.9, abs=1e-15)

    def test_fixed_point_at_smooth_minimum(self):
        obj = ackley(2)
        x = np.array([obj.global_min_point])
        out = position_update(x, np.array([1.0]), obj, ZERO, 0.1, np.zeros((1, 2)))
        assert np.array_equal(out, x)

    def test_noise_amplitude(self):
        # constant gamma=1, zero gradient, xi=1: step is sqrt(2h)
        f = constant_objective(0.0)
        sched = AnnealingSchedule("constant", alpha=1.0)
        out = position_update(np.array([[0.0]]), np.array([0.5]), f, sched, 0.01,
                              np.ones((1, 1)))
        assert out[0, 0] == pytest.approx(math.sqrt(0.02), rel=1e-15)

    def test_nonfinite_raises(self):
        f = quadratic_objective(scale=0.5)
        with pytest.raises(NonFinitePositionError):
            position_update(np.array([[1e308]]), np.array([1.0]), f, ZERO, 1e10,
                            np.zeros((1, 1)))


class TestSsaStep:
    def test_two_agent_hand_computed(self):
        # F = x^2 at (-1, 2), equal masses, gamma=0, h=0.1:
        #   fbar = (1 + 4)/2 = 2.5
        #   m -> 0.5*(1 - 0.1*(1-2.5)) = 0.575, 0.5*(1 - 0.1*(4-2.5)) = 0.425
        #   x -> -1 + 0.1*2 = -0.8, 2 - 0.1*4 = 1.6
        f = quadratic_objective(scale=1.0)
        state = SwarmState.create([[-1.0], [2.0]], [0.5, 0.5], f)
        assert state.provisional_min == pytest.approx(2.5, abs=1e-14)
        out = ssa_step(state, f, ZERO, 0.1, RngStream(0))
        assert out.positions[:, 0] == pytest.approx([-0.8, 1.6], abs=1e-14)
        assert out.masses == pytest.approx([0.575, 0.425], abs=1e-14)
        assert out.step_index == 1

    def test_single_agent_reduces_to_gradient_descent(self):
        # one agent with mass above the cutoff never gets noise and keeps
        # its mass; trajectory must equal plain gradient descent bit-for-bit
        obj = ackley(1)
        state = SwarmState.create([[2.3]], [1.0], obj)
        rng = RngStream(5)
        x_manual = np.array([[2.3]])
        for _ in range(500):
            state = ssa_step(state, obj, BUMP, 1e-3, rng)
            x_manual = x_manual - 1e-3 * obj.grad(x_manual)
        assert np.array_equal(state.positions, x_manual)
        assert state.masses[0] == 1.0

    def test_h_zero_is_identity(self):
        f = quadratic_objective()
        state = SwarmState.create([[1.0], [2.0]], [0.5, 0.5], f)
        out = ssa_step(state, f, BUMP, 0.0, RngStream(1))
        assert np.array_equal(out.positions, state.positions)
        assert np.array_equal(out.masses, state.masses)

    def test_matches_batch_kernel(self, ackley1d_config):
        cfg = ackley1d_config.with_overrides(n_T=50)
        rec = run(cfg, RngStream(cfg.seed, 0))
        obj = cfg.objective()
        rng = RngStream(cfg.seed, 0)
        state = SwarmState.create(
            initial_positions(cfg, rng), initial_masses(cfg), obj
        )
        fbars = [state.provisional_min]
        for _ in range(50):
            state = ssa_step(state, obj, cfg.schedule, cfg.h, rng)
            fbars.append(state.provisional_min)
        steps = recording_steps(cfg.n_T, cfg.record_stride)
        assert np.array_equal(rec.fbar, np.asarray(fbars)[steps])


class TestRun:
    def test_zero_iterations(self, ackley1d_config):
        cfg = ackley1d_config.with_overrides(n_T=0)
        rec = run(cfg, RngStream(cfg.seed, 0))
        assert len(rec.times) == 1 and rec.times[0] == 0.0
        obj = cfg.objective()
        x0 = initial_positions(cfg, RngStream(cfg.seed, 0))
        vals = np.asarray(obj.eval(x0))
        assert rec.final_best_value == vals.min()
        assert rec.fbar[0] == pytest.approx(vals.mean(), rel=1e-12)

    def test_bit_identical_reruns(self, ackley1d_config):
        a = run(ackley1d_config, RngStream(7, 0))
        b = run(ackley1d_config, RngStream(7, 0))
        assert np.array_equal(a.fbar, b.fbar)
        assert np.array_equal(a.times, b.times)
        assert a.final_best_value == b.final_best_value
        assert np.array_equal(a.final_best_point, b.final_best_point)

    def test_trajectory_decreases(self, ackley1d_config):
        rec = run(ackley1d_config, RngStream(7, 0))
        assert rec.fbar[-1] < rec.fbar[0]

    def test_mass_conservation_recorded(self, ackley1d_config):
        rec = run(ackley1d_config, RngStream(7, 0))
        assert np.abs(rec.mass_total - 1.0).max() <= 1e-12

    def test_hull_property_final(self, ackley1d_config):
        rec = run(ackley1d_config, RngStream(7, 0))
        assert rec.final_best_value <= rec.fbar[-1] + 1e-12

    def test_record_grid(self, ackley1d_config):
        cfg = ackley1d_config.with_overrides(n_T=103, record_stride=10)
        rec = run(cfg, RngStream(1, 0))
        steps = recording_steps(103, 10)
        assert steps[-1] == 103  # final step always recorded
        assert np.array_equal(rec.times, steps * cfg.h)

    def test_batch_equals_single_runs(self, ackley1d_config):
        cfg = ackley1d_config.with_overrides(n_T=300)
        batch = simulate_trials(cfg, 7, [0, 1, 2])
        for k, rec in enumerate(batch):
            solo = run(cfg, RngStream(7, k))
            assert np.array_equal(rec.fbar, solo.fbar)
            assert np.array_equal(rec.fmean, solo.fmean)
            assert rec.final_best_value == solo.final_best_value

    def test_abort_step_size(self):
        cfg = make_config(h=0.5, n_T=100, N=4)  # far too large for Ackley values
        rec = run(cfg, RngStream(3, 0))
        assert rec.aborted
        step, cause = rec.abort
        assert cause == "step-size-too-large"
        assert len(rec.times) >= 1  # keeps the trajectory up to the abort
        assert rec.times[-1] <= step * cfg.h + 1e-12

    @pytest.mark.filterwarnings("ignore:overflow", "ignore:invalid value")
    def test_abort_nonfinite(self):
        # steep quartic with huge h diverges to overflow within a few steps
        quartic = Objective(
            name="quartic",
            dim=1,
            eval=lambda x: np.sum(np.asarray(x, float) ** 4, axis=-1),
            grad=lambda x: 4.0 * np.asarray(x, float) ** 3,
            global_min_value=0.0,
            global_min_point=np.zeros(1),
            smooth_everywhere=True,
            box=((-2.0, 2.0),),
        )
        from swarmsa.annealing import AnnealingSchedule as Sched

        state = SwarmState.create([[2.0]], [1.0], quartic)
        with pytest.raises(NonFinitePositionError):
            for _ in range(200):
                state = ssa_step(state, quartic, Sched("zero"), 50.0, RngStream(0))

    def test_snapshots(self, ackley1d_config):
        cfg = ackley1d_config.with_overrides(n_T=100)
        rec = run(cfg, RngStream(2, 0), snapshot_steps=(0, 50, 100))
        assert [s.step for s in rec.snapshots] == [0, 50, 100]
        assert rec.snapshots[0].positions.shape == (cfg.N, cfg.dim)
        assert rec.snapshots[1].t == pytest.approx(50 * cfg.h)


class TestInitialization:
    def test_positions_in_box(self, ackley1d_config):
        x = initial_positions(ackley1d_config, RngStream(0, 0))
        assert x.shape == (8, 1)
        assert np.all(x >= -5.0) and np.all(x <= 5.0)

    def test_exclusion_respected(self, ackley1d_config):
        for trial in range(20):
            x = initial_positions(ackley1d_config, RngStream(0, trial))
            assert np.all(np.abs(x[:, 0]) > 0.75)

    def test_masses_uniform_sum_one(self):
        cfg = make_config(N=7)
        m = initial_masses(cfg)
        assert m.shape == (7,)
        assert abs(m.sum() - 1.0) <= 1e-12

    def test_explicit_masses(self):
        cfg = make_config(N=2, init="{masses: [0.75, 0.25]}")
        assert np.array_equal(initial_masses(cfg), [0.75, 0.25])

    def test_state_validation(self):
        f = quadratic_objective()
        with pytest.raises(EmptySwarmError):
            SwarmState.create(np.empty((0, 1)), np.empty(0), f)
        with pytest.raises(ValueError):
            SwarmState.create([[1.0]], [0.0], f)

    def test_agents_view(self):
        f = quadratic_objective()
        state = SwarmState.create([[1.0], [2.0]], [0.5, 0.5], f)
        agents = state.agents
        assert len(agents) == 2
        assert agents[1].position[0] == 2.0 and agents[1].mass == 0.5
