import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hapticad import haptics as h
from hapticad.calib import LinearMap
from hapticad.elasticity import analyze_hysteresis, estimate_spring_rate
from hapticad.errors import EmptyDataset, EmptyGrid, NonConvergence, OutOfRange

SMALL = h.TrainConfig(epochs=300, warmup_epochs=100)


def test_actuator_full_stroke(actuator):
    # 10 * (1 - e^-4) evaluated by hand
    f = h.simulate_actuator(actuator, h.ActuatorCommand(5.0, 0.0), 1.0)
    assert f == pytest.approx(9.816843611112658, rel=1e-12)


@pytest.mark.parametrize("s,o,p", [(5.0, 0.6, 0.6), (3.0, 1.0, 0.2), (0.0, 0.0, 1.0)])
def test_actuator_zero_cases(actuator, s, o, p):
    assert h.simulate_actuator(actuator, h.ActuatorCommand(s, o), p) == 0.0


def test_actuator_range_errors(actuator):
    with pytest.raises(OutOfRange):
        h.ActuatorCommand(5.5, 0.0)
    with pytest.raises(OutOfRange):
        h.ActuatorCommand(1.0, -0.1)
    with pytest.raises(OutOfRange):
        h.simulate_actuator(actuator, h.ZERO_COMMAND, 1.01)


unit = st.floats(0.0, 1.0)


@given(s1=st.floats(0, 5), s2=st.floats(0, 5), o=unit, p1=unit, p2=unit)
def test_actuator_monotone_and_bounded(s1, s2, o, p1, p2):
    m = h.ActuatorModel()
    s1, s2 = sorted((s1, s2))
    p1, p2 = sorted((p1, p2))
    f = lambda s, p: h.simulate_actuator(m, h.ActuatorCommand(s, o), p)  # noqa: E731
    assert f(s1, p2) <= f(s2, p2)
    assert f(s2, p1) <= f(s2, p2)
    assert 0.0 <= f(s2, p2) <= m.f_max


def test_vectorized_matches_scalar(actuator):
    rng = np.random.default_rng(3)
    s, o, p = rng.uniform(0, 5, 50), rng.uniform(0, 1, 50), rng.uniform(0, 1, 50)
    vec = h.actuator_forces(actuator, s, o, p)
    ref = [h.simulate_actuator(actuator, h.ActuatorCommand(*a[:2]), a[2]) for a in zip(s, o, p)]
    np.testing.assert_allclose(vec, ref, rtol=1e-14, atol=1e-15)


class TestTrainingSet:
    def test_small_grid(self, actuator):
        d = h.generate_training_set(actuator, (2, 2, 2))
        assert len(d) == 8
        for (p, f), (s, o) in d.rows():
            assert f == h.simulate_actuator(actuator, h.ActuatorCommand(s, o), p)

    def test_default_grid(self, actuator):
        assert len(h.generate_training_set(actuator)) == 11 * 11 * 51

    def test_empty_grid(self, actuator):
        with pytest.raises(EmptyGrid):
            h.generate_training_set(actuator, (1, 4, 4))

    def test_disengaged_rows_kept(self, actuator):
        d = h.generate_training_set(actuator, (3, 3, 5))
        assert np.any((d.force == 0) & (d.position <= d.offset))

    def test_validation_grid_is_off_grid(self, actuator):
        train = h.generate_training_set(actuator)
        val = h.validation_grid(actuator)
        assert len(val) == 5000
        train_pos = set(np.round(train.position, 12))
        assert not set(np.round(val.position, 12)) & train_pos


class TestTraining:
    def test_empty(self, actuator):
        with pytest.raises(EmptyDataset):
            h.train_inverse_mlp(h.TrainingSet.from_rows([]), actuator)

    def test_memorizes_repeated_row(self, actuator):
        f = h.simulate_actuator(actuator, h.ActuatorCommand(2.5, 0.25), 0.6)
        data = h.TrainingSet.from_rows([((0.6, f), (2.5, 0.25))] * 16)
        cfg = h.TrainConfig(epochs=400, warmup_epochs=400)
        cmd = h.mlp_infer(h.train_inverse_mlp(data, actuator, cfg), 0.6, f)
        assert cmd.stiffness == pytest.approx(2.5, abs=1e-3 * h.STIFFNESS_MAX)
        assert cmd.offset == pytest.approx(0.25, abs=1e-3 * h.OFFSET_MAX)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_loss_descends(self, actuator, seed):
        d = h.generate_training_set(actuator, (3, 3, 6))
        mlp = h.train_inverse_mlp(d, actuator, h.TrainConfig(seed=seed, epochs=300, warmup_epochs=100))
        assert mlp.meta["loss_final"] <= mlp.meta["loss_first"]

    def test_reproducible(self, actuator):
        d = h.generate_training_set(actuator, (3, 3, 6))
        a = h.train_inverse_mlp(d, actuator, SMALL)
        b = h.train_inverse_mlp(d, actuator, SMALL)
        assert a.to_json() == b.to_json()

    def test_non_convergence_reported(self, actuator):
        d = h.generate_training_set(actuator, (3, 3, 6))
        with pytest.raises(NonConvergence):
            h.train_inverse_mlp(d, actuator, h.TrainConfig(epochs=2, warmup_epochs=1), target_rms=1e-6)

    def test_meta(self, mlp):
        assert mlp.meta["seed"] == 42
        assert mlp.meta["best_epoch"] > 500
        assert mlp.meta["train_rows"] + mlp.meta["val_rows"] == 6171


class TestInference:
    def test_outputs_in_command_box(self, mlp):
        rng = np.random.default_rng(11)
        p = rng.uniform(0, 1, 10_000)
        f = rng.uniform(0, 10, 10_000)
        s, o = mlp.predict(p, f)
        assert np.all((s >= 0) & (s <= 5)) and np.all((o >= 0) & (o <= 1))
        for i in range(0, 10_000, 997):
            c = h.mlp_infer(mlp, p[i], f[i])
            assert (c.stiffness, c.offset) == pytest.approx((s[i], o[i]), abs=1e-15)

    def test_zero_force_request(self, mlp, actuator):
        for p in np.linspace(0, 1, 21):
            c = h.mlp_infer(mlp, float(p), 0.0)
            assert h.simulate_actuator(actuator, c, float(p)) <= 0.1

    def test_mid_request(self, mlp, actuator):
        c = h.mlp_infer(mlp, 0.8, 3.0)
        assert abs(h.simulate_actuator(actuator, c, 0.8) - 3.0) <= 0.3

    def test_range_errors(self, mlp):
        with pytest.raises(OutOfRange):
            h.mlp_infer(mlp, 0.5, 10.5)
        with pytest.raises(OutOfRange):
            h.mlp_infer(mlp, -0.1, 1.0)

    def test_json_round_trip(self, mlp):
        back = h.Mlp.from_json(mlp.to_json())
        assert back.to_json() == mlp.to_json()
        p = np.linspace(0, 1, 7)
        np.testing.assert_array_equal(back.predict(p, 3 * p)[0], mlp.predict(p, 3 * p)[0])


class TestControllers:
    def test_desired_force(self):
        spring = h.VirtualSpring(0.1, LinearMap(100.0, 0.0))
        assert spring.desired_force(0.0, 10.0) == 0.0
        assert spring.desired_force(0.2, 10.0) == pytest.approx(2.0)
        assert h.VirtualSpring(1.0, LinearMap(100.0, 0.0)).desired_force(0.5, 10.0) == 10.0

    def test_open_step(self, mlp, actuator):
        spring = h.VirtualSpring(0.1, LinearMap(100.0, 0.0))
        cmd, applied = h.open_loop_step(spring, mlp, 0.2, actuator)
        assert applied == h.simulate_actuator(actuator, cmd, 0.2)
        assert abs(applied - 2.0) <= 0.3

    def test_ki_zero_is_open_loop(self, mlp, actuator):
        spring = h.VirtualSpring()
        state = h.ClosedLoopState(ki=0.0)
        for p in np.linspace(0.0, 1.0, 11):
            cmd, state = h.closed_loop_step(state, spring, mlp, float(p), 5.0, actuator)
            assert cmd == h.open_loop_step(spring, mlp, float(p), actuator)[0]
            assert state.accumulator == 0.0

    def test_zero_error_keeps_accumulator(self, mlp, actuator):
        spring = h.VirtualSpring()
        state = h.ClosedLoopState()
        for p in (0.1, 0.4, 0.7):
            f_des = spring.desired_force(p, actuator.f_max)
            cmd, state = h.closed_loop_step(state, spring, mlp, p, f_des, actuator)
            assert state.accumulator == 0.0
            assert cmd == h.open_loop_step(spring, mlp, p, actuator)[0]

    def test_constant_under_delivery(self, mlp, actuator):
        spring = h.VirtualSpring()
        p = 0.5
        f_des = spring.desired_force(p, actuator.f_max)
        state = h.ClosedLoopState()
        delivered = []
        accs = []
        for _ in range(10):
            cmd, state = h.closed_loop_step(state, spring, mlp, p, f_des - 0.5, actuator)
            accs.append(state.accumulator)
            delivered.append(h.simulate_actuator(actuator, cmd, p))
        assert all(b > a for a, b in zip(accs, accs[1:]))
        assert accs[-1] == pytest.approx(10 * 0.2 * 0.5)
        assert delivered[-1] > delivered[0] + 0.5
        assert all(b >= a - 1e-12 for a, b in zip(delivered, delivered[1:]))

    def test_accumulator_clamped(self, mlp, actuator):
        spring = h.VirtualSpring()
        state = h.ClosedLoopState(ki=5.0)
        for _ in range(5):
            _, state = h.closed_loop_step(state, spring, mlp, 1.0, 0.0, actuator)
        assert state.accumulator == actuator.f_max


class TestInteraction:
    def test_empty(self, mlp):
        assert len(h.run_interaction(h.VirtualSpring(), mlp, [])) == 0

    def test_trajectory_shape(self):
        traj = h.triangle_trajectory(cycles=2, peak=0.5, steps_per_stroke=4)
        assert len(traj) == 2 * 8 + 1
        assert traj[0] == (0.0, 0.0) and traj[4][1] == pytest.approx(0.5)

    def test_open_and_closed(self, mlp, actuator):
        spring = h.VirtualSpring()
        traj = h.triangle_trajectory()
        open_tr = h.run_interaction(spring, mlp, traj, "open", actuator)
        closed_tr = h.run_interaction(spring, mlp, traj, "closed", actuator)
        k_open = estimate_spring_rate(open_tr).k
        k_closed = estimate_spring_rate(closed_tr).k
        assert abs(k_open - 0.1) <= 0.05
        assert abs(k_closed - 0.1) < abs(k_open - 0.1)
        rep = analyze_hysteresis(open_tr)
        assert rep.k_up != rep.k_down
        assert h.tracking_rms(closed_tr, spring) <= 0.5 * h.tracking_rms(open_tr, spring)

    def test_first_sample_is_idle(self, mlp):
        tr = h.run_interaction(h.VirtualSpring(), mlp, [(0.0, 0.5), (0.01, 0.5)])
        assert tr.f[0] == 0.0 and tr.f[1] > 0.0
        assert math.isclose(tr.x[0], 43.1)
