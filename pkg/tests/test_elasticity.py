import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hapticad.devicesim import synth_spring_trace
from hapticad.elasticity import (
    Direction,
    ForceDisplacementTrace,
    Segment,
    analyze_hysteresis,
    estimate_spring_rate,
    segment_cycles,
    shear_modulus,
    spring_rate_from_modulus,
)
from hapticad.errors import (
    DegenerateInput,
    MissingPhase,
    NonPositiveInput,
    OutOfRange,
    TooFewSamples,
)
from oracles import normal_equations_line, rel_err


def trace_from(x, f, dt=0.01):
    x = np.asarray(x, dtype=float)
    return ForceDisplacementTrace(np.arange(len(x)) * dt, x, np.asarray(f, dtype=float))


def hysteresis_trace(k_up=0.12, k_down=0.07, drop=1.0, peak=40.0, cycles=3, step=1.0):
    """Compress along k_up*x, drop by ``drop`` at the peak, release along a k_down line."""
    up = np.arange(0.0, peak + step / 2, step)
    down = up[::-1][1:]
    b_down = k_up * peak - drop - k_down * peak
    xs, fs = [], []
    for c in range(cycles):
        u = up if c == 0 else up[1:]
        xs += list(u) + list(down)
        fs += list(k_up * u) + list(k_down * down + b_down)
    return trace_from(xs, fs)


def triangle(period=20, cycles=3, peak=10.0):
    n = cycles * period + 1
    phase = (np.arange(n) % period) / period
    x = peak * (1 - np.abs(2 * phase - 1))
    return x


class TestTrace:
    def test_invariants(self):
        with pytest.raises(OutOfRange):
            ForceDisplacementTrace([0, 0], [1, 2], [0, 0])
        with pytest.raises(OutOfRange):
            ForceDisplacementTrace([0, 1], [-1, 2], [0, 0])
        with pytest.raises(OutOfRange):
            ForceDisplacementTrace([0, 1], [1, 2], [0, 10.5])

    def test_arrays_are_read_only(self):
        tr = trace_from([0, 1], [0, 1])
        with pytest.raises(ValueError):
            tr.x[0] = 3.0


class TestEstimate:
    def test_exact_hooke(self):
        x = np.linspace(0, 10, 21)
        est = estimate_spring_rate(trace_from(x, 0.5 * x))
        assert est.k == pytest.approx(0.5, rel=1e-12)
        assert est.r_squared == 1.0

    def test_noisy_table_reference_spring(self):
        tr = synth_spring_trace(0.243, cycles=3, peak_x=30.0, sigma_f=0.05, sigma_x=0.1, seed=7)
        est = estimate_spring_rate(tr)
        slope, intercept = normal_equations_line(tr.x, tr.f)
        assert rel_err(est.k, slope) <= 1e-9
        assert abs(est.k - 0.243) <= 0.05 * 0.243

    def test_errors(self):
        with pytest.raises(TooFewSamples):
            estimate_spring_rate(trace_from([1.0], [0.5]))
        with pytest.raises(DegenerateInput):
            estimate_spring_rate(trace_from([2.0, 2.0, 2.0], [0.5, 0.6, 0.7]))

    @settings(max_examples=30)
    @given(cycles=st.integers(1, 6), k=st.floats(0.05, 0.9))
    def test_noiseless_r2_is_one(self, cycles, k):
        tr = synth_spring_trace(k, cycles=cycles, peak_x=min(30.0, 9.0 / k))
        est = estimate_spring_rate(tr)
        assert est.r_squared == 1.0
        assert est.k == pytest.approx(k, rel=1e-9)


class TestSegments:
    def test_rising(self):
        assert segment_cycles(trace_from(np.arange(10.0), np.zeros(10))) == [
            Segment(0, 10, Direction.COMPRESSION)
        ]

    def test_triangle_three_periods(self):
        segs = segment_cycles(trace_from(triangle(20, 3), np.zeros(61)))
        assert [s.direction for s in segs] == [Direction.COMPRESSION, Direction.RELEASE] * 3
        # turning points at the peaks (10, 30, 50) and troughs (20, 40)
        assert [(s.start, s.stop) for s in segs] == [
            (0, 11), (11, 21), (21, 31), (31, 41), (41, 51), (51, 61)
        ]

    def test_constant(self):
        segs = segment_cycles(trace_from(np.full(5, 3.0), np.zeros(5)))
        assert segs == [Segment(0, 5, Direction.FLAT)]

    def test_flat_plateau_merges_backward(self):
        x = [0, 1, 2, 2.01, 2.02, 3, 2, 1]
        segs = segment_cycles(trace_from(x, np.zeros(len(x))))
        assert [(s.start, s.stop, s.direction) for s in segs] == [
            (0, 6, Direction.COMPRESSION),
            (6, 8, Direction.RELEASE),
        ]

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            segment_cycles(trace_from([1.0], [0.0]))

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 50), min_size=2, max_size=60))
    def test_segments_cover_trace(self, xs):
        segs = segment_cycles(trace_from(xs, np.zeros(len(xs))))
        assert segs[0].start == 0 and segs[-1].stop == len(xs)
        for a, b in zip(segs, segs[1:]):
            assert a.stop == b.start
            assert a.direction is not b.direction
        assert all(s.stop > s.start for s in segs)


class TestHysteresis:
    def test_lossless_triangle(self):
        x = triangle(40, 3, 30.0)
        rep = analyze_hysteresis(trace_from(x, 0.1 * x))
        assert rep.k_up == pytest.approx(0.1, abs=1e-12)
        assert rep.k_down == pytest.approx(0.1, abs=1e-12)
        assert rep.release_drop == pytest.approx(0.0, abs=1e-12)

    def test_constructed_open_loop_shape(self):
        rep = analyze_hysteresis(hysteresis_trace())
        assert abs(rep.k_up - 0.12) <= 1e-9
        assert abs(rep.k_down - 0.07) <= 1e-9
        assert abs(rep.release_drop - 1.0) <= 1e-9

    def test_rising_only(self):
        with pytest.raises(MissingPhase):
            analyze_hysteresis(trace_from(np.arange(10.0), np.arange(10.0) * 0.1))

    @pytest.mark.parametrize("c", [0.25, 0.5, 2.0])
    def test_force_scaling(self, c):
        base = hysteresis_trace()
        scaled = ForceDisplacementTrace(base.t, base.x, c * base.f)
        a, b = analyze_hysteresis(base), analyze_hysteresis(scaled)
        assert b.k_up == pytest.approx(c * a.k_up, rel=1e-12)
        assert b.k_down == pytest.approx(c * a.k_down, rel=1e-12)
        assert b.release_drop == pytest.approx(c * a.release_drop, rel=1e-12)
        ea, eb = estimate_spring_rate(base), estimate_spring_rate(scaled)
        assert eb.k == pytest.approx(c * ea.k, rel=1e-12)
        assert eb.intercept == pytest.approx(c * ea.intercept, rel=1e-12)
        assert eb.r_squared == pytest.approx(ea.r_squared, abs=1e-12)


class TestShearModulus:
    def test_unit_case(self):
        assert shear_modulus(0.125, 1.0, 1.0, 1) == 1.0

    def test_steel_like(self):
        # 79300 * 1^4 / (8 * 10 * 10^3) by hand
        k = spring_rate_from_modulus(79300.0, 1.0, 10.0, 10)
        assert k == pytest.approx(0.99125, rel=1e-12)
        assert rel_err(shear_modulus(k, 1.0, 10.0, 10), 79300.0) <= 1e-6

    def test_non_positive(self):
        with pytest.raises(NonPositiveInput):
            shear_modulus(0.0, 1.0, 1.0, 1)
        with pytest.raises(NonPositiveInput):
            shear_modulus(1.0, 1.0, -1.0, 1)

    @given(
        G=st.floats(1e2, 1e5),
        d=st.floats(0.2, 5.0),
        D=st.floats(2.0, 50.0),
        n=st.floats(1.0, 30.0),
    )
    def test_inverse(self, G, d, D, n):
        k = spring_rate_from_modulus(G, d, D, n)
        assert rel_err(shear_modulus(k, d, D, n), G) <= 1e-9
