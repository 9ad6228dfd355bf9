import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mmrac.numerics import rk4_step
from mmrac.plant import (
    Hypercube,
    NoiseModel,
    ParameterProfile,
    PlantSpec,
    ReferenceInputSpec,
    ReferenceSpec,
    constant_profile,
    default_reference_input,
    eval_profile,
    measure,
    noise_samples,
    plant_dynamics,
    reference_dynamics,
    reference_input,
    square_wave,
)
from mmrac.scenarios import BUILTINS, builtin

finite = st.floats(-20, 20, allow_nan=False, allow_infinity=False)


def experiment1_profile():
    return ParameterProfile("sinusoidal", [3, 4, 3], amplitude=[1, 1, 0], frequency=0.5,
                            phase_offsets=[0, math.pi / 2, 0])


# -- profiles --------------------------------------------------------------------

def test_constant_profile():
    assert np.array_equal(eval_profile(constant_profile([5, 3]), 7.2), [5, 3])


def test_experiment1_profile_at_zero():
    assert np.allclose(eval_profile(experiment1_profile(), 0.0), [3, 5, 3], atol=1e-15)


def test_experiment1_profile_matches_formula():
    p = experiment1_profile()
    for t in np.linspace(0, 120, 37):
        want = [3 + math.sin(0.5 * t), 4 + math.cos(0.5 * t), 3]
        assert np.allclose(eval_profile(p, t), want, atol=1e-14)


def test_square_wave_values():
    p = ParameterProfile("square_wave", [0.0], amplitude=[1.0], period=40.0)
    assert eval_profile(p, 25.0)[0] == -1.0
    assert eval_profile(p, 0.0)[0] == 1.0
    assert eval_profile(p, 19.999)[0] == 1.0
    assert eval_profile(p, 20.0)[0] == -1.0
    assert eval_profile(p, 40.0)[0] == 1.0


def test_square_wave_left_limit():
    assert square_wave(20.0, 40.0, left=True) == 1.0
    assert square_wave(20.0, 40.0) == -1.0
    assert square_wave(40.0, 40.0, left=True) == -1.0
    assert square_wave(0.0, 40.0, left=True) == 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 100), st.integers(1, 5), arrays(float, 2, elements=finite))
def test_square_wave_mean_is_base(period, n_periods, base):
    p = ParameterProfile("square_wave", base, amplitude=[1.0, 2.0], period=period)
    # midpoint rule on 2000 cells per period hits each half exactly
    cells = 2000 * n_periods
    t = (np.arange(cells) + 0.5) * (period * n_periods / cells)
    mean = np.mean([eval_profile(p, ti) for ti in t], axis=0)
    assert np.max(np.abs(mean - base)) <= 1e-12 * (1 + np.abs(base).max())


@given(st.floats(0, 1e3))
def test_sinusoid_stays_in_bounds(t):
    p = experiment1_profile()
    lo, hi = p.bounds()
    v = eval_profile(p, t)
    assert np.all(v >= lo - 1e-15) and np.all(v <= hi + 1e-15)


def test_breakpoints():
    p = ParameterProfile("square_wave", [0.0], amplitude=[1.0], period=40.0)
    assert p.breakpoints(19.9995, 20.0005) == [20.0]
    assert p.breakpoints(20.0, 20.001) == []
    assert p.breakpoints(0.0, 100.0) == [20.0, 40.0, 60.0, 80.0]
    assert constant_profile([1.0]).breakpoints(0, 100) == []


def test_profile_validation():
    with pytest.raises(ValueError):
        ParameterProfile("ramp", [1.0])
    with pytest.raises(ValueError):
        ParameterProfile("square_wave", [1.0], amplitude=[1.0], period=0.0)
    with pytest.raises(ValueError):
        ParameterProfile("sinusoidal", [1.0, 2.0], amplitude=[1.0])
    with pytest.raises(ValueError):
        PlantSpec(constant_profile([1.0, 2.0]), initial_state=[0.0])


def test_time_invariant_flag():
    assert constant_profile([1, 2]).time_invariant
    assert not experiment1_profile().time_invariant
    assert ParameterProfile("sinusoidal", [1, 2], frequency=3.0).time_invariant


# -- dynamics --------------------------------------------------------------------

def test_plant_dynamics_examples():
    assert np.array_equal(plant_dynamics([0, 0], 0, [2, 1]), [0, 0])
    assert np.array_equal(plant_dynamics([1, 0], 0, [2, 1]), [0, 2])
    assert np.array_equal(plant_dynamics([0, 0], 1, [2, 1]), [0, 1])


def test_reference_dynamics_examples():
    assert np.array_equal(reference_dynamics([0, 0], 1, [-24, -8]), [0, 1])
    assert np.array_equal(reference_dynamics([1, 1], 0, [-1, -3]), [1, -4])
    assert np.array_equal(reference_dynamics(np.zeros(3), 0, [-15, -23, -9]), np.zeros(3))


@given(st.integers(1, 5).flatmap(lambda m: st.tuples(
    arrays(float, m, elements=finite), arrays(float, m, elements=finite),
    arrays(float, m, elements=finite), finite)))
def test_ideal_gain_matches_reference(args):
    # A_m = A_p + b k*^T with k* = theta_m - theta_p
    theta_p, theta_m, x, r = args
    k_star = theta_m - theta_p
    u = k_star @ x + r
    assert np.allclose(plant_dynamics(x, u, theta_p), reference_dynamics(x, r, theta_m),
                       atol=1e-9)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_reference_model_bounded(name):
    cfg = builtin(name)
    spec = cfg.reference
    m = spec.theta_m.size
    x = np.zeros(m)
    h, peak = 0.01, 0.0
    f = lambda t, x: reference_dynamics(x, reference_input(spec.input, t), spec.theta_m)
    for k in range(10000):  # 100 s
        x = rk4_step(f, k * h, x, h)
        peak = max(peak, np.abs(x).max())
    # loose bound: DC gain times the input bound is well below 10 * bound
    assert peak < 10 * spec.input.bound()


# -- reference input -------------------------------------------------------------

def test_reference_input_examples():
    step = ReferenceInputSpec([], offset=1.0)
    assert all(reference_input(step, t) == 1.0 for t in (0, 1.3, 99))
    one = ReferenceInputSpec([(2, 1, 0)])
    assert reference_input(one, math.pi / 2) == pytest.approx(2.0, abs=1e-15)
    # default input at t = 0: sin(0) terms vanish, offset remains
    assert reference_input(default_reference_input(), 0.0) == pytest.approx(1.0)


def test_default_input_frequencies():
    spec = default_reference_input()
    freqs = {w for a, w, _ in spec.components if a != 0}
    if spec.offset != 0:
        freqs.add(0.0)  # the offset is the zero-frequency line
    for m in (2, 3):  # built-in plant orders
        assert len(freqs) >= math.ceil(m / 2) + 1
    t = 2.7
    assert reference_input(spec, t) == pytest.approx(
        3 * math.sin(1.1 * t) + 2 * math.sin(2.3 * t) + 1)


def test_reference_spec_defaults():
    spec = ReferenceSpec([-24, -8])
    assert np.array_equal(spec.initial_state, [0, 0])
    assert spec.input == default_reference_input()


# -- noise -----------------------------------------------------------------------

def test_measure_passthrough():
    x = np.array([0.1, -2.0])
    assert np.array_equal(measure(x, NoiseModel(), 5), x)
    assert np.array_equal(measure(x, NoiseModel("gaussian", 0.0, 1), 5), x)


def test_noise_reproducible():
    n = NoiseModel("gaussian", 0.05, 42)
    a = noise_samples(n, 3, 100)
    assert np.array_equal(a, noise_samples(NoiseModel("gaussian", 0.05, 42), 3, 100))
    assert not np.array_equal(a, noise_samples(NoiseModel("gaussian", 0.05, 43), 3, 100))
    # draw i does not depend on how many draws are requested
    assert np.array_equal(measure(np.zeros(3), n, 7), a[7])


def test_noise_statistics():
    a = noise_samples(NoiseModel("gaussian", [0.05, 0.5], 1), 2, 200000)
    assert np.allclose(a.mean(axis=0), 0, atol=5e-3)
    assert np.allclose(a.std(axis=0), [0.05, 0.5], rtol=1e-2)


def test_noise_validation():
    with pytest.raises(ValueError):
        NoiseModel("uniform", 0.1)
    with pytest.raises(ValueError):
        NoiseModel("gaussian", -0.1)


# -- hypercube -------------------------------------------------------------------

def test_hypercube():
    box = Hypercube([0, 1], [2, 3])
    corners = list(box.corners())
    assert len(corners) == 4
    assert {tuple(c) for c in corners} == {(0, 1), (2, 1), (0, 3), (2, 3)}
    assert box.contains([1, 2]) and not box.contains([3, 2])
    with pytest.raises(ValueError):
        Hypercube([1, 0], [0, 1])
