"""Built-in scenarios: two time-invariant second-order plants and two
time-varying third-order experiments.

Values the scenarios do not pin down (reference input, gains, initial states,
and some vertex sets) are filled with the package defaults and listed in each
config's ``notes``.
"""

import math

import numpy as np

from ..errors import UnknownScenario
from ..plant import (
    Hypercube,
    NoiseModel,
    ParameterProfile,
    PlantSpec,
    ReferenceSpec,
    constant_profile,
    default_reference_input,
)
from ..second_level import VertexSet
from .config import BoxVertices, ControllerSpec, Gains, ScenarioConfig

_DEFAULTS_NOTE = ("default: r(t) = 3 sin(1.1t) + 2 sin(2.3t) + 1, zero initial states, "
                  "gains first_level=10 alpha=50, step 1e-3 s")

#: Averaging window for mean errors when comparing controllers on a built-in.
METRIC_WINDOWS = {
    "simulation1": (0.0, math.inf),
    "example1": (0.0, math.inf),
    "experiment1": (20.0, 120.0),
    "experiment2": (20.0, 120.0),
}

EXPERIMENT_THETA_M = [-15.0, -23.0, -9.0]
EXPERIMENT_BOX = Hypercube([1.0, 2.0, 2.0], [5.0, 6.0, 4.0])


def _base(name, theta_p_profile, theta_m, controller, vertices, model_mode, t_end, notes):
    return ScenarioConfig(
        name=name,
        plant=PlantSpec(theta_p_profile),
        reference=ReferenceSpec(np.asarray(theta_m, dtype=float), input=default_reference_input()),
        controller=controller,
        model_mode=model_mode,
        vertices=vertices,
        gains=Gains(first_level=10.0, alpha=50.0),
        noise=NoiseModel(),
        t_end=t_end,
        step=1e-3,
        sample_every=10,
        notes=[_DEFAULTS_NOTE, *notes],
    )


def simulation1():
    return _base(
        "simulation1",
        constant_profile([2.0, 1.0]),
        [-1.0, -3.0],
        ControllerSpec("second_level_algebraic", t_star=1.0),
        BoxVertices(Hypercube([-5.0, -5.0], [5.0, 5.0]), margin=0.1),
        "fixed",
        10.0,
        ["vertices: not given; generated from the box [-5, 5]^2",
         "open loop until t_star, then fixed gain from the algebraic weights"],
    )


def example1():
    return _base(
        "example1",
        constant_profile([5.0, 3.0]),
        [-24.0, -8.0],
        ControllerSpec("second_level_ode"),
        VertexSet([[-10.0, -10.0], [15.0, -10.0], [5.0, 15.0]]),
        "adaptive",
        100.0,
        ["model_mode: adaptive models chosen (not stated explicitly)"],
    )


def _experiment(name, profile, note):
    return _base(
        name,
        profile,
        EXPERIMENT_THETA_M,
        ControllerSpec("second_level_ode"),
        BoxVertices(EXPERIMENT_BOX, margin=0.1),
        "fixed",
        120.0,
        [note, "vertices: not given; generated from the box "
               "[1,5] x [2,6] x [2,4] which contains every plant value"],
    )


def experiment1():
    profile = ParameterProfile("sinusoidal", [3.0, 4.0, 3.0], amplitude=[1.0, 1.0, 0.0],
                               frequency=0.5, phase_offsets=[0.0, math.pi / 2, 0.0])
    return _experiment("experiment1", profile, "theta_p(t) = [3 + sin(0.5t), 4 + cos(0.5t), 3]")


def experiment2():
    profile = ParameterProfile("square_wave", [3.0, 4.0, 3.0], amplitude=[1.0, 1.0, 0.0],
                               period=40.0)
    return _experiment("experiment2", profile,
                       "theta_p(t) = [3 + f(t), 4 + f(t), 3], f a unit square wave of "
                       "period 40 starting at +1 (initial sign is a convention)")


BUILTINS = {
    "simulation1": simulation1,
    "example1": example1,
    "experiment1": experiment1,
    "experiment2": experiment2,
}


def builtin(name):
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UnknownScenario(f"unknown built-in scenario {name!r}; "
                              f"choose from {sorted(BUILTINS)}") from None
