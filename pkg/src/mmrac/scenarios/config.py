"""Declarative scenario description and its JSON form.

A scenario file is a single JSON object whose keys mirror
:class:`ScenarioConfig`::

    {
      "name": "example1",
      "plant": {"profile": {"kind": "constant", "base": [5, 3]},
                "initial_state": [0, 0]},
      "reference": {"theta_m": [-24, -8], "initial_state": [0, 0],
                    "input": {"components": [[3, 1.1, 0], [2, 2.3, 0]], "offset": 1}},
      "controller": {"kind": "second_level_ode"},
      "model_mode": "adaptive",
      "vertices": [[-10, -10], [15, -10], [5, 15]],
      "gains": {"first_level": 10, "alpha": 50},
      "noise": {"kind": "none", "std_dev": 0, "seed": 0},
      "t_end": 100, "step": 0.001, "sample_every": 10
    }

``vertices`` may instead be ``{"lower": [...], "upper": [...], "margin": 0.1}``
to have a containing simplex generated from a parameter box.
"""

import json
from dataclasses import dataclass, field, replace
from typing import List, Optional, Union

import numpy as np

from ..errors import ConfigInvalid, NotStable, SingularMatrix
from ..numerics import companion, solve_lyapunov
from ..plant import (
    Hypercube,
    NoiseModel,
    ParameterProfile,
    PlantSpec,
    ReferenceInputSpec,
    ReferenceSpec,
    eval_profile,
)
from ..second_level import VertexSet, barycentric, default_vertices, in_hull

CONTROLLER_KINDS = (
    "direct_first_level",
    "indirect_first_level",
    "second_level_algebraic",
    "second_level_ode",
)
SECOND_LEVEL = ("second_level_algebraic", "second_level_ode")
ALPHA_SOURCES = ("estimate", "oracle")

#: Number of instants at which hull membership of a time-varying plant is checked.
HULL_SAMPLES = 400


@dataclass
class ControllerSpec:
    kind: str
    t_star: Optional[float] = None

    @property
    def second_level(self):
        return self.kind in SECOND_LEVEL


@dataclass
class Gains:
    first_level: float = 10.0
    alpha: float = 50.0


@dataclass
class BoxVertices:
    """Vertices generated from a parameter box by :func:`default_vertices`."""

    box: Hypercube
    margin: float = 0.1


@dataclass
class ScenarioConfig:
    """Everything needed to reproduce one closed-loop run.

    ``initial_estimate`` seeds first-level controllers (the plant estimate for
    indirect control, ``theta_m - initial_estimate`` as gain for direct
    control); it defaults to the vertex centroid, or to ``theta_m`` when no
    vertices are given. ``alpha_source='oracle'`` feeds the true convex
    weights to a second-level controller instead of its estimate.
    """

    name: str
    plant: PlantSpec
    reference: ReferenceSpec
    controller: ControllerSpec
    model_mode: str = "fixed"
    vertices: Union[VertexSet, BoxVertices, None] = None
    gains: Gains = field(default_factory=Gains)
    noise: NoiseModel = field(default_factory=NoiseModel)
    t_end: float = 20.0
    step: float = 1e-3
    sample_every: int = 10
    initial_estimate: Optional[np.ndarray] = None
    alpha_source: str = "estimate"
    notes: List[str] = field(default_factory=list)

    @property
    def dim(self):
        return self.plant.profile.dim

    def vertex_set(self):
        if self.vertices is None:
            return None
        if isinstance(self.vertices, BoxVertices):
            return default_vertices(self.vertices.box, self.vertices.margin)
        return self.vertices

    def first_level_start(self):
        if self.initial_estimate is not None:
            return np.asarray(self.initial_estimate, dtype=float)
        vs = self.vertex_set()
        return vs.centroid() if vs is not None else self.reference.theta_m.copy()

    def replace(self, **changes):
        return replace(self, **changes)


def validate(config):
    """Raise :class:`ConfigInvalid` unless ``config`` can be simulated."""
    c = config
    if not c.step > 0 or not c.t_end > 0:
        raise ConfigInvalid("step and t_end must be positive")
    if c.step > c.t_end:
        raise ConfigInvalid("step exceeds t_end")
    if int(c.sample_every) < 1:
        raise ConfigInvalid("sample_every must be >= 1")
    if c.controller.kind not in CONTROLLER_KINDS:
        raise ConfigInvalid(f"unknown controller {c.controller.kind!r}")
    if c.model_mode not in ("fixed", "adaptive"):
        raise ConfigInvalid(f"unknown model_mode {c.model_mode!r}")
    if c.alpha_source not in ALPHA_SOURCES:
        raise ConfigInvalid(f"unknown alpha_source {c.alpha_source!r}")
    if c.gains.first_level <= 0 or c.gains.alpha <= 0:
        raise ConfigInvalid("gains must be positive")
    m = c.dim
    if c.reference.theta_m.size != m:
        raise ConfigInvalid("theta_m and plant parameters differ in dimension")
    try:
        solve_lyapunov(companion(c.reference.theta_m))
    except NotStable as exc:
        raise ConfigInvalid(f"reference model is not Hurwitz: {exc}") from exc
    if c.initial_estimate is not None and np.asarray(c.initial_estimate).size != m:
        raise ConfigInvalid("initial_estimate has the wrong dimension")

    try:
        vs = c.vertex_set()
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc
    if vs is not None and vs.dim != m:
        raise ConfigInvalid("vertex dimension differs from plant dimension")

    if c.controller.second_level:
        if vs is None:
            raise ConfigInvalid("second-level control needs vertices")
        if vs.n_vertices != m + 1:
            raise ConfigInvalid(f"second-level control needs exactly {m + 1} vertices, "
                                f"got {vs.n_vertices}")
        if c.controller.kind == "second_level_algebraic":
            t_star = c.controller.t_star
            if t_star is None or not 0 < t_star < c.t_end:
                raise ConfigInvalid("second_level_algebraic needs 0 < t_star < t_end")
        try:
            for t in _hull_check_times(c):
                if not in_hull(vs, eval_profile(c.plant.profile, t)):
                    raise ConfigInvalid(f"plant parameters leave the model hull at t={t:.4g}")
        except SingularMatrix as exc:
            raise ConfigInvalid(f"vertices are affinely dependent: {exc}") from exc
    return config


def _hull_check_times(c):
    profile = c.plant.profile
    if profile.kind == "constant":
        return [0.0]
    times = list(np.linspace(0.0, c.t_end, HULL_SAMPLES))
    if profile.kind == "sinusoidal" and profile.frequency > 0:
        # dense enough to see every extremum within one period
        period = 2 * np.pi / profile.frequency
        times += list(np.arange(0.0, min(c.t_end, period), period / HULL_SAMPLES))
    return times


def oracle_alpha(config, t, vertices=None):
    """True convex weights of the plant at time ``t`` w.r.t. the initial vertices."""
    vs = vertices if vertices is not None else config.vertex_set()
    return barycentric(vs, eval_profile(config.plant.profile, t))


# -- dictionary / JSON conversion -------------------------------------------------

def _arr(value):
    return None if value is None else np.asarray(value, dtype=float).tolist()


def to_dict(config):
    c = config
    p = c.plant.profile
    profile = {"kind": p.kind, "base": _arr(p.base)}
    if p.kind != "constant":
        profile.update(amplitude=_arr(p.amplitude), phase_offsets=_arr(p.phase_offsets))
        if p.kind == "sinusoidal":
            profile["frequency"] = p.frequency
        else:
            profile["period"] = p.period
    if isinstance(c.vertices, BoxVertices):
        vertices = {"lower": _arr(c.vertices.box.lower), "upper": _arr(c.vertices.box.upper),
                    "margin": c.vertices.margin}
    elif c.vertices is not None:
        vertices = _arr(c.vertices.vertices)
    else:
        vertices = None
    controller = {"kind": c.controller.kind}
    if c.controller.t_star is not None:
        controller["t_star"] = c.controller.t_star
    out = {
        "name": c.name,
        "plant": {"profile": profile, "initial_state": _arr(c.plant.initial_state)},
        "reference": {
            "theta_m": _arr(c.reference.theta_m),
            "initial_state": _arr(c.reference.initial_state),
            "input": {"components": [list(comp) for comp in c.reference.input.components],
                      "offset": c.reference.input.offset},
        },
        "controller": controller,
        "model_mode": c.model_mode,
        "vertices": vertices,
        "gains": {"first_level": c.gains.first_level, "alpha": c.gains.alpha},
        "noise": {"kind": c.noise.kind, "std_dev": _arr(c.noise.std_dev), "seed": c.noise.seed},
        "t_end": c.t_end,
        "step": c.step,
        "sample_every": c.sample_every,
        "alpha_source": c.alpha_source,
        "notes": list(c.notes),
    }
    if c.initial_estimate is not None:
        out["initial_estimate"] = _arr(c.initial_estimate)
    return out


def from_dict(data):
    """Build a :class:`ScenarioConfig` from parsed JSON, raising ConfigInvalid."""
    try:
        return _from_dict(data)
    except ConfigInvalid:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"malformed scenario: {exc!r}") from exc


def _from_dict(data):
    if not isinstance(data, dict):
        raise ConfigInvalid("scenario must be a JSON object")
    pl = data["plant"]
    prof = pl["profile"]
    profile = ParameterProfile(
        kind=prof.get("kind", "constant"),
        base=prof["base"],
        amplitude=prof.get("amplitude"),
        frequency=float(prof.get("frequency", 0.0)),
        phase_offsets=prof.get("phase_offsets"),
        period=prof.get("period"),
    )
    plant = PlantSpec(profile, pl.get("initial_state"))
    ref = data["reference"]
    inp = ref.get("input")
    reference = ReferenceSpec(
        theta_m=ref["theta_m"],
        initial_state=ref.get("initial_state"),
        **({} if inp is None else {"input": ReferenceInputSpec(
            components=inp.get("components", []), offset=float(inp.get("offset", 0.0)))}),
    )
    ctrl = data["controller"]
    if isinstance(ctrl, str):
        ctrl = {"kind": ctrl}
    controller = ControllerSpec(ctrl["kind"], ctrl.get("t_star"))
    raw_vertices = data.get("vertices")
    if raw_vertices is None:
        vertices = None
    elif isinstance(raw_vertices, dict):
        vertices = BoxVertices(Hypercube(raw_vertices["lower"], raw_vertices["upper"]),
                               float(raw_vertices.get("margin", 0.1)))
    else:
        vertices = VertexSet(raw_vertices)
    gains = Gains(**data.get("gains", {}))
    nz = data.get("noise") or {}
    noise = NoiseModel(kind=nz.get("kind", "none"), std_dev=nz.get("std_dev", 0.0),
                       seed=int(nz.get("seed", 0)))
    config = ScenarioConfig(
        name=str(data.get("name", "scenario")),
        plant=plant,
        reference=reference,
        controller=controller,
        model_mode=data.get("model_mode", "fixed"),
        vertices=vertices,
        gains=gains,
        noise=noise,
        t_end=float(data.get("t_end", 20.0)),
        step=float(data.get("step", 1e-3)),
        sample_every=int(data.get("sample_every", 10)),
        initial_estimate=data.get("initial_estimate"),
        alpha_source=data.get("alpha_source", "estimate"),
        notes=list(data.get("notes", [])),
    )
    return config


def load(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{path}: {exc}") from exc
    return validate(from_dict(data))


def dump(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(config), fh, indent=2)
        fh.write("\n")
