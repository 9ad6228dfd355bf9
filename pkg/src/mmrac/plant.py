"""Companion-form plant, reference model, parameter profiles and signals."""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .numerics import companion_apply

PROFILE_KINDS = ("constant", "sinusoidal", "square_wave")


@dataclass
class ParameterProfile:
    """Time history of the plant parameter vector.

    ``constant`` returns ``base``; ``sinusoidal`` returns
    ``base + amplitude * sin(frequency * t + phase_offsets)``; ``square_wave``
    returns ``base + amplitude * f(t)`` where ``f`` is +1 on the first half of
    each period and -1 on the second.
    """

    kind: str
    base: np.ndarray
    amplitude: Optional[np.ndarray] = None
    frequency: float = 0.0
    phase_offsets: Optional[np.ndarray] = None
    period: Optional[float] = None

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        self.base = np.asarray(self.base, dtype=float).ravel()
        m = self.base.size
        self.amplitude = (np.zeros(m) if self.amplitude is None
                          else np.asarray(self.amplitude, dtype=float).ravel())
        self.phase_offsets = (np.zeros(m) if self.phase_offsets is None
                              else np.asarray(self.phase_offsets, dtype=float).ravel())
        if self.amplitude.size != m or self.phase_offsets.size != m:
            raise ValueError("amplitude and phase_offsets must match base length")
        if self.kind == "square_wave" and not (self.period and self.period > 0):
            raise ValueError("square-wave profile needs a positive period")

    @property
    def dim(self):
        return self.base.size

    @property
    def time_invariant(self):
        return self.kind == "constant" or not np.any(self.amplitude)

    def breakpoints(self, t0, t1):
        """Discontinuity instants strictly inside ``(t0, t1)``."""
        if self.kind != "square_wave":
            return []
        half = 0.5 * self.period
        k = math.floor(t0 / half) + 1
        out = []
        while k * half < t1:
            if k * half > t0:
                out.append(k * half)
            k += 1
        return out

    def bounds(self):
        """Entrywise (lower, upper) envelope of the profile."""
        if self.kind == "constant":
            return self.base.copy(), self.base.copy()
        amp = np.abs(self.amplitude)
        return self.base - amp, self.base + amp


def square_wave(t, period, left=False):
    """Zero-mean unit square wave, +1 on ``[0, period/2)``.

    With ``left=True`` the left limit is returned at a switching instant, which
    lets an integrator treat a step ending exactly on a jump as smooth.
    """
    half = 0.5 * period
    if left and t > 0:
        k = math.ceil(t / half) - 1
    else:
        k = math.floor(t / half)
    return 1.0 if k % 2 == 0 else -1.0


def eval_profile(profile, t, left=False):
    """Evaluate ``profile`` at time ``t`` (seconds)."""
    if profile.kind == "constant":
        return profile.base.copy()
    if profile.kind == "sinusoidal":
        return profile.base + profile.amplitude * np.sin(
            profile.frequency * t + profile.phase_offsets)
    return profile.base + profile.amplitude * square_wave(t, profile.period, left)


@dataclass
class ReferenceInputSpec:
    """``r(t) = offset + sum(a * sin(w * t + phase))`` over ``components``."""

    components: List[Tuple[float, float, float]] = field(default_factory=list)
    offset: float = 0.0

    def __post_init__(self):
        self.components = [tuple(float(v) for v in c) for c in self.components]
        for c in self.components:
            if len(c) != 3:
                raise ValueError("each component is (amplitude, frequency, phase)")

    def bound(self):
        return abs(self.offset) + sum(abs(a) for a, _, _ in self.components)


def default_reference_input():
    """Two-tone input with an offset: 3 sin(1.1 t) + 2 sin(2.3 t) + 1."""
    return ReferenceInputSpec(components=[(3.0, 1.1, 0.0), (2.0, 2.3, 0.0)], offset=1.0)


def reference_input(spec, t):
    r = spec.offset
    for amplitude, frequency, phase in spec.components:
        r += amplitude * math.sin(frequency * t + phase)
    return r


@dataclass
class PlantSpec:
    profile: ParameterProfile
    initial_state: Optional[np.ndarray] = None

    def __post_init__(self):
        m = self.profile.dim
        self.initial_state = (np.zeros(m) if self.initial_state is None
                              else np.asarray(self.initial_state, dtype=float).ravel())
        if self.initial_state.size != m:
            raise ValueError("initial_state must match the parameter dimension")


@dataclass
class ReferenceSpec:
    theta_m: np.ndarray
    initial_state: Optional[np.ndarray] = None
    input: ReferenceInputSpec = field(default_factory=default_reference_input)

    def __post_init__(self):
        self.theta_m = np.asarray(self.theta_m, dtype=float).ravel()
        m = self.theta_m.size
        self.initial_state = (np.zeros(m) if self.initial_state is None
                              else np.asarray(self.initial_state, dtype=float).ravel())
        if self.initial_state.size != m:
            raise ValueError("initial_state must match theta_m")


@dataclass
class NoiseModel:
    """Additive Gaussian measurement noise on the plant state.

    ``std_dev`` is a scalar or one value per state. Draw ``i`` of a run is row
    ``i`` of ``default_rng(seed).standard_normal((count, m))``, so the sample
    path depends only on the seed.
    """

    kind: str = "none"
    std_dev: object = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if np.any(np.asarray(self.std_dev, dtype=float) < 0):
            raise ValueError("std_dev must be non-negative")

    @property
    def active(self):
        return self.kind == "gaussian" and bool(np.any(np.asarray(self.std_dev) > 0))


def noise_samples(noise, dim, count):
    """The first ``count`` noise draws of a run as an array of shape (count, dim)."""
    if not noise.active:
        return np.zeros((count, dim))
    std = np.broadcast_to(np.asarray(noise.std_dev, dtype=float), (dim,))
    rng = np.random.default_rng(noise.seed)
    return rng.standard_normal((count, dim)) * std


def measure(x_p, noise, draw_index):
    """Measured plant state: ``x_p`` plus draw ``draw_index`` of ``noise``."""
    x_p = np.asarray(x_p, dtype=float)
    if not noise.active:
        return x_p.copy()
    return x_p + noise_samples(noise, x_p.size, draw_index + 1)[draw_index]


@dataclass
class Hypercube:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float).ravel()
        self.upper = np.asarray(self.upper, dtype=float).ravel()
        if self.lower.shape != self.upper.shape:
            raise ValueError("lower and upper must have the same length")
        if np.any(self.lower > self.upper):
            raise ValueError("lower must not exceed upper")

    def corners(self):
        m = self.lower.size
        for mask in range(2 ** m):
            pick = np.array([(mask >> j) & 1 for j in range(m)], dtype=bool)
            yield np.where(pick, self.upper, self.lower)

    def contains(self, theta):
        theta = np.asarray(theta, dtype=float)
        return bool(np.all(theta >= self.lower) and np.all(theta <= self.upper))


def plant_dynamics(x_p, u, theta_p):
    """``A_p x_p + b u`` with ``A_p = companion(theta_p)``."""
    dx = companion_apply(np.asarray(theta_p, dtype=float), np.asarray(x_p, dtype=float))
    dx[-1] += u
    return dx


def reference_dynamics(x_m, r, theta_m):
    """``A_m x_m + b r``; same algebra as :func:`plant_dynamics`."""
    return plant_dynamics(x_m, r, theta_m)


def sinusoidal_profile(base, amplitude, frequency, phase_offsets=None):
    return ParameterProfile("sinusoidal", np.asarray(base, float), np.asarray(amplitude, float),
                            frequency=frequency, phase_offsets=phase_offsets)


def constant_profile(base: Sequence[float]):
    return ParameterProfile("constant", np.asarray(base, dtype=float))
