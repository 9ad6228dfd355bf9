"""Closed-loop simulation driver.

Plant, reference model, identification models, adaptive parameters and the
second-level estimator are stacked into one state vector and advanced
together with fixed-step RK4, so every subsystem sees the same plant state
and input at every stage.

Measurement noise is held constant over each integration step and only
enters the error signals (``e_c`` for direct control, ``e_i = x_i - y`` for
identification). Model regressors and state feedback use the plant state.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import SingularMatrix
from ..identification import (
    Ensemble,
    IdentModel,
    adaptive_law,
    direct_mrac_update,
    ident_dynamics,
)
from ..numerics import input_vector, rk4_step, solve_lyapunov, companion
from ..plant import eval_profile, noise_samples, plant_dynamics, reference_dynamics, reference_input
from ..second_level import (
    algebraic_alpha,
    alpha_ode_rhs,
    barycentric,
    build_error_matrix,
    error_matrix_conditioning,
    full_alpha,
)
from . import _kernel
from .config import validate

log = logging.getLogger(__name__)

#: Relative pivot size of E(t) below which a sample is logged as ill-conditioned.
E_CONDITION_WARN = 1e-8


@dataclass
class Trajectory:
    """Sampled record of one run; every array has the sample index first."""

    times: np.ndarray
    x_p: np.ndarray
    x_m: np.ndarray
    e_c: np.ndarray
    u: np.ndarray
    r: np.ndarray
    theta_true: np.ndarray
    theta_hat: np.ndarray
    x_models: np.ndarray          # (S, N, m); N = 0 for direct control
    theta_models: np.ndarray      # (S, N, m)
    alpha_hat: Optional[np.ndarray] = None   # (S, m+1) for second-level runs
    e_conditioning: Optional[np.ndarray] = None
    name: str = ""

    def __len__(self):
        return self.times.size

    @property
    def dim(self):
        return self.x_p.shape[1]

    @property
    def n_models(self):
        return self.x_models.shape[1]

    def error_matrices(self):
        """E(t) at every sample, shape (S, m, m)."""
        X = self.x_models
        return np.transpose(X[:, :-1, :] - X[:, -1:, :], (0, 2, 1))

    def window(self, t0, t1=np.inf):
        return (self.times >= t0) & (self.times <= t1)


class _ClosedLoop:
    """State layout and right-hand side for one configured run."""

    def __init__(self, config):
        self.config = c = config
        self.m = m = c.dim
        self.kind = c.controller.kind
        self.theta_m = c.reference.theta_m
        self.profile = c.plant.profile
        self.ref_input = c.reference.input
        self.b = input_vector(m)
        self.vertices = c.vertex_set()
        self.oracle = c.alpha_source == "oracle"

        if self.kind == "direct_first_level":
            thetas0 = np.zeros((0, m))
            self.ensemble = None
            self.P = solve_lyapunov(companion(self.theta_m))
            self.adaptive = False
        elif self.kind == "indirect_first_level":
            thetas0 = np.atleast_2d(c.first_level_start())
            self.ensemble = Ensemble(thetas0, self.theta_m, "adaptive", c.gains.first_level)
            self.adaptive = True
        else:
            thetas0 = self.vertices.vertices.copy()
            self.ensemble = Ensemble(thetas0, self.theta_m, c.model_mode, c.gains.first_level)
            self.adaptive = c.model_mode == "adaptive"
        self.thetas0 = thetas0
        self.n = n = thetas0.shape[0]

        sizes = [("x_p", m), ("x_m", m), ("X", n * m)]
        if self.adaptive:
            sizes.append(("T", n * m))
        if self.kind == "direct_first_level":
            sizes.append(("k", m))
        if self.kind == "second_level_ode":
            sizes.append(("a", m))
        self.sl = {}
        start = 0
        for key, size in sizes:
            self.sl[key] = slice(start, start + size)
            start += size
        self.size = start

        # algebraic variant: frozen weights after the hand-off
        self.handed_off = False
        self.frozen_alpha = None
        self.held_alpha = None
        if self.vertices is not None:
            self.alpha0 = np.full(m + 1, 1.0 / (m + 1))
        self.noise_row = np.zeros(m)
        self.gain = float(c.gains.first_level)
        self.alpha_gain = float(c.gains.alpha)
        if self.ensemble is not None:
            self.Pb = self.ensemble.Pb
        else:
            self.Pb = self.P[:, -1].copy()
        self.const_alpha = None
        if self.oracle and self.profile.kind == "constant":
            self.const_alpha = barycentric(self.vertices, self.profile.base)
        if self.oracle or self.kind == "second_level_algebraic":
            self.kernel_kind = _kernel.EXTERNAL
        else:
            self.kernel_kind = {"direct_first_level": _kernel.DIRECT,
                                "indirect_first_level": _kernel.INDIRECT,
                                "second_level_ode": _kernel.ODE}[self.kind]
        self.thetas0 = np.ascontiguousarray(self.thetas0, dtype=float)
        self.noise_row = np.zeros(m)
        self.const_theta = self.profile.base if self.profile.kind == "constant" else None

    # -- packing -------------------------------------------------------------------

    def initial_state(self):
        c = self.config
        z = np.zeros(self.size)
        x0 = c.plant.initial_state
        z[self.sl["x_p"]] = x0
        z[self.sl["x_m"]] = c.reference.initial_state
        z[self.sl["X"]] = np.tile(x0, self.n)
        if self.adaptive:
            z[self.sl["T"]] = self.thetas0.ravel()
        if "k" in self.sl:
            z[self.sl["k"]] = self.theta_m - c.first_level_start()
        if "a" in self.sl:
            z[self.sl["a"]] = self.alpha0[:-1]
        return z

    def unpack(self, z):
        m, n = self.m, self.n
        X = z[self.sl["X"]].reshape(n, m)
        thetas = z[self.sl["T"]].reshape(n, m) if self.adaptive else self.thetas0
        return z[self.sl["x_p"]], z[self.sl["x_m"]], X, thetas

    # -- control law -----------------------------------------------------------------

    def alpha(self, t, z, left=False):
        """Convex weights used by the controller (None before the algebraic hand-off)."""
        if self.kind == "second_level_algebraic" and not self.handed_off:
            return None
        if self.oracle:
            if self.const_alpha is not None:
                return self.const_alpha
            return barycentric(self.vertices, eval_profile(self.profile, t, left))
        if self.kind == "second_level_ode":
            return full_alpha(z[self.sl["a"]])
        return self.frozen_alpha

    def estimate(self, t, z):
        """The estimator's current weights, independent of what drives the feedback."""
        if "a" in self.sl:
            return full_alpha(z[self.sl["a"]])
        if self.frozen_alpha is not None:
            return self.frozen_alpha
        return self.held_alpha if self.held_alpha is not None else self.alpha0

    def theta_hat(self, t, z, left=False):
        _, _, _, thetas = self.unpack(z)
        if self.kind == "direct_first_level":
            return self.theta_m - z[self.sl["k"]]
        if self.kind == "indirect_first_level":
            return thetas[0].copy()
        alpha = self.alpha(t, z, left)
        if alpha is None:
            alpha = self.held_alpha if self.held_alpha is not None else self.alpha0
        return alpha @ thetas

    def control(self, t, z, r, left=False):
        if self.kind == "second_level_algebraic" and not self.handed_off:
            return r
        return r + (self.theta_m - self.theta_hat(t, z, left)) @ z[self.sl["x_p"]]

    def hand_off(self, t, z):
        """Switch the algebraic variant from open loop to feedback."""
        if not self.oracle:
            self.frozen_alpha = self.algebraic_estimate(z)
            self.held_alpha = self.frozen_alpha
        self.handed_off = True
        log.info("%s: control hand-off at t=%.3f, weights %s", self.config.name, t,
                 self.alpha(t, z))

    # -- dynamics --------------------------------------------------------------------

    def rhs(self, t, z, left=False):
        """Right-hand side of the stacked closed loop (compiled kernel).

        Algebraically identical to :meth:`reference_rhs`, which is assembled
        from the public per-subsystem operations.
        """
        theta_p = self.const_theta if self.const_theta is not None else \
            eval_profile(self.profile, t, left)
        r = reference_input(self.ref_input, t)
        u = self.control(t, z, r, left) if self.kernel_kind == _kernel.EXTERNAL else 0.0
        return _kernel.stacked_rhs(
            z, theta_p, r, u, self.noise_row, self.theta_m, self.thetas0, self.Pb,
            self.gain, self.alpha_gain, self.m, self.n, self.kernel_kind, self.adaptive,
            "k" in self.sl, "a" in self.sl)

    def reference_rhs(self, t, z, left=False):
        """Same vector field as :meth:`rhs`, composed from the module operations."""
        x_p, x_m, X, thetas = self.unpack(z)
        theta_p = eval_profile(self.profile, t, left)
        r = reference_input(self.ref_input, t)
        u = self.control(t, z, r, left)
        y = x_p + self.noise_row

        dz = np.empty_like(z)
        dz[self.sl["x_p"]] = plant_dynamics(x_p, u, theta_p)
        dz[self.sl["x_m"]] = reference_dynamics(x_m, r, self.theta_m)
        for i in range(self.n):
            model = IdentModel(thetas[i], X[i], "adaptive" if self.adaptive else "fixed")
            dz[self.sl["X"]][i * self.m:(i + 1) * self.m] = ident_dynamics(
                model, x_p, u, self.theta_m)
            if self.adaptive:
                dz[self.sl["T"]][i * self.m:(i + 1) * self.m] = adaptive_law(
                    X[i] - y, self.ensemble.P, x_p, self.gain)
        if "k" in self.sl:
            dz[self.sl["k"]] = direct_mrac_update(y - x_m, self.P, x_p, self.gain)
        if "a" in self.sl:
            E, e_last = build_error_matrix(X, y)
            dz[self.sl["a"]] = alpha_ode_rhs(z[self.sl["a"]], E, e_last, self.alpha_gain)
        return dz

    def algebraic_estimate(self, z):
        x_p, _, X, _ = self.unpack(z)
        E, e_last = build_error_matrix(X, x_p + self.noise_row)
        return algebraic_alpha(E, e_last).alpha_full


def run_scenario(config, validate_config=True):
    """Simulate ``config`` and return its sampled :class:`Trajectory`.

    Raises
    ------
    ConfigInvalid
        If the configuration fails validation.
    NonFiniteState
        If the closed loop diverges.
    SingularMatrix
        If the algebraic variant meets a singular E(t) at its hand-off time.
    """
    c = validate(config) if validate_config else config
    sim = _ClosedLoop(c)
    m, n = sim.m, sim.n
    h = float(c.step)
    n_steps = int(round(c.t_end / h))
    every = int(c.sample_every)
    noise = noise_samples(c.noise, m, n_steps + 1)
    k_star = None
    if sim.kind == "second_level_algebraic":
        k_star = int(round(c.controller.t_star / h))
    second = sim.kind in ("second_level_algebraic", "second_level_ode")

    n_samples = n_steps // every + 1 + (1 if n_steps % every else 0)
    rec = {
        "times": np.empty(n_samples),
        "x_p": np.empty((n_samples, m)),
        "x_m": np.empty((n_samples, m)),
        "u": np.empty(n_samples),
        "r": np.empty(n_samples),
        "theta_true": np.empty((n_samples, m)),
        "theta_hat": np.empty((n_samples, m)),
        "x_models": np.empty((n_samples, n, m)),
        "theta_models": np.empty((n_samples, n, m)),
    }
    if second:
        rec["alpha_hat"] = np.empty((n_samples, m + 1))
        rec["e_conditioning"] = np.empty(n_samples)

    def record(i, t, z):
        x_p, x_m, X, thetas = sim.unpack(z)
        r = reference_input(sim.ref_input, t)
        rec["times"][i] = t
        rec["x_p"][i] = x_p
        rec["x_m"][i] = x_m
        rec["r"][i] = r
        rec["u"][i] = sim.control(t, z, r)
        rec["theta_true"][i] = eval_profile(sim.profile, t)
        rec["theta_hat"][i] = sim.theta_hat(t, z)
        rec["x_models"][i] = X
        rec["theta_models"][i] = thetas
        if second:
            rec["alpha_hat"][i] = sim.estimate(t, z)
            E, _ = build_error_matrix(X, x_p)
            cond = error_matrix_conditioning(E)
            rec["e_conditioning"][i] = cond
            if t >= 0.1 and cond < E_CONDITION_WARN:
                log.warning("%s: E(t) nearly singular at t=%.3f (pivot ratio %.2e)",
                            c.name, t, cond)

    def refresh_algebraic(z):
        try:
            sim.held_alpha = sim.algebraic_estimate(z)
        except SingularMatrix:
            pass

    z = sim.initial_state()
    sim.noise_row = noise[0]
    record(0, 0.0, z)
    i = 1
    for k in range(n_steps):
        a = k * h
        b = (k + 1) * h
        sim.noise_row = noise[k]
        if k == k_star:
            sim.hand_off(a, z)
        points = [a, *sim.profile.breakpoints(a, b), b]
        for s0, s1 in zip(points[:-1], points[1:]):
            mid = 0.5 * (s0 + s1)
            z = rk4_step(lambda t, zz: sim.rhs(t, zz, left=t > mid), s0, z, s1 - s0)
        if (k + 1) % every == 0 or k + 1 == n_steps:
            sim.noise_row = noise[k + 1]
            if k_star is not None and not sim.handed_off:
                refresh_algebraic(z)
            record(i, b, z)
            i += 1

    rec["e_c"] = rec["x_p"] - rec["x_m"]
    return Trajectory(name=c.name, **rec)
