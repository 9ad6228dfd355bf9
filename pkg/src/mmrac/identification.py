"""First-level adaptive machinery.

Identification models share the series-parallel structure

    x_i' = A_m x_i + (A_i - A_m) x_p + b u,

and, because ``A_i`` and ``A_m`` are both companion matrices,
``(A_i - A_m) x_p = b (theta_i - theta_m)^T x_p``. Adaptive models update
``theta_i`` with the gradient law ``theta_i' = -gain * (e_i^T P b) x_p`` where
``e_i = x_i - x_p``.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import companion, companion_apply, input_vector, solve_lyapunov

MODEL_MODES = ("fixed", "adaptive")


@dataclass
class IdentModel:
    theta_i: np.ndarray
    x_i: np.ndarray
    mode: str = "fixed"

    def __post_init__(self):
        self.theta_i = np.asarray(self.theta_i, dtype=float).ravel()
        self.x_i = np.asarray(self.x_i, dtype=float).ravel()
        if self.theta_i.shape != self.x_i.shape:
            raise ValueError("theta_i and x_i must have the same dimension")
        if self.mode not in MODEL_MODES:
            raise ValueError(f"unknown model mode {self.mode!r}")


class Ensemble:
    """N identification models driven by the same plant state and input.

    Model states and parameters are kept as (N, m) arrays so that a whole bank
    can be advanced with a handful of vectorised operations. With ``N == 1``
    this is the single-model identifier used for indirect control.

    Parameters
    ----------
    thetas : array_like, shape (N, m)
        Initial model parameters (the simplex vertices for second-level use).
    theta_m : array_like, shape (m,)
        Reference-model parameters; ``companion(theta_m)`` must be Hurwitz.
    mode : {'fixed', 'adaptive'}
    gain : float
        Adaptation gain of the gradient law (ignored for fixed models).
    Q : array_like, optional
        Right-hand side of the Lyapunov equation, identity by default.
    """

    def __init__(self, thetas, theta_m, mode="fixed", gain=10.0, Q=None):
        self.thetas0 = np.atleast_2d(np.asarray(thetas, dtype=float))
        self.theta_m = np.asarray(theta_m, dtype=float).ravel()
        n_models, m = self.thetas0.shape
        if m != self.theta_m.size:
            raise ValueError("model parameters and theta_m differ in dimension")
        if mode not in MODEL_MODES:
            raise ValueError(f"unknown model mode {mode!r}")
        if gain <= 0:
            raise ValueError("adaptation gain must be positive")
        self.mode = mode
        self.gain = float(gain)
        self.P = solve_lyapunov(companion(self.theta_m), Q)
        self.Pb = self.P @ input_vector(m)

    @property
    def n_models(self):
        return self.thetas0.shape[0]

    @property
    def dim(self):
        return self.thetas0.shape[1]

    @property
    def adaptive(self):
        return self.mode == "adaptive"

    def models(self, states):
        return [IdentModel(th, x, self.mode) for th, x in zip(self.thetas0, states)]

    def state_derivative(self, X, thetas, x_p, u):
        """Derivatives of all model states, shape (N, m)."""
        dX = np.empty_like(X)
        dX[:, :-1] = X[:, 1:]
        dX[:, -1] = X @ self.theta_m + (thetas - self.theta_m) @ x_p + u
        return dX

    def parameter_derivative(self, errors, x_p):
        """Gradient-law derivatives for all models given errors of shape (N, m)."""
        return -self.gain * np.outer(errors @ self.Pb, x_p)


def ident_dynamics(model, x_p, u, theta_m):
    """Right-hand side of one identification model."""
    theta_m = np.asarray(theta_m, dtype=float)
    x_p = np.asarray(x_p, dtype=float)
    dx = companion_apply(theta_m, model.x_i)
    dx[-1] += (model.theta_i - theta_m) @ x_p + u
    return dx


def error_dynamics(e_i, phi_i, x_p, theta_m):
    """``A_m e_i + b phi_i^T x_p``: identification error with parameter error ``phi_i``."""
    de = companion_apply(np.asarray(theta_m, dtype=float), np.asarray(e_i, dtype=float))
    de[-1] += np.asarray(phi_i, dtype=float) @ np.asarray(x_p, dtype=float)
    return de


def _gradient(error, P, x_p, gain):
    P = np.asarray(P, dtype=float)
    error = np.asarray(error, dtype=float)
    x_p = np.asarray(x_p, dtype=float)
    return -gain * (error @ P[:, -1]) * x_p


def adaptive_law(e_i, P, x_p, gain=1.0):
    """Parameter derivative ``-gain * (e_i^T P b) x_p`` of an adaptive model."""
    return _gradient(e_i, P, x_p, gain)


def direct_mrac_update(e_c, P, x_p, gain=1.0):
    """Feedback-gain derivative of direct MRAC, driven by ``e_c = x_p - x_m``."""
    return _gradient(e_c, P, x_p, gain)


def control_input(k, x_p, r):
    return float(r + np.asarray(k, dtype=float) @ np.asarray(x_p, dtype=float))


def indirect_gain(theta_m, theta_hat):
    """Certainty-equivalence feedback gain ``theta_m - theta_hat``."""
    return np.asarray(theta_m, dtype=float) - np.asarray(theta_hat, dtype=float)
