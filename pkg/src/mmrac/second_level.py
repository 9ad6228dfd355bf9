"""Second-level adaptation: estimating the convex weights of m+1 models.

If ``theta_p = sum(alpha_i * theta_i)`` with ``sum(alpha_i) = 1`` and every
model starts from the plant state, the identification errors satisfy
``sum(alpha_i * e_i(t)) = 0`` for all t. Eliminating the last weight gives the
m x m linear system

    E(t) alpha_bar = -e_last(t),   column i of E = x_i - x_last,

whose matrix depends only on model states. ``alpha_bar`` can be found by a
single solve or by the gradient flow
``alpha_bar' = gain * (-E^T E alpha_bar - E^T e_last)``, and the plant
estimate is ``Theta @ alpha``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBox
from .numerics import inf_norm, lu_pivots, solve_linear

HULL_TOL = 1e-12


def full_alpha(alpha_bar):
    """Append the last weight ``1 - sum(alpha_bar)``."""
    alpha_bar = np.asarray(alpha_bar, dtype=float).ravel()
    return np.append(alpha_bar, 1.0 - alpha_bar.sum())


@dataclass
class AlphaEstimate:
    alpha_bar: np.ndarray

    def __post_init__(self):
        self.alpha_bar = np.asarray(self.alpha_bar, dtype=float).ravel()

    @property
    def alpha_full(self):
        return full_alpha(self.alpha_bar)


class VertexSet:
    """Parameters of the m+1 identification models, one row per model."""

    def __init__(self, vertices):
        vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        n, m = vertices.shape
        if n < 2:
            raise ValueError("a vertex set needs at least two vertices")
        self.vertices = vertices

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def Theta(self):
        """Vertices as columns, shape (m, N)."""
        return self.vertices.T

    def centroid(self):
        return self.vertices.mean(axis=0)

    def __len__(self):
        return self.n_vertices

    def __repr__(self):
        return f"VertexSet({self.vertices.tolist()!r})"


def _as_vertices(vertices):
    return vertices if isinstance(vertices, VertexSet) else VertexSet(vertices)


def build_error_matrix(model_states, x_p):
    """Return ``(E, e_last)`` from the states of m+1 models and the plant.

    ``E[:, i] = x_i - x_last`` and ``e_last = x_last - x_p``. ``E`` does not
    involve ``x_p`` at all.
    """
    X = np.asarray(model_states, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] + 1:
        raise ValueError(f"expected m+1 model states of dimension m, got {X.shape}")
    last = X[-1]
    E = (X[:-1] - last).T
    e_last = last - np.asarray(x_p, dtype=float)
    return E, e_last


def algebraic_alpha(E, e_last):
    """One-shot estimate ``alpha_bar = -E^{-1} e_last``.

    Raises :class:`SingularMatrix` when ``E`` is (numerically) singular, for
    instance at the initial instant where every error is zero.
    """
    alpha_bar = solve_linear(E, -np.asarray(e_last, dtype=float))
    return AlphaEstimate(alpha_bar)


def alpha_ode_rhs(alpha_hat, E, e_last, gain=1.0):
    """Gradient flow ``gain * (-E^T E alpha_hat - E^T e_last)``."""
    E = np.asarray(E, dtype=float)
    return -gain * (E.T @ (E @ np.asarray(alpha_hat, dtype=float) + np.asarray(e_last, dtype=float)))


def error_matrix_conditioning(E):
    """Smallest LU pivot of ``E`` relative to its infinity norm (0 if E = 0)."""
    scale = inf_norm(E)
    if scale == 0.0:
        return 0.0
    return float(lu_pivots(E).min() / scale)


def phi_matrix(thetas):
    """Columns ``theta_i - theta_last`` for the first m models; thetas is (m+1, m)."""
    thetas = np.asarray(thetas, dtype=float)
    return (thetas[:-1] - thetas[-1]).T


def two_instant_alpha(Phi_t1, Phi_t2, theta_last_t1, theta_last_t2):
    """Recover ``alpha_bar`` from two snapshots of adaptive-model parameters.

    ``Phi(t) alpha_bar = theta_p - theta_last(t)`` holds at every t, so
    subtracting two instants removes the unknown plant:
    ``(Phi(t1) - Phi(t2)) alpha_bar = theta_last(t2) - theta_last(t1)``.
    """
    D = np.asarray(Phi_t1, dtype=float) - np.asarray(Phi_t2, dtype=float)
    rhs = np.asarray(theta_last_t2, dtype=float) - np.asarray(theta_last_t1, dtype=float)
    return solve_linear(D, rhs)


def reconstruct_theta(Theta, alpha_full):
    """Plant estimate ``Theta @ alpha`` (Theta has the models as columns)."""
    return np.asarray(Theta, dtype=float) @ np.asarray(alpha_full, dtype=float)


def second_level_gain(theta_m, Theta, alpha_full):
    """Feedback gain ``theta_m - Theta @ alpha``."""
    return np.asarray(theta_m, dtype=float) - reconstruct_theta(Theta, alpha_full)


def barycentric(vertices, theta_p):
    """Affine coordinates of ``theta_p`` with respect to m+1 simplex vertices.

    Solves ``[Theta; 1^T] alpha = [theta_p; 1]``.
    """
    vs = _as_vertices(vertices)
    if vs.n_vertices != vs.dim + 1:
        raise ValueError("barycentric coordinates need exactly m+1 vertices")
    A = np.vstack([vs.Theta, np.ones(vs.n_vertices)])
    rhs = np.append(np.asarray(theta_p, dtype=float), 1.0)
    return solve_linear(A, rhs)


def in_hull(vertices, theta_p):
    alpha = barycentric(vertices, theta_p)
    return bool(np.all(alpha >= -HULL_TOL) and np.all(alpha <= 1.0 + HULL_TOL))


def default_vertices(box, margin=0.1):
    """A simplex that contains the whole hypercube ``box``.

    The box is first widened by ``margin`` times its side lengths on every
    side. With ``c`` the widened lower corner and ``w`` its side lengths, the
    vertices are ``c`` and ``c + m * w_i * e_i`` for i = 1..m: any box point
    ``c + sum(s_i w_i e_i)`` with ``s_i`` in [0, 1] has the non-negative
    coordinates ``s_i / m`` and ``1 - sum(s_i) / m``.
    """
    lower = np.asarray(box.lower, dtype=float)
    upper = np.asarray(box.upper, dtype=float)
    width = upper - lower
    if np.any(width <= 0):
        raise DegenerateBox(f"box has zero-length sides: {lower} .. {upper}")
    if margin < 0:
        raise ValueError("margin must be non-negative")
    m = lower.size
    corner = lower - margin * width
    span = m * (1.0 + 2.0 * margin) * width
    vertices = np.vstack([corner, corner + np.diag(span)])
    vs = VertexSet(vertices)
    for point in box.corners():
        if not in_hull(vs, point):
            raise RuntimeError(f"constructed simplex misses box corner {point}")
    return vs
