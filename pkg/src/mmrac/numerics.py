"""Small dense linear algebra and fixed-step integration helpers.

Everything here works on plain numpy arrays. Dimensions stay small (the
largest system solved is the m^2 x m^2 Kronecker form of a Lyapunov
equation with m <= 10), so clarity wins over asymptotic cost.
"""

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import NonFiniteState, NotStable, SingularMatrix

#: Relative pivot threshold below which a matrix is treated as singular.
PIVOT_RTOL = 1e-12


def companion(theta):
    """Companion matrix with ones on the superdiagonal and ``theta`` as last row.

    >>> companion([-1.0, -3.0])
    array([[ 0.,  1.],
           [-1., -3.]])
    """
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size < 1:
        raise ValueError("theta must have at least one entry")
    A = np.eye(theta.size, k=1)
    A[-1, :] = theta
    return A


def input_vector(m):
    """The input vector b = [0, ..., 0, 1] shared by every companion system."""
    b = np.zeros(m)
    b[-1] = 1.0
    return b


def companion_apply(theta, x):
    """``companion(theta) @ x`` without forming the matrix."""
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    out[:-1] = x[1:]
    out[-1] = theta @ x
    return out


def _check_finite(name, arr):
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")


def inf_norm(A):
    """Induced infinity norm (maximum absolute row sum)."""
    A = np.atleast_2d(A)
    return float(np.abs(A).sum(axis=1).max())


def lu_pivots(A):
    """Absolute pivots of the partially pivoted LU factorisation of ``A``.

    Used both by :func:`solve_linear` and as a cheap conditioning proxy.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, _ = lu_factor(np.asarray(A, dtype=float), check_finite=False)
    return np.abs(np.diag(lu))


def solve_linear(A, rhs):
    """Solve ``A x = rhs`` by LU with partial pivoting.

    Parameters
    ----------
    A : array_like, shape (n, n)
    rhs : array_like, shape (n,)

    Returns
    -------
    x : ndarray, shape (n,)

    Raises
    ------
    SingularMatrix
        If any pivot magnitude is below ``PIVOT_RTOL * ||A||_inf``.
    """
    A = np.asarray(A, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if rhs.shape[0] != A.shape[0]:
        raise ValueError(f"rhs length {rhs.shape[0]} does not match A {A.shape}")
    _check_finite("A", A)
    _check_finite("rhs", rhs)

    scale = inf_norm(A)
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        factor = lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(factor[0]))
    if pivots.min() < PIVOT_RTOL * scale:
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below {PIVOT_RTOL:g} * ||A||_inf = {scale:.3e}")
    return lu_solve(factor, rhs, check_finite=False)


def solve_lyapunov(A_m, Q=None, refine=2):
    """Solve ``A_m^T P + P A_m = -Q`` for a symmetric positive-definite ``P``.

    The equation is vectorised into ``(I kron A^T + A^T kron I) vec(P) = -vec(Q)``
    and solved densely, followed by ``refine`` rounds of iterative refinement.

    Raises
    ------
    NotStable
        If the Kronecker system is singular, the residual check fails, or the
        solution is not positive definite (``A_m`` not Hurwitz).
    """
    A = np.asarray(A_m, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A_m must be square, got shape {A.shape}")
    n = A.shape[0]
    Q = np.eye(n) if Q is None else np.asarray(Q, dtype=float)
    if Q.shape != (n, n):
        raise ValueError(f"Q shape {Q.shape} does not match A_m {A.shape}")
    if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, inf_norm(Q))):
        raise ValueError("Q must be symmetric")

    eye = np.eye(n)
    K = np.kron(eye, A.T) + np.kron(A.T, eye)
    rhs = -Q.ravel(order="F")
    try:
        vec = solve_linear(K, rhs)
        for _ in range(refine):
            vec = vec + solve_linear(K, rhs - K @ vec)
    except SingularMatrix as exc:
        raise NotStable(f"Lyapunov operator is singular: {exc}") from exc

    P = vec.reshape((n, n), order="F")
    P = 0.5 * (P + P.T)
    residual = inf_norm(A.T @ P + P @ A + Q)
    if residual > 1e-10 * inf_norm(Q):
        raise NotStable(f"Lyapunov residual {residual:.3e} too large")
    try:
        np.linalg.cholesky(P)
    except np.linalg.LinAlgError as exc:
        raise NotStable("Lyapunov solution is not positive definite") from exc
    return P


def rk4_step(f, t, x, h):
    """One classical Runge-Kutta step of ``x' = f(t, x)``.

    Raises
    ------
    NonFiniteState
        If the updated state contains NaN or Inf.
    """
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    k1 = np.asarray(f(t, x), dtype=float)
    k2 = np.asarray(f(t + 0.5 * h, x + 0.5 * h * k1), dtype=float)
    k3 = np.asarray(f(t + 0.5 * h, x + 0.5 * h * k2), dtype=float)
    k4 = np.asarray(f(t + h, x + h * k3), dtype=float)
    x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_next)):
        raise NonFiniteState(f"non-finite state after step at t={t:.6g}")
    return x_next
