"""Convergence metrics and first- versus second-level comparisons."""

import hashlib
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from ..second_level import barycentric
from .config import ControllerSpec
from .simulate import run_scenario

#: Returned by :func:`convergence_time` when the series never settles.
NOT_CONVERGED = math.inf

TRACKING_THRESHOLD = 0.01
PARAMETER_THRESHOLD = 0.05
#: Absolute level treated as zero by :func:`convergence_time`.
ROUNDOFF_FLOOR = 1e-12


def convergence_time(times, values, threshold, reference=None, atol=ROUNDOFF_FLOOR):
    """First time after which ``values`` stays below ``threshold * reference``.

    ``reference`` defaults to the peak of the series. Values at or below
    ``atol`` always count as settled, so a series that is zero up to rounding
    has converged at its first sample. A series that is still at or above the
    level at its last sample returns :data:`NOT_CONVERGED`.
    """
    times = np.asarray(times, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("empty series")
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    scale = values.max() if reference is None else abs(float(reference))
    above = np.nonzero((values >= threshold * scale) & (values > atol))[0]
    if above.size == 0:
        return float(times[0])
    last = above[-1]
    if last == values.size - 1:
        return NOT_CONVERGED
    return float(times[last + 1])


@dataclass
class MetricsReport:
    name: str
    controller: str
    tracking_convergence_time: float
    parameter_convergence_time: float
    final_parameter_error: float
    mean_abs_tracking_error: float
    mean_parameter_error: float
    window: tuple
    alpha_error_series_summary: Optional[dict] = None

    def as_flat_dict(self):
        out = {}
        for key, value in asdict(self).items():
            if key == "alpha_error_series_summary":
                for k, v in (value or {}).items():
                    out[f"alpha_error_{k}"] = v
            elif key == "window":
                out["window_start"], out["window_end"] = value
            else:
                out[key] = value
        return out


def tracking_error_norms(traj):
    return np.linalg.norm(traj.e_c, axis=1)


def parameter_error_norms(traj):
    return np.linalg.norm(traj.theta_hat - traj.theta_true, axis=1)


def alpha_errors(traj, vertices):
    """``||alpha_hat(t) - alpha(t)||`` against barycentric weights of the true plant."""
    truth = np.array([barycentric(vertices, th) for th in traj.theta_true])
    return np.linalg.norm(traj.alpha_hat - truth, axis=1)


def compute_metrics(traj, controller="", window=(0.0, math.inf), vertices=None):
    """Summarise a trajectory.

    Tracking convergence uses the first state of ``e_c`` and 1% of its peak;
    parameter convergence uses ``||theta_hat - theta_true||`` and 5% of its
    initial value. Mean errors are averaged over samples inside ``window``.
    """
    t = traj.times
    track = np.abs(traj.e_c[:, 0])
    perr = parameter_error_norms(traj)
    inside = traj.window(*window)
    if not inside.any():
        raise ValueError(f"no samples inside window {window}")
    summary = None
    if traj.alpha_hat is not None and vertices is not None:
        aerr = alpha_errors(traj, vertices)
        summary = {"initial": float(aerr[0]), "final": float(aerr[-1]),
                   "max": float(aerr.max()), "mean": float(aerr[inside].mean())}
    return MetricsReport(
        name=traj.name,
        controller=controller,
        tracking_convergence_time=convergence_time(t, track, TRACKING_THRESHOLD),
        parameter_convergence_time=convergence_time(t, perr, PARAMETER_THRESHOLD,
                                                    reference=perr[0]),
        final_parameter_error=float(perr[-1]),
        mean_abs_tracking_error=float(tracking_error_norms(traj)[inside].mean()),
        mean_parameter_error=float(perr[inside].mean()),
        window=(float(window[0]), float(min(window[1], t[-1]))),
        alpha_error_series_summary=summary,
    )


def series_hash(values):
    return hashlib.sha256(np.ascontiguousarray(values, dtype=float).tobytes()).hexdigest()


@dataclass
class Comparison:
    first: MetricsReport
    second: MetricsReport
    first_trajectory: object = field(repr=False)
    second_trajectory: object = field(repr=False)

    @property
    def input_hashes(self):
        return (series_hash(self.first_trajectory.r), series_hash(self.second_trajectory.r))

    def speedup(self):
        """First-level over second-level parameter convergence time."""
        a = self.first.parameter_convergence_time
        b = self.second.parameter_convergence_time
        if b == 0:
            return math.inf if a > 0 else 1.0
        return a / b


def compare_levels(base, window=(0.0, math.inf)):
    """Run ``base`` with single-model indirect control and with the second-level estimator.

    Both runs share the plant, reference input, step and gains. The indirect
    controller starts from ``base.first_level_start()`` (the vertex centroid by
    default), which is also what the uniform initial weights reconstruct.
    """
    first_cfg = base.replace(controller=ControllerSpec("indirect_first_level"),
                             initial_estimate=base.first_level_start(),
                             name=f"{base.name}-first-level")
    second_cfg = base.replace(controller=ControllerSpec("second_level_ode"),
                              name=f"{base.name}-second-level")
    first = run_scenario(first_cfg)
    second = run_scenario(second_cfg)
    vertices = base.vertex_set()
    return Comparison(
        first=compute_metrics(first, "indirect_first_level", window),
        second=compute_metrics(second, "second_level_ode", window, vertices),
        first_trajectory=first,
        second_trajectory=second,
    )
