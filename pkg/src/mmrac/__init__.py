"""Multiple-model reference adaptive control for companion-form plants.

First-level (single-model, direct or indirect) and second-level
(convex-combination of several identification models) adaptive controllers,
together with the simulation harness used to compare them.
"""

from .errors import (
    ConfigInvalid,
    DegenerateBox,
    MrcError,
    NonFiniteState,
    NotStable,
    SingularMatrix,
    UnknownScenario,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigInvalid",
    "DegenerateBox",
    "MrcError",
    "NonFiniteState",
    "NotStable",
    "SingularMatrix",
    "UnknownScenario",
]
