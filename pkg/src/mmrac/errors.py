"""Exception hierarchy shared by all modules."""


class MrcError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(MrcError):
    """Numerical failure during a solve or an integration."""


class SingularMatrix(NumericalError):
    """A pivot fell below the relative singularity threshold."""


class NotStable(NumericalError):
    """The Lyapunov equation has no positive-definite solution."""


class NonFiniteState(NumericalError):
    """An integration step produced NaN or Inf."""


class DegenerateBox(MrcError, ValueError):
    """A parameter box has a side of zero length."""


class ConfigInvalid(MrcError, ValueError):
    """A scenario configuration failed validation."""


class UnknownScenario(MrcError, KeyError):
    """No built-in scenario with the requested name."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""
