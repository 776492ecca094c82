"""
Exception types raised by the library
The CLI maps these to exit codes
"""


class ProxFlowError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(ProxFlowError):
    """System parameters are out of range or violate the admissibility condition."""


class InvalidProblemError(ProxFlowError):
    """A problem definition is inconsistent (bad box, dimension mismatch, bad critical point)."""


class UnsupportedDimensionError(ProxFlowError):
    """The brute-force reference prox only handles dimensions 1 and 2."""


class DivergenceError(ProxFlowError):
    """
    The dynamics produced a non-finite or unbounded state.

    Args:
        message (str): Description of what went wrong
        t (float): Time at which the problem was detected
        x (ndarray): x component of the offending state
        y (ndarray): y component of the offending state
    """

    def __init__(self, message, t=None, x=None, y=None):
        super().__init__(message)
        self.t = t
        self.x = x
        self.y = y


class NotConvergedError(ProxFlowError):
    """A limit was requested from a trajectory that did not reach stationarity."""


class InsufficientDataError(ProxFlowError):
    """Too few usable samples to fit a decay rate."""


class InvalidSlopeError(ProxFlowError):
    """A polynomial slope must be strictly negative."""


class ConfigError(ProxFlowError):
    """The experiment configuration is unreadable or inconsistent."""
