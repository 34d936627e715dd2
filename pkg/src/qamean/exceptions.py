"""Exceptions raised by qamean.

Everything derives from :class:`QAMeanError`. Caller mistakes derive from
:class:`InputError` (and ``ValueError``), numerical outcomes that the caller
has to decide about derive from :class:`ComputationError`.
"""


class QAMeanError(Exception):
    """Base class for all qamean errors."""


class InputError(QAMeanError, ValueError):
    """The arguments violate a documented precondition."""


class ComputationError(QAMeanError):
    """A computation finished without a usable result."""


class InvalidInterval(InputError):
    """An interval needs finite bounds with ``lo < hi``."""


class NonPositiveInterval(InputError):
    """Power and logarithmic generators need ``interval.lo > 0``."""


class OutOfDomain(InputError):
    """An argument lies outside the working interval."""


class OutOfRange(InputError):
    """A value lies outside the range of a generator."""


class IntervalMismatch(InputError):
    """Two objects that must share a working interval do not."""


class NotMonotone(InputError):
    """A function is not strictly monotone (or its derivative vanishes)."""


class DerivativeUnavailable(InputError):
    """The generator does not represent the requested derivative."""


class SecondDerivativeUnavailable(DerivativeUnavailable):
    pass


class DegenerateProbe(InputError):
    """A ratio probe ``(x, y, z)`` has ``f(y)`` numerically equal to ``f(z)``."""


class SlopeOrderViolation(InputError):
    """A kink's one-sided slopes contradict the requested projection."""


class EmptyProjection(InputError):
    """Both projections were requested for a generator with kinks."""


class InvalidDescriptor(InputError):
    """A generator descriptor or family file could not be parsed."""


class EnvelopeOverflow(ComputationError):
    """``exp`` of the inner integral left the floating point range."""


class NoConvergence(ComputationError):
    """Partition refinement did not meet its tolerance.

    Args:
      message (str): description
      best (float): best value reached before giving up
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NoUpperBound(ComputationError):
    """The family has no bound; the mean would be ``max`` (or ``min``)."""


class NoUpperBoundInCatalog(ComputationError):
    """No catalog generator bounds the whole family."""
