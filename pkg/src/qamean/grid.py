"""Working intervals and uniformly sampled functions.

A :class:`GridFunction` is the numerical carrier for everything the lattice
constructions produce: log-derivatives, their envelopes, ratio envelopes and
the envelope generators themselves.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .exceptions import InputError, IntervalMismatch, InvalidInterval, OutOfDomain

# relative slack when deciding whether a point lies in the interval
DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class Interval:
    """Compact working interval ``[lo, hi]``."""

    lo: float
    hi: float

    def __post_init__(self):
        try:
            lo, hi = float(self.lo), float(self.hi)
        except (TypeError, ValueError):
            raise InvalidInterval(f"Interval bounds must be numbers, got [{self.lo!r}, {self.hi!r}]") from None
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise InvalidInterval(f"Interval needs finite lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, 'lo', lo)
        object.__setattr__(self, 'hi', hi)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    def nodes(self, n):
        """``n`` uniform abscissae including both endpoints."""
        return np.linspace(self.lo, self.hi, n)

    def contains(self, x):
        slack = DOMAIN_SLACK * max(1.0, abs(self.lo), abs(self.hi))
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lo - slack) & (x <= self.hi + slack))

    def clip(self, x):
        """Check ``x`` against the interval and clamp roundoff excursions."""
        if not self.contains(x):
            raise OutOfDomain(f"{x} outside [{self.lo}, {self.hi}]")
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def is_interior(self, x):
        return self.lo < x < self.hi

    def as_tuple(self):
        return (self.lo, self.hi)


def check_same_interval(*items):
    """Raise IntervalMismatch unless all items share one interval."""
    intervals = {item.interval for item in items}
    if len(intervals) > 1:
        raise IntervalMismatch(f"Objects live on different intervals: {sorted(i.as_tuple() for i in intervals)}")
    return intervals.pop()


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Uniform samples of a scalar function on an interval.

    Between nodes the function is linear, unless an ``exact`` evaluator is
    attached, in which case off-node evaluations use it.
    """

    interval: Interval
    values: np.ndarray
    exact: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise InputError("GridFunction needs at least 2 samples")
        if not np.all(np.isfinite(values)):
            raise InputError("GridFunction samples must be finite")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def sample(cls, func, interval, n, keep_exact=True):
        """Sample a vectorised callable on ``n`` nodes of ``interval``."""
        x = interval.nodes(n)
        return cls(interval, func(x), exact=func if keep_exact else None)

    @property
    def n(self):
        return self.values.size

    @property
    def x(self):
        return self.interval.nodes(self.n)

    @property
    def step(self):
        return self.interval.width / (self.n - 1)

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        x = self.interval.clip(x)
        if self.exact is not None:
            result = np.asarray(self.exact(x), dtype=float)
        else:
            result = np.interp(x, self.x, self.values)
        return float(result) if scalar else result

    def __neg__(self):
        exact = self.exact
        return GridFunction(self.interval, -self.values,
                            exact=None if exact is None else (lambda x: -exact(x)))

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            check_same_interval(self, other)
            return GridFunction(self.interval, self.values - other.values)
        return GridFunction(self.interval, self.values - other)

    def sup_distance(self, other):
        check_same_interval(self, other)
        if other.n != self.n:
            raise IntervalMismatch(f"Grids differ in size: {self.n} vs {other.n}")
        return float(np.max(np.abs(self.values - other.values)))

    def cumulative_integral(self, anchor):
        """Trapezoid antiderivative vanishing at ``anchor``."""
        return GridFunction(self.interval, cumulative_integral(self.values, self.x, anchor))


def cumulative_integral(values, x, anchor):
    """Composite trapezoid ``∫_anchor^x values`` evaluated at every node."""
    primitive = cumulative_trapezoid(values, x, initial=0.0)
    return primitive - np.interp(anchor, x, primitive)
