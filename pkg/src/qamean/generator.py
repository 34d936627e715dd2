"""Generators of quasi-arithmetic means.

A generator is a continuous, strictly monotone function on a compact working
interval. The concrete families are powers (with the logarithm in place of
the zeroth power), exponentials, affine images, piecewise rescalings with
finitely many kinks, and sampled grid functions.

Descriptors are plain dicts (the JSON form used on the command line)::

    {"family": "power", "p": 2.0}
    {"family": "log"}
    {"family": "exp", "p": 1.5}
    {"family": "affine", "alpha": 2.0, "beta": -1.0, "base": {...}}
    {"family": "piecewise", "base": {...}, "kinks": [{"z": 1.0, "left": 1.0, "right": 0.5}]}
    {"family": "grid", "lo": 0.0, "hi": 1.0, "values": [...]}
"""
import abc
import enum
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError, validator

from .exceptions import (DerivativeUnavailable, InputError, InvalidDescriptor,
                         NonPositiveInterval, NotMonotone, OutOfRange,
                         SecondDerivativeUnavailable)
from .grid import GridFunction, Interval, check_same_interval
from .settings import GRID_N, TOL_EQ, TOL_INV

_logger = logging.getLogger(__name__)

MAX_BISECTION = 200
VALIDATION_POINTS = 1000


class Direction(str, enum.Enum):
    increasing = 'increasing'
    decreasing = 'decreasing'


class Kink(NamedTuple):
    z: float
    left: float
    right: float


@dataclass(frozen=True)
class KinkSpec:
    """Finitely many non-differentiability points with one-sided slopes.

    Only the ratio ``right / left`` shapes a piecewise generator; the slopes
    are magnitudes and must be strictly positive.
    """

    points: Tuple[Kink, ...] = ()

    def __post_init__(self):
        points = tuple(Kink(float(z), float(left), float(right)) for z, left, right in self.points)
        zs = [point.z for point in points]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise InputError(f"Kink locations must be strictly increasing: {zs}")
        if any(point.left <= 0 or point.right <= 0 for point in points):
            raise NotMonotone("One-sided slopes must be strictly positive")
        object.__setattr__(self, 'points', points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def zs(self):
        return np.array([point.z for point in self.points])

    def find(self, z):
        for point in self.points:
            if point.z == z:
                return point
        raise KeyError(z)

    def without(self, zs):
        drop = set(zs)
        return KinkSpec(tuple(point for point in self.points if point.z not in drop))


def bisect_inverse(func, y, lo, hi, increasing, maxiter=MAX_BISECTION):
    """Solve ``func(x) = y`` for monotone ``func`` on ``[lo, hi]``.

    Vectorised over ``y``; halves every bracket until it stops shrinking in
    floating point or ``maxiter`` halvings were done.
    """
    y = np.asarray(y, dtype=float)
    a = np.full(y.shape, lo, dtype=float)
    b = np.full(y.shape, hi, dtype=float)
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        active = (m > a) & (m < b)
        if not active.any():
            break
        fm = func(m)
        right = fm < y if increasing else fm > y
        a = np.where(active & right, m, a)
        b = np.where(active & ~right, m, b)
    return np.where(np.abs(func(a) - y) <= np.abs(func(b) - y), a, b)


class Generator(abc.ABC):
    """Continuous strictly monotone function on a working interval.

    Instances are immutable. ``value``, ``derivative``, ``second_derivative``
    and ``inverse`` accept floats or arrays and check the domain.
    """

    family = None
    has_derivative = True

    def __init__(self, interval):
        self._interval = interval

    @property
    def interval(self):
        return self._interval

    @abc.abstractmethod
    def _value(self, x):
        pass

    @abc.abstractmethod
    def _derivative(self, x):
        pass

    def _second_derivative(self, x):
        raise SecondDerivativeUnavailable(f"{self.describe()} carries no second derivative")

    @abc.abstractmethod
    def to_descriptor(self):
        pass

    def describe(self):
        return json.dumps(self.to_descriptor(), sort_keys=True)

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()} on [{self.interval.lo}, {self.interval.hi}]>"

    def _evaluate(self, method, x):
        scalar = np.ndim(x) == 0
        result = method(self.interval.clip(x))
        return float(result) if scalar else np.asarray(result, dtype=float)

    def value(self, x):
        return self._evaluate(self._value, x)

    def derivative(self, x):
        return self._evaluate(self._derivative, x)

    def second_derivative(self, x):
        return self._evaluate(self._second_derivative, x)

    def one_sided_derivatives(self, x):
        """``(f'_-(x), f'_+(x))``; equal unless ``x`` is a kink."""
        slope = self.derivative(x)
        return slope, slope

    @cached_property
    def endpoint_values(self):
        return tuple(float(v) for v in self._value(np.array([self.interval.lo, self.interval.hi])))

    @cached_property
    def direction(self):
        low, high = self.endpoint_values
        return Direction.increasing if high > low else Direction.decreasing

    @property
    def is_increasing(self):
        return self.direction is Direction.increasing

    def inverse(self, y):
        scalar = np.ndim(y) == 0
        y = np.asarray(y, dtype=float)
        bottom, top = sorted(self.endpoint_values)
        slack = TOL_INV * max(abs(bottom), abs(top), top - bottom)
        if np.any((y < bottom - slack) | (y > top + slack)):
            raise OutOfRange(f"{y} outside the range [{bottom}, {top}] of {self.describe()}")
        y = np.clip(y, bottom, top)
        x = bisect_inverse(self._value, y, self.interval.lo, self.interval.hi, self.is_increasing)
        return float(x) if scalar else x

    def sample(self, n=GRID_N):
        """Values on ``n`` uniform nodes as a GridFunction."""
        return GridFunction.sample(self._value, self.interval, n)

    def _validate(self):
        x = self.interval.nodes(VALIDATION_POINTS)
        steps = np.diff(self._value(x))
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise NotMonotone(f"{self.describe()} is not strictly monotone on "
                              f"[{self.interval.lo}, {self.interval.hi}]")
        if self.has_derivative:
            slopes = self._derivative(x)
            if not (np.all(slopes > 0) or np.all(slopes < 0)):
                raise NotMonotone(f"Derivative of {self.describe()} vanishes or changes sign")


class Power(Generator):
    """``x ** p`` for ``p != 0``."""

    family = 'power'

    def __init__(self, p, interval):
        super().__init__(interval)
        self.p = float(p)
        if self.p == 0:
            raise InputError("Power(0) is not a generator, use Log")
        if interval.lo <= 0 and not (self.p.is_integer() and self.p > 0):
            raise NonPositiveInterval(f"x ** {self.p} needs a positive interval, got lo={interval.lo}")
        self._validate()

    def _value(self, x):
        return np.power(x, self.p)

    def _derivative(self, x):
        return self.p * np.power(x, self.p - 1)

    def _second_derivative(self, x):
        return self.p * (self.p - 1) * np.power(x, self.p - 2)

    def to_descriptor(self):
        return {'family': 'power', 'p': self.p}


class Log(Generator):
    family = 'log'

    def __init__(self, interval):
        super().__init__(interval)
        if interval.lo <= 0:
            raise NonPositiveInterval(f"log needs a positive interval, got lo={interval.lo}")
        self._validate()

    def _value(self, x):
        return np.log(x)

    def _derivative(self, x):
        return 1.0 / x

    def _second_derivative(self, x):
        return -1.0 / np.square(x)

    def to_descriptor(self):
        return {'family': 'log'}


class Exponential(Generator):
    """``exp(p x)`` for ``p != 0``."""

    family = 'exp'

    def __init__(self, p, interval):
        super().__init__(interval)
        self.p = float(p)
        if self.p == 0:
            raise InputError("Exponential(0) is constant")
        self._validate()

    def _value(self, x):
        return np.exp(self.p * x)

    def _derivative(self, x):
        return self.p * np.exp(self.p * x)

    def _second_derivative(self, x):
        return self.p * self.p * np.exp(self.p * x)

    def to_descriptor(self):
        return {'family': 'exp', 'p': self.p}


class AffineOf(Generator):
    """``alpha * base + beta``; generates the same mean as ``base``."""

    family = 'affine'

    def __init__(self, base, alpha, beta):
        super().__init__(base.interval)
        self.base = base
        self.alpha = float(alpha)
        self.beta = float(beta)
        if self.alpha == 0 or not np.isfinite(self.alpha) or not np.isfinite(self.beta):
            raise InputError(f"Affine coefficients must be finite with alpha != 0, got {alpha}, {beta}")
        self.has_derivative = base.has_derivative

    def _value(self, x):
        return self.alpha * self.base._value(x) + self.beta

    def _derivative(self, x):
        return self.alpha * self.base._derivative(x)

    def _second_derivative(self, x):
        return self.alpha * self.base._second_derivative(x)

    def one_sided_derivatives(self, x):
        left, right = self.base.one_sided_derivatives(x)
        return self.alpha * left, self.alpha * right

    def inverse(self, y):
        scalar = np.ndim(y) == 0
        x = self.base.inverse((np.asarray(y, dtype=float) - self.beta) / self.alpha)
        return float(x) if scalar else x

    def to_descriptor(self):
        return {'family': 'affine', 'alpha': self.alpha, 'beta': self.beta,
                'base': self.base.to_descriptor()}


class PiecewiseLinearScaled(Generator):
    """``base`` rescaled on the pieces cut out by a KinkSpec.

    On the k-th piece the generator is ``c_k * base + d_k`` with ``c_0 = 1``,
    ``c_{k+1} = c_k * right_k / left_k`` and ``d_k`` making it continuous.
    """

    family = 'piecewise'

    def __init__(self, kinks, base):
        super().__init__(base.interval)
        if not isinstance(kinks, KinkSpec):
            kinks = KinkSpec(tuple(kinks))
        self.kinks = kinks
        self.base = base
        self._zs = kinks.zs
        if len(kinks) and not all(base.interval.is_interior(z) for z in self._zs):
            raise InputError(f"Kinks {list(self._zs)} must lie inside the interval")
        ratios = np.array([point.right / point.left for point in kinks])
        self._scales = np.concatenate([[1.0], np.cumprod(ratios)])
        base_at_kinks = base._value(self._zs) if len(kinks) else np.zeros(0)
        self._offsets = np.concatenate(
            [[0.0], np.cumsum((self._scales[:-1] - self._scales[1:]) * base_at_kinks)])
        self.has_derivative = base.has_derivative
        self._validate()

    def _piece(self, x):
        return np.searchsorted(self._zs, x, side='right')

    def _value(self, x):
        piece = self._piece(x)
        return self._scales[piece] * self.base._value(x) + self._offsets[piece]

    def _derivative(self, x):
        return self._scales[self._piece(x)] * self.base._derivative(x)

    def _second_derivative(self, x):
        return self._scales[self._piece(x)] * self.base._second_derivative(x)

    def one_sided_derivatives(self, x):
        slope = self.base.derivative(x)
        left = np.searchsorted(self._zs, x, side='left')
        right = np.searchsorted(self._zs, x, side='right')
        return float(self._scales[left] * slope), float(self._scales[right] * slope)

    def to_descriptor(self):
        return {'family': 'piecewise', 'base': self.base.to_descriptor(),
                'kinks': [point._asdict() for point in self.kinks]}


class GridSampled(Generator):
    """Monotone piecewise-linear interpolant of sampled values.

    ``slopes``, when given, are derivative samples at the nodes; without them
    the derivative is the slope of the interpolant and the ratio test is not
    available.
    """

    family = 'grid'

    def __init__(self, grid, slopes=None):
        super().__init__(grid.interval)
        self.grid = grid
        self.slopes = slopes
        self.has_derivative = slopes is not None
        steps = np.diff(grid.values)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise NotMonotone("Grid samples are not strictly monotone")
        if slopes is not None:
            check_same_interval(grid, slopes)
            if slopes.n != grid.n:
                raise InputError("Slopes must be sampled on the value grid")
            sign = np.sign(steps[0])
            if not np.all(np.sign(slopes.values) == sign):
                raise NotMonotone("Slope samples vanish or disagree with the values")
        self._nodes = grid.x

    def _value(self, x):
        return np.interp(x, self._nodes, self.grid.values)

    def _derivative(self, x):
        if self.slopes is not None:
            return np.interp(x, self._nodes, self.slopes.values)
        piece = np.clip(np.searchsorted(self._nodes, x, side='right') - 1, 0, self.grid.n - 2)
        return np.diff(self.grid.values)[piece] / self.grid.step

    def to_descriptor(self):
        descriptor = {'family': 'grid', 'lo': self.interval.lo, 'hi': self.interval.hi,
                      'values': self.grid.values.tolist()}
        if self.slopes is not None:
            descriptor['slopes'] = self.slopes.values.tolist()
        return descriptor

    def describe(self):
        return f"grid[{self.grid.n}]"


def make_power(p, interval):
    """Power mean generator: ``x ** p``, or ``log`` for ``p == 0``."""
    if interval.lo <= 0:
        raise NonPositiveInterval(f"Power generators need lo > 0, got {interval.lo}")
    if p == 0:
        return Log(interval)
    return Power(p, interval)


def identity(interval):
    return Power(1, interval)


def affine(g, alpha, beta):
    """``alpha * g + beta`` with nested affine maps collapsed."""
    if isinstance(g, AffineOf):
        return AffineOf(g.base, alpha * g.alpha, alpha * g.beta + beta)
    return AffineOf(g, alpha, beta)


def canonical(g):
    """The increasing member of ``{g, -g}``."""
    return g if g.is_increasing else affine(g, -1.0, 0.0)


def normalize_affine(g):
    """Affine image of ``g`` taking the values 0 at ``lo`` and 1 at ``hi``."""
    low, high = g.endpoint_values
    alpha = 1.0 / (high - low)
    return affine(g, alpha, -low * alpha)


def comparison_nodes(*generators, n=GRID_N):
    """Nodes shared by the generators: a grid generator's own, else ``n`` uniform ones."""
    interval = check_same_interval(*generators)
    for g in generators:
        if isinstance(g, GridSampled):
            return g.grid.x
    return interval.nodes(n)


def normalized_distance(f, g, n=GRID_N):
    """Sup-norm distance of the normalized generators on shared nodes."""
    x = comparison_nodes(f, g, n=n)
    return float(np.max(np.abs(normalize_affine(f)._value(x) - normalize_affine(g)._value(x))))


def equivalent(f, g, tol=TOL_EQ, n=GRID_N):
    """True iff ``f`` and ``g`` generate the same mean, up to ``tol``."""
    return normalized_distance(f, g, n=n) <= tol


def kinks_of(g):
    if isinstance(g, PiecewiseLinearScaled):
        return g.kinks
    if isinstance(g, AffineOf):
        return kinks_of(g.base)
    return KinkSpec()


def piecewise(base, kinks):
    """PiecewiseLinearScaled from ``(z, left, right)`` triples; ``base`` if none."""
    spec = KinkSpec(tuple(kinks))
    return PiecewiseLinearScaled(spec, base) if len(spec) else base


def log_derivative(g, n=GRID_N):
    """``log |g'|`` sampled on ``n`` nodes, keeping the exact evaluator."""
    if not g.has_derivative:
        raise DerivativeUnavailable(f"{g.describe()} carries no derivative samples")

    def logd(x):
        return np.log(np.abs(g._derivative(x)))

    return GridFunction.sample(logd, g.interval, n)


class _Descriptor(BaseModel):
    family: str


class _PowerDescriptor(_Descriptor):
    p: float


class _ExpDescriptor(_Descriptor):
    p: float

    @validator('p')
    def nonzero(cls, value):
        if value == 0:
            raise ValueError('exp rate must be nonzero')
        return value


class _AffineDescriptor(_Descriptor):
    alpha: float
    beta: float
    base: dict

    @validator('alpha')
    def nonzero(cls, value):
        if value == 0:
            raise ValueError('alpha must be nonzero')
        return value


class _KinkDescriptor(BaseModel):
    z: float
    left: float
    right: float


class _PiecewiseDescriptor(_Descriptor):
    base: dict
    kinks: List[_KinkDescriptor]


class _GridDescriptor(_Descriptor):
    lo: float
    hi: float
    values: List[float]
    slopes: Optional[List[float]] = None


_DESCRIPTORS = {
    'power': _PowerDescriptor,
    'log': _Descriptor,
    'exp': _ExpDescriptor,
    'affine': _AffineDescriptor,
    'piecewise': _PiecewiseDescriptor,
    'grid': _GridDescriptor,
}


def from_descriptor(descriptor, interval=None):
    """Build a Generator from its dict descriptor.

    Args:
      descriptor (dict): descriptor, see the module docstring
      interval (Interval): working interval; grid descriptors carry their own

    Returns:
      Generator
    """
    if not isinstance(descriptor, dict):
        raise InvalidDescriptor(f"Descriptor must be an object, got {descriptor!r}")
    model = _DESCRIPTORS.get(descriptor.get('family'))
    if model is None:
        raise InvalidDescriptor(f"Unknown generator family in {descriptor!r}")
    try:
        parsed = model.parse_obj(descriptor)
    except ValidationError as e:
        raise InvalidDescriptor(str(e)) from e

    if parsed.family == 'grid':
        grid_interval = Interval(parsed.lo, parsed.hi)
        slopes = None if parsed.slopes is None else GridFunction(grid_interval, parsed.slopes)
        return GridSampled(GridFunction(grid_interval, parsed.values), slopes=slopes)
    if interval is None:
        raise InvalidDescriptor(f"A working interval is needed for {descriptor!r}")
    try:
        if parsed.family == 'power':
            return make_power(parsed.p, interval)
        if parsed.family == 'log':
            return Log(interval)
        if parsed.family == 'exp':
            return Exponential(parsed.p, interval)
        if parsed.family == 'affine':
            return affine(from_descriptor(parsed.base, interval), parsed.alpha, parsed.beta)
        return piecewise(from_descriptor(parsed.base, interval),
                         [(k.z, k.left, k.right) for k in parsed.kinks])
    except InputError:
        raise
    except (ValueError, TypeError) as e:
        raise InvalidDescriptor(f"{descriptor!r}: {e}") from e


def to_descriptor(g):
    return g.to_descriptor()


def parse_generator(text, interval=None):
    """Parse shorthand (``power:2``, ``log``, ``exp:1.5``) or a JSON descriptor."""
    text = text.strip()
    if text.startswith('{'):
        try:
            return from_descriptor(json.loads(text), interval)
        except json.JSONDecodeError as e:
            raise InvalidDescriptor(f"Malformed JSON descriptor: {e}") from e
    family, _, parameter = text.partition(':')
    if family == 'log' and not parameter:
        return from_descriptor({'family': 'log'}, interval)
    if family in ('power', 'exp') and parameter:
        try:
            p = float(parameter)
        except ValueError:
            raise InvalidDescriptor(f"Bad parameter in {text!r}") from None
        return from_descriptor({'family': family, 'p': p}, interval)
    raise InvalidDescriptor(f"Cannot parse generator {text!r}")
