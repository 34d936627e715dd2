"""Projection of kinked generators onto generators with a continuous derivative.

A kink at ``z`` with one-sided slopes ``left >= right`` is removed by
rescaling the generator on the far side of ``z`` (seen from a base point
``x0``) by ``left / right``, or ``right / left`` when the kink lies below
``x0``. Every step keeps the generator on the piece around ``x0``, keeps the
slope ratio of all other kinks and does not decrease the mean. After the
last kink is gone the iterate ``m`` generates the least smooth mean above
the original one (the upper projection); reversed slopes give the lower one.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .compare import ComparisonVerdict, Relation, compare_empirical
from .exceptions import EmptyProjection, InputError, NotMonotone, SlopeOrderViolation
from .generator import (AffineOf, PiecewiseLinearScaled, affine, canonical, kinks_of,
                        piecewise, to_descriptor)
from .mean import VectorSampler, default_probes, pal91_ratio_distance
from .settings import TOL_CMP

_logger = logging.getLogger(__name__)

# relative slack when comparing one-sided slopes
SLOPE_RTOL = 1e-12


class Projection(str, enum.Enum):
    upper = 'upper'
    lower = 'lower'
    both = 'both'


class Order(str, enum.Enum):
    nearest = 'nearest'
    paired = 'paired'


@dataclass(eq=False)
class RegularizationTrace:
    """Iterates ``f_1 = f, f_2, ...`` of the projection with their diagnostics."""

    iterates: List = field(default_factory=list)
    kinks_remaining: List[int] = field(default_factory=list)
    pal91_distances: List[float] = field(default_factory=list)
    x0: float = None
    direction: Projection = Projection.upper
    order: Order = Order.nearest
    mean_growth: List[ComparisonVerdict] = field(default_factory=list)

    @property
    def steps(self):
        return len(self.iterates) - 1

    @property
    def required(self):
        return Relation.LEQ if self.direction is Projection.upper else Relation.GEQ

    @property
    def certified(self):
        """Every checked step moved the mean in the projection's direction."""
        return all(verdict.holds(self.required) for verdict in self.mean_growth)

    def to_dict(self):
        return {
            'direction': self.direction.value,
            'order': self.order.value,
            'x0': self.x0,
            'steps': self.steps,
            'certified': self.certified,
            'kinks_remaining': list(self.kinks_remaining),
            'pal91_distances': list(self.pal91_distances),
            'iterates': [to_descriptor(g) for g in self.iterates],
            'mean_growth': [verdict.dict() for verdict in self.mean_growth],
        }


def _piecewise_part(g):
    if isinstance(g, PiecewiseLinearScaled):
        return g
    if isinstance(g, AffineOf):
        return _piecewise_part(g.base)
    raise InputError(f"{g.describe()} has no kinks to remove")


def _check_slope_order(f, zs, direction):
    for z in zs:
        left, right = f.one_sided_derivatives(z)
        if direction is Projection.upper and left < right * (1 - SLOPE_RTOL):
            raise SlopeOrderViolation(
                f"Kink at {z} has left slope {left} < right slope {right}; no upper projection exists")
        if direction is Projection.lower and right < left * (1 - SLOPE_RTOL):
            raise SlopeOrderViolation(
                f"Kink at {z} has right slope {right} < left slope {left}; no lower projection exists")


def _kept_piece(zs, z_minus, z_plus, interval):
    """Kink-free piece of ``f`` that the step leaves untouched."""
    if z_minus is not None and z_plus is not None:
        if not z_minus < z_plus:
            raise InputError(f"Need z_minus < z_plus, got {z_minus}, {z_plus}")
        if np.any((zs > z_minus) & (zs < z_plus)):
            raise InputError(f"Kinks remain between {z_minus} and {z_plus}")
        return z_minus, z_plus
    if z_plus is not None:
        below = zs[zs < z_plus]
        return (below.max() if below.size else interval.lo), z_plus
    above = zs[zs > z_minus]
    return z_minus, (above.min() if above.size else interval.hi)


def regularize_step(f, z_minus=None, z_plus=None, direction=Projection.upper):
    """Remove the kinks at ``z_minus`` and/or ``z_plus`` by slope matching.

    The result agrees with ``f`` between the removed kinks (or on the piece
    next to a single removed kink) and is rescaled beyond them so that the
    one-sided slopes agree. Other kinks keep their slope ratio.

    Raises:
      SlopeOrderViolation: a removed kink has the wrong slope order for ``direction``
      NotMonotone: ``f`` is decreasing
    """
    direction = Projection(direction)
    kinks = kinks_of(f)
    removed = [z for z in (z_minus, z_plus) if z is not None]
    if not len(kinks) or not removed:
        return f
    if not f.is_increasing:
        raise NotMonotone(f"Regularization needs an increasing generator, got {f.describe()}")
    for z in removed:
        try:
            kinks.find(z)
        except KeyError:
            raise InputError(f"{f.describe()} has no kink at {z}") from None
    if direction is not Projection.both:
        _check_slope_order(f, removed, direction)
    a, b = _kept_piece(kinks.zs, z_minus, z_plus, f.interval)
    g = piecewise(_piecewise_part(f).base, kinks.without(removed))
    fa, fb = f.value(np.array([a, b]))
    ga, gb = g.value(np.array([a, b]))
    alpha = (fb - fa) / (gb - ga)
    _logger.debug(f"Removed kinks {removed}, kept [{a}, {b}], rescale {alpha}")
    return affine(g, alpha, fa - alpha * ga)


def _base_point(f, zs, x0):
    interval = f.interval
    if x0 is None:
        edges = np.concatenate([[interval.lo], zs, [interval.hi]])
        widest = int(np.argmax(np.diff(edges)))
        return 0.5 * (edges[widest] + edges[widest + 1])
    if not interval.is_interior(x0):
        raise InputError(f"Base point {x0} must lie inside the interval")
    if np.any(zs == x0):
        raise InputError(f"Base point {x0} is a kink; pick a differentiability point")
    return float(x0)


def _schedule(zs, x0, order):
    """Arguments ``(z_minus, z_plus)`` of every step."""
    if order is Order.nearest:
        ranked = sorted(zs, key=lambda z: (abs(z - x0), z))
        return [(z, None) if z < x0 else (None, z) for z in ranked]
    below = sorted((z for z in zs if z < x0), reverse=True)
    above = sorted(z for z in zs if z > x0)
    pairs = []
    for i in range(max(len(below), len(above))):
        pairs.append((below[i] if i < len(below) else None, above[i] if i < len(above) else None))
    return pairs


def pal91_convergence_report(trace, m, probes=None):
    """Ratio-criterion distances of every iterate to the limit ``m``.

    Probes default to all triples over nine uniform nodes plus the original
    kink locations.
    """
    if not trace.iterates:
        raise InputError("The trace has no iterates")
    if probes is None:
        probes = default_probes(m.interval, extra=kinks_of(trace.iterates[0]).zs)
    return [0.0 if g is m else pal91_ratio_distance(g, m, probes) for g in trace.iterates]


def regularize(f, direction=Projection.upper, x0=None, order=Order.nearest, sampler=None,
               probes=None, tol_cmp=TOL_CMP, check_growth=True):
    """Project ``f`` onto the generators with a continuous derivative.

    Args:
      f (Generator): generator, possibly with finitely many kinks
      direction (Projection): ``upper`` or ``lower``
      x0 (float): base point, defaults to the middle of the widest kink-free gap
      order (Order): ``nearest`` removes one kink per step, closest to ``x0`` first;
        ``paired`` removes the nearest kink on each side together
      sampler (VectorSampler): vectors on which every step is checked not to
        decrease (upper) or increase (lower) the mean; a default sampler when None
      check_growth (bool): skip the sampled check when False

    Returns:
      tuple: the projection ``m`` and the RegularizationTrace

    Raises:
      EmptyProjection: both directions requested for a kinked generator
      SlopeOrderViolation: a kink contradicts ``direction``
    """
    direction = Projection(direction)
    order = Order(order)
    kinks = kinks_of(f)
    if not len(kinks):
        return f, RegularizationTrace([f], [0], [0.0], x0=x0, direction=direction, order=order)
    if direction is Projection.both:
        raise EmptyProjection(f"{f.describe()} has kinks; only one of its projections can exist")
    f = canonical(f)
    x0 = _base_point(f, kinks.zs, x0)
    _check_slope_order(f, kinks.zs, direction)
    trace = RegularizationTrace([f], [len(kinks)], x0=x0, direction=direction, order=order)
    if check_growth and sampler is None:
        sampler = VectorSampler()
    for z_minus, z_plus in _schedule(kinks.zs, x0, order):
        previous = trace.iterates[-1]
        current = regularize_step(previous, z_minus, z_plus, direction)
        trace.iterates.append(current)
        trace.kinks_remaining.append(len(kinks_of(current)))
        if check_growth:
            verdict = compare_empirical(previous, current, sampler=sampler, tol_cmp=tol_cmp)
            trace.mean_growth.append(verdict)
            if not verdict.holds(trace.required):
                _logger.error(f"Step removing {z_minus}, {z_plus} broke mean growth: {verdict.dict()}")
    m = trace.iterates[-1]
    trace.pal91_distances = pal91_convergence_report(trace, m, probes)
    _logger.info(f"{direction.value} projection of {f.describe()} in {trace.steps} steps")
    return m, trace
