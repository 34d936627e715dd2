"""Suprema in the order ``a ≺ b  <=>  a - b nonincreasing`` and C1 envelope generators.

For a finite family of continuous functions ``f_γ``:

    δ(x, y) = min_γ f_γ(x) - f_γ(y)                 (x <= y)
    Δ(x, y) = inf over partitions of Σ δ(t_{i-1}, t_i)

``Δ`` is additive, and ``h(x) = Δ(x, x0)`` (x <= x0), ``h(x) = -Δ(x0, x)``
(x > x0) is the least upper bound of the family. Applied to ``log f'`` it
gives ``s``, and ``u = ∫ exp(s)`` generates the least mean above the family.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, NoConvergence, NoUpperBound, OutOfDomain
from .generator import canonical, log_derivative
from .grid import GridFunction, check_same_interval
from .lattice_smooth import (EnvelopeResult, Kind, dominance, exp_checked,
                             generator_from_slopes)
from .settings import CERT_SLACK, GRID_N, REFINE_DEPTH, REFINE_TOL

_logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LogDerivativeEnvelope:
    """``s``, the ≺-envelope of the members' ``log f'``, with ``s(anchor) = 0``."""

    s: GridFunction
    anchor: float
    family_logds: tuple


def _family_interval(family):
    family = tuple(family)
    if not family:
        raise InputError("The family must not be empty")
    return family, check_same_interval(*family)


def _evaluate(family, t):
    return np.stack([np.reshape(f(t.ravel()), t.shape) for f in family])


def small_delta(family, x, y):
    """``min_γ f_γ(x) - f_γ(y)`` for ``x <= y``."""
    family, _ = _family_interval(family)
    if x > y:
        raise InputError(f"small_delta needs x <= y, got {x} > {y}")
    values = _evaluate(family, np.array([x, y], dtype=float))
    return float(np.min(values[:, 0] - values[:, 1]))


def _partition_sums(family, starts, ends, depth):
    """Σ δ over the dyadic partition of depth ``depth`` of every cell."""
    fractions = np.linspace(0.0, 1.0, 2 ** depth + 1)
    t = starts[:, None] + (ends - starts)[:, None] * fractions[None, :]
    values = _evaluate(family, t)
    increments = values[..., :-1] - values[..., 1:]
    return increments.min(axis=0).sum(axis=1)


def refined_cell_deltas(family, starts, ends, refine_tol=REFINE_TOL, max_depth=REFINE_DEPTH):
    """Δ on each cell ``[starts[i], ends[i]]`` by dyadic refinement.

    Refinement stops once a step changes the total by less than
    ``refine_tol``; cells whose own change is negligible are frozen earlier.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    sums = _partition_sums(family, starts, ends, 0)
    active = np.arange(starts.size)
    freeze = refine_tol / (4.0 * max(starts.size, 1))
    for depth in range(1, max_depth + 1):
        refined = _partition_sums(family, starts[active], ends[active], depth)
        change = sums[active] - refined
        sums[active] = refined
        total = float(np.sum(np.abs(change)))
        if total < refine_tol:
            _logger.debug(f"Partition refinement converged at depth {depth}")
            return sums
        active = active[np.abs(change) > freeze]
    raise NoConvergence(f"Partition refinement did not reach {refine_tol} in {max_depth} steps",
                        best=sums)


def _partition(family, x, y):
    """Grid nodes of the family strictly inside ``(x, y)`` plus the endpoints."""
    nodes = next((f.x for f in family if isinstance(f, GridFunction)), np.zeros(0))
    inside = nodes[(nodes > x) & (nodes < y)]
    return np.concatenate([[x], inside, [y]])


def capital_delta(family, x, y, refine_tol=REFINE_TOL, max_depth=REFINE_DEPTH):
    """Partition infimum of δ over ``[x, y]``.

    Raises:
      NoConvergence: with the best sum in ``best``
    """
    family, interval = _family_interval(family)
    if x > y:
        raise InputError(f"capital_delta needs x <= y, got {x} > {y}")
    interval.clip(np.array([x, y]))
    if x == y:
        return 0.0
    points = _partition(family, x, y)
    try:
        cells = refined_cell_deltas(family, points[:-1], points[1:], refine_tol, max_depth)
    except NoConvergence as e:
        raise NoConvergence(str(e), best=float(np.sum(e.best))) from None
    return float(np.sum(cells))


def sup_order(family, x0, n=None, refine_tol=REFINE_TOL, max_depth=REFINE_DEPTH):
    """≺-supremum of the family, anchored so that ``h(x0) = 0``.

    Args:
      family: GridFunctions (exact evaluators are used when attached)
      x0 (float): interior anchor
      n (int): number of nodes; defaults to the first member's

    Returns:
      GridFunction
    """
    family, interval = _family_interval(family)
    if not interval.is_interior(x0):
        raise OutOfDomain(f"Anchor {x0} must lie inside the interval")
    n = n or family[0].n
    x = interval.nodes(n)
    # cells of the grid, the one holding x0 split in two
    points = np.unique(np.concatenate([x, [x0]]))
    cells = refined_cell_deltas(family, points[:-1], points[1:], refine_tol, max_depth)
    # H(t) = -Δ(lo, t) at every partition point
    primitive = np.concatenate([[0.0], -np.cumsum(cells)])
    at_anchor = primitive[np.searchsorted(points, x0)]
    values = np.interp(x, points, primitive) - at_anchor
    if not np.all(np.isfinite(values)):
        raise NoUpperBound("The family has no ≺-upper bound on the grid")
    _logger.debug(f"sup_order on {n} nodes anchored at {x0}")
    return GridFunction(interval, values)


def inf_order(family, x0, n=None, refine_tol=REFINE_TOL, max_depth=REFINE_DEPTH):
    """≺-infimum: ``-sup_order`` of the negated family."""
    return -sup_order([-f for f in family], x0, n=n, refine_tol=refine_tol, max_depth=max_depth)


def derivative_envelope_oracle(family, x0, n=None):
    """Cumulative integral of the pointwise max of finite-difference derivatives.

    Independent of the partition construction; for piecewise C1 members it
    converges to the same ≺-supremum.
    """
    family, interval = _family_interval(family)
    n = n or family[0].n
    x = interval.nodes(n)
    derivatives = np.vstack([np.gradient(f(x), x, edge_order=2) for f in family])
    return GridFunction(interval, derivatives.max(axis=0)).cumulative_integral(x0)


def envelope_generator_c1(family, kind=Kind.sup, n=GRID_N, anchor=None, catalog=None,
                          refine_tol=REFINE_TOL, max_depth=REFINE_DEPTH, cert_slack=CERT_SLACK):
    """Envelope generator of C1 generators through the ≺-envelope of ``log f'``."""
    kind = Kind(kind)
    family = tuple(family)
    interval = check_same_interval(*family)
    anchor = interval.midpoint if anchor is None else anchor
    logds = tuple(log_derivative(canonical(f), n) for f in family)
    order = sup_order if kind is Kind.sup else inf_order
    s = order(logds, anchor, n=n, refine_tol=refine_tol, max_depth=max_depth)
    u = generator_from_slopes(GridFunction(interval, exp_checked(s.values)), anchor)
    result = EnvelopeResult(kind, u, LogDerivativeEnvelope(s, anchor, logds), family,
                            dominance_certificates=dominance(family, u, cert_slack))
    if catalog is not None:
        result.add_minimality(catalog, cert_slack)
    _logger.info(f"{kind.value} envelope of {len(family)} generators by log-derivative envelope, "
                 f"certified={result.certified}")
    return result
