"""Envelope generators of C2 families from the ratio ``f''/f'``.

For a finite family the pointwise ``G = max f''/f'`` (``H = min`` for the
lower side) determines the least upper (greatest lower) bound generator

    u(x) = ∫_{x0}^x exp(∫_{x0}^t G(s) ds) dt

computed here with cumulative trapezoid quadrature on a uniform grid.
"""
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import List, Union

import numpy as np

from .compare import ComparisonVerdict, Relation, compare_ratio
from .exceptions import EnvelopeOverflow, InputError, OutOfDomain, SecondDerivativeUnavailable
from .generator import GridSampled
from .grid import GridFunction, check_same_interval, cumulative_integral
from .settings import CERT_SLACK, GRID_N

_logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


class Kind(str, enum.Enum):
    sup = 'sup'
    inf = 'inf'


@dataclass(frozen=True, eq=False)
class RatioEnvelope:
    """Pointwise envelope of ``f''/f'`` over a family (G for sup, H for inf)."""

    kind: Kind
    G: GridFunction
    anchor: float
    family: tuple = ()

    def __post_init__(self):
        if not self.G.interval.is_interior(self.anchor):
            raise OutOfDomain(f"Anchor {self.anchor} must lie inside the interval")


@dataclass(eq=False)
class EnvelopeResult:
    """Envelope generator with the envelope it came from and its certificates.

    Dominance certificates compare each member ``f`` with the generator
    (``compare_ratio(f, u)``), minimality certificates compare the generator
    with each catalog bound ``k`` (``compare_ratio(u, k)``). Both must read
    LEQ for sup envelopes and GEQ for inf envelopes.
    """

    kind: Kind
    generator: GridSampled
    envelope: Union[RatioEnvelope, 'LogDerivativeEnvelope']
    family: tuple
    dominance_certificates: List[ComparisonVerdict] = field(default_factory=list)
    minimality_certificates: List[ComparisonVerdict] = field(default_factory=list)
    catalog_bounds: List[str] = field(default_factory=list)

    @property
    def required(self):
        return Relation.LEQ if self.kind is Kind.sup else Relation.GEQ

    @property
    def certified(self):
        certificates = self.dominance_certificates + self.minimality_certificates
        return all(c.holds(self.required) for c in certificates)

    def add_minimality(self, catalog, cert_slack=CERT_SLACK):
        """Certify the generator against every catalog member bounding the family."""
        for name, bound in catalog.bounds_of(self.family, self.kind):
            self.catalog_bounds.append(name)
            self.minimality_certificates.append(
                compare_ratio(self.generator, bound, eps_mono=cert_slack))
        return self


def generator_from_slopes(slopes, anchor):
    """GridSampled ``u`` with ``u' = slopes`` and ``u(anchor) = 0``."""
    values = cumulative_integral(slopes.values, slopes.x, anchor)
    return GridSampled(GridFunction(slopes.interval, values), slopes=slopes)


def exp_checked(log_values):
    if np.max(log_values) > LOG_FLOAT_MAX:
        raise EnvelopeOverflow(f"exp of {np.max(log_values)} exceeds the floating point range")
    return np.exp(log_values)


def dominance(family, generator, cert_slack=CERT_SLACK):
    return [compare_ratio(f, generator, eps_mono=cert_slack) for f in family]


def ratio_envelope(family, kind=Kind.sup, n=GRID_N, anchor=None):
    """Pointwise max (sup) or min (inf) of ``f''/f'`` over the family."""
    kind = Kind(kind)
    family = tuple(family)
    if not family:
        raise InputError("The family must not be empty")
    interval = check_same_interval(*family)
    x = interval.nodes(n)
    ratios = []
    for f in family:
        try:
            ratios.append(f._second_derivative(x) / f._derivative(x))
        except SecondDerivativeUnavailable:
            raise SecondDerivativeUnavailable(
                f"Ratio envelope needs second derivatives, {f.describe()} has none") from None
    stacked = np.vstack(ratios)
    values = stacked.max(axis=0) if kind is Kind.sup else stacked.min(axis=0)
    anchor = interval.midpoint if anchor is None else anchor
    return RatioEnvelope(kind, GridFunction(interval, values), anchor, family)


def integrate_envelope(env, catalog=None, cert_slack=CERT_SLACK):
    """Envelope generator ``∫ exp(∫ G)`` from a RatioEnvelope."""
    inner = env.G.cumulative_integral(env.anchor)
    slopes = GridFunction(env.G.interval, exp_checked(inner.values))
    u = generator_from_slopes(slopes, env.anchor)
    result = EnvelopeResult(env.kind, u, env, env.family,
                            dominance_certificates=dominance(env.family, u, cert_slack))
    if catalog is not None:
        result.add_minimality(catalog, cert_slack)
    _logger.info(f"{env.kind.value} envelope of {len(env.family)} generators by ratio integration, "
                 f"certified={result.certified}")
    return result


def envelope_generator_c2(family, kind=Kind.sup, n=GRID_N, anchor=None, catalog=None,
                          cert_slack=CERT_SLACK):
    return integrate_envelope(ratio_envelope(family, kind, n=n, anchor=anchor),
                              catalog=catalog, cert_slack=cert_slack)
