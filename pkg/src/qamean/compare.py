"""Comparability of quasi-arithmetic means.

``QA_f <= QA_g`` is decided three ways, after both generators are made
increasing:

* ratio: ``log g' - log f'`` is nondecreasing;
* convexity: ``f o g^{-1}`` has nonincreasing secant slopes (it is concave);
* empirical: no sampled vector has ``QA_f(v) > QA_g(v)``; this one can only refute.
"""
import enum
import logging
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from .exceptions import DerivativeUnavailable
from .generator import canonical, comparison_nodes, kinks_of
from .grid import check_same_interval
from .mean import VectorSampler, qa_means
from .settings import EPS_MONO, GRID_N, TOL_CMP

_logger = logging.getLogger(__name__)


class Relation(str, enum.Enum):
    LEQ = 'LEQ'
    GEQ = 'GEQ'
    EQUIV = 'EQUIV'
    INCOMPARABLE = 'INCOMPARABLE'
    UNKNOWN = 'UNKNOWN'


class Method(str, enum.Enum):
    ratio = 'ratio'
    convexity = 'convexity'
    empirical = 'empirical'


class ComparisonVerdict(BaseModel):
    """Outcome of one comparability test.

    ``margin`` is the worst slack of the reported relation (negative values
    down to minus the tolerance are accepted roundoff). ``witness`` refutes
    LEQ and ``witness_reverse`` refutes GEQ; ``violation`` is the grid pair
    where a grid test failed.
    """

    relation: Relation
    method: Method
    margin: float = 0.0
    witness: Optional[List[float]] = None
    witness_reverse: Optional[List[float]] = None
    violation: Optional[Tuple[float, float]] = None

    def holds(self, relation):
        """True when the verdict establishes ``relation`` (EQUIV implies both directions)."""
        return self.relation is relation or (
            self.relation is Relation.EQUIV and relation in (Relation.LEQ, Relation.GEQ))


def _monotone_verdict(sequence, nodes, method, eps_mono):
    """LEQ if ``sequence`` is nondecreasing, GEQ if nonincreasing, within slack."""
    steps = np.diff(sequence)
    span = float(np.max(sequence) - np.min(sequence))
    slack = eps_mono * max(span, 1.0)
    up = bool(np.all(steps >= -slack))
    down = bool(np.all(steps <= slack))
    worst_down, worst_up = int(np.argmin(steps)), int(np.argmax(steps))
    if up and down:
        return ComparisonVerdict(relation=Relation.EQUIV, method=method,
                                 margin=-float(np.max(np.abs(steps))))
    if up:
        return ComparisonVerdict(relation=Relation.LEQ, method=method, margin=float(steps[worst_down]))
    if down:
        return ComparisonVerdict(relation=Relation.GEQ, method=method, margin=-float(steps[worst_up]))
    return ComparisonVerdict(relation=Relation.INCOMPARABLE, method=method,
                             margin=float(steps[worst_down]),
                             violation=(float(nodes[worst_down]), float(nodes[worst_down + 1])))


def compare_ratio(f, g, eps_mono=EPS_MONO, n=GRID_N):
    """Ratio test: ``QA_f <= QA_g`` iff ``g'/f'`` is nondecreasing."""
    check_same_interval(f, g)
    for h in (f, g):
        if not h.has_derivative:
            raise DerivativeUnavailable(f"Ratio test needs derivatives, {h.describe()} has none")
    x = comparison_nodes(f, g, n=n)
    log_ratio = np.log(np.abs(g._derivative(x))) - np.log(np.abs(f._derivative(x)))
    return _monotone_verdict(log_ratio, x, Method.ratio, eps_mono)


def compare_convexity(f, g, eps_mono=EPS_MONO, n=GRID_N):
    """Convexity test: ``QA_f <= QA_g`` iff ``f o g^{-1}`` is concave."""
    interval = check_same_interval(f, g)
    f, g = canonical(f), canonical(g)
    # secants over the image of the x nodes, kinks included as nodes
    kinks = np.concatenate([kinks_of(f).zs, kinks_of(g).zs])
    x = np.union1d(comparison_nodes(f, g, n=n), kinks[(kinks > interval.lo) & (kinks < interval.hi)])
    with np.errstate(divide='ignore', invalid='ignore'):
        slopes = np.diff(f._value(x)) / np.diff(g._value(x))
    if not np.all(np.isfinite(slopes) & (slopes > 0)):
        _logger.warning(f"Non-positive secant slopes comparing {f.describe()} with {g.describe()}")
        return ComparisonVerdict(relation=Relation.UNKNOWN, method=Method.convexity)
    return _monotone_verdict(-np.log(slopes), x, Method.convexity, eps_mono)


def compare_empirical(f, g, sampler=None, tol_cmp=TOL_CMP):
    """Definition test on sampled vectors; refutes, never proves."""
    interval = check_same_interval(f, g)
    sampler = sampler or VectorSampler()
    vectors = sampler.draw(interval)
    slack = qa_means(g, vectors) - qa_means(f, vectors)
    leq_fail, geq_fail = int(np.argmin(slack)), int(np.argmax(slack))
    leq = bool(slack[leq_fail] >= -tol_cmp)
    geq = bool(slack[geq_fail] <= tol_cmp)
    if leq and geq:
        return ComparisonVerdict(relation=Relation.EQUIV, method=Method.empirical,
                                 margin=-float(np.max(np.abs(slack))))
    if leq:
        return ComparisonVerdict(relation=Relation.LEQ, method=Method.empirical,
                                 margin=float(slack[leq_fail]),
                                 witness_reverse=vectors[geq_fail].tolist())
    if geq:
        return ComparisonVerdict(relation=Relation.GEQ, method=Method.empirical,
                                 margin=-float(slack[geq_fail]),
                                 witness=vectors[leq_fail].tolist())
    return ComparisonVerdict(relation=Relation.INCOMPARABLE, method=Method.empirical,
                             margin=float(slack[leq_fail]),
                             witness=vectors[leq_fail].tolist(),
                             witness_reverse=vectors[geq_fail].tolist())


def merge_verdicts(verdicts):
    """Single relation from several methods.

    An INCOMPARABLE verdict carries a witness or a violated grid pair and
    wins. Contradicting directed verdicts give UNKNOWN. Otherwise the verdict
    with the largest margin decides; equal margins go to ratio, then
    convexity, then empirical.
    """
    decisive = [v for v in verdicts if v.relation is not Relation.UNKNOWN]
    if not decisive:
        return Relation.UNKNOWN
    if any(v.relation is Relation.INCOMPARABLE for v in decisive):
        return Relation.INCOMPARABLE
    directed = {v.relation for v in decisive} & {Relation.LEQ, Relation.GEQ}
    if len(directed) > 1:
        _logger.warning(f"Contradictory verdicts: {[v.dict() for v in decisive]}")
        return Relation.UNKNOWN
    order = [Method.ratio, Method.convexity, Method.empirical]
    return min(decisive, key=lambda v: (-v.margin, order.index(v.method))).relation


def compare(f, g, method='all', sampler=None, eps_mono=EPS_MONO, tol_cmp=TOL_CMP, n=GRID_N):
    """Run one method, or every applicable one for ``'all'``.

    Generators without derivatives are routed away from the ratio test.

    Returns:
      tuple: merged Relation and the list of ComparisonVerdict
    """
    method = Method(method) if method != 'all' else None
    verdicts = []
    if method in (None, Method.ratio):
        if f.has_derivative and g.has_derivative:
            verdicts.append(compare_ratio(f, g, eps_mono=eps_mono, n=n))
        elif method is Method.ratio:
            raise DerivativeUnavailable("Ratio test needs derivatives on both generators")
        else:
            verdicts.append(ComparisonVerdict(relation=Relation.UNKNOWN, method=Method.ratio))
    if method in (None, Method.convexity):
        verdicts.append(compare_convexity(f, g, eps_mono=eps_mono, n=n))
    if method in (None, Method.empirical):
        verdicts.append(compare_empirical(f, g, sampler=sampler, tol_cmp=tol_cmp))
    return merge_verdicts(verdicts), verdicts
