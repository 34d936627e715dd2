"""Brute-force verification of means, comparisons, envelopes and projections.

Everything here re-derives results by independent means (sampled vectors,
a catalog of known generators, closed forms) and reports instead of
raising, so that the CLI can turn failures into an exit status.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from .compare import (ComparisonVerdict, Relation, compare, compare_convexity, compare_empirical,
                      compare_ratio)
from .exceptions import InputError, NoUpperBoundInCatalog
from .generator import Exponential, affine, identity, make_power, normalized_distance, piecewise
from .grid import GridFunction, Interval
from .lattice_c1 import (capital_delta, derivative_envelope_oracle, envelope_generator_c1,
                         sup_order)
from .lattice_smooth import Kind, envelope_generator_c2
from .mean import VectorSampler, qa_mean, qa_means
from .regularize import Order, regularize
from .settings import (CERT_SLACK, EPS_MONO, GRID_N, REFINE_TOL, TOL_CMP, TOL_ENVELOPE, TOL_EQ,
                       TOL_GRID, TOL_INV, Tolerances)

_logger = logging.getLogger(__name__)

CATALOG_POWERS = (-2, -1, -0.5, 0, 0.5, 1, 2, 3)
CATALOG_EXPONENTIALS = (-1, 1, 2)


def _power_name(p):
    return 'log' if p == 0 else f"power:{p:g}"


def _dominates(f, k, required, cert_slack):
    if f.has_derivative and k.has_derivative:
        return compare_ratio(f, k, eps_mono=cert_slack).holds(required)
    return compare_convexity(f, k, eps_mono=cert_slack).holds(required)


@dataclass
class Catalog:
    """Named generators of known comparability on one interval."""

    interval: Interval
    generators: Dict[str, object] = field(default_factory=dict)

    @classmethod
    def build(cls, interval, powers=CATALOG_POWERS, exponentials=CATALOG_EXPONENTIALS, kinked=True):
        """Powers (only for ``lo > 0``), exponentials and two kinked identities."""
        generators = {}
        if interval.lo > 0:
            for p in powers:
                generators[_power_name(p)] = make_power(p, interval)
        for p in exponentials:
            generators[f"exp:{p:g}"] = Exponential(p, interval)
        if kinked:
            z = interval.midpoint
            generators['kinked:concave'] = piecewise(identity(interval), [(z, 1.0, 0.5)])
            generators['kinked:convex'] = piecewise(identity(interval), [(z, 0.5, 1.0)])
        return cls(interval, generators)

    @classmethod
    def from_config(cls, interval, section=None):
        section = section or {}
        return cls.build(interval,
                         powers=section.get('powers', CATALOG_POWERS),
                         exponentials=section.get('exponentials', CATALOG_EXPONENTIALS),
                         kinked=section.get('kinked', True))

    def __len__(self):
        return len(self.generators)

    def items(self):
        return self.generators.items()

    def bounds_of(self, family, kind=Kind.sup, cert_slack=CERT_SLACK):
        """Catalog members above (sup) or below (inf) every member of ``family``."""
        required = Relation.LEQ if Kind(kind) is Kind.sup else Relation.GEQ
        for name, k in self.generators.items():
            if all(_dominates(f, k, required, cert_slack) for f in family):
                yield name, k


class MemberCheck(BaseModel):
    name: str
    ratio: ComparisonVerdict
    empirical: ComparisonVerdict
    passed: bool


class EnvelopeReport(BaseModel):
    """Dominance of every member and minimality against every catalog bound."""

    kind: Kind
    dominance: List[MemberCheck] = []
    minimality: List[MemberCheck] = []
    worst_dominance_margin: float = 0.0
    worst_minimality_margin: float = 0.0
    witnesses: List[List[float]] = []
    passed: bool = True


def _check(name, lower, upper, sampler, tol, cert_slack):
    """``QA_lower <= QA_upper`` by the ratio test (if available) and by sampling."""
    if lower.has_derivative and upper.has_derivative:
        ratio = compare_ratio(lower, upper, eps_mono=cert_slack)
    else:
        ratio = compare_convexity(lower, upper, eps_mono=cert_slack)
    empirical = compare_empirical(lower, upper, sampler=sampler, tol_cmp=tol)
    passed = ratio.holds(Relation.LEQ) and empirical.holds(Relation.LEQ)
    return MemberCheck(name=name, ratio=ratio, empirical=empirical, passed=passed)


def verify_envelope(result, family=None, catalog=None, sampler=None, tol_grid=TOL_GRID,
                    cert_slack=CERT_SLACK):
    """Re-check an EnvelopeResult against its family and a catalog.

    Empirical comparisons involving the grid generator use ``tol_grid``
    times the interval width.

    Returns:
      EnvelopeReport
    """
    family = tuple(result.family if family is None else family)
    u = result.generator
    sampler = sampler or VectorSampler()
    tol = tol_grid * u.interval.width
    sup = result.kind is Kind.sup
    report = EnvelopeReport(kind=result.kind)
    for i, f in enumerate(family):
        name = f"member[{i}] {f.describe()}"
        check = _check(name, f, u, sampler, tol, cert_slack) if sup else \
            _check(name, u, f, sampler, tol, cert_slack)
        report.dominance.append(check)
    if catalog is not None:
        for name, k in catalog.bounds_of(family, result.kind, cert_slack):
            check = _check(name, u, k, sampler, tol, cert_slack) if sup else \
                _check(name, k, u, sampler, tol, cert_slack)
            report.minimality.append(check)
    if report.dominance:
        report.worst_dominance_margin = min(c.empirical.margin for c in report.dominance)
    if report.minimality:
        report.worst_minimality_margin = min(c.empirical.margin for c in report.minimality)
    for check in report.dominance + report.minimality:
        if not check.passed:
            report.passed = False
            if check.empirical.witness is not None:
                report.witnesses.append(check.empirical.witness)
            _logger.error(f"Envelope certificate failed for {check.name}: "
                          f"ratio={check.ratio.relation.value}, empirical={check.empirical.relation.value}, "
                          f"witness={check.empirical.witness}")
    return report


def uqa_lqa_report(family, v, catalog, kind=Kind.sup, result=None, n=GRID_N):
    """Best catalog bound and envelope mean at ``v``.

    Returns:
      tuple: (min of the dominating catalog means at ``v``, envelope mean at ``v``)
        for sup, (max of the dominated ones, envelope mean) for inf

    Raises:
      NoUpperBoundInCatalog: nothing in the catalog bounds the family
    """
    kind = Kind(kind)
    family = tuple(family)
    bounds = [k for _, k in catalog.bounds_of(family, kind)]
    if not bounds:
        raise NoUpperBoundInCatalog(f"No catalog generator bounds {[f.describe() for f in family]}")
    values = [qa_mean(k, v) for k in bounds]
    catalog_value = min(values) if kind is Kind.sup else max(values)
    if result is None:
        result = envelope_generator_c1(family, kind, n=n)
    return catalog_value, qa_mean(result.generator, v)


class CheckResult(BaseModel):
    name: str
    passed: bool
    worst: float = 0.0
    limit: Optional[float] = None
    detail: str = ''


class SuiteReport(BaseModel):
    suite: str
    checks: List[CheckResult] = []

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def to_json(self):
        return self.json(sort_keys=True, indent=2)


def _check_result(name, worst, limit, detail=''):
    passed = bool(worst <= limit)
    if not passed:
        _logger.error(f"{name}: {worst} exceeds {limit} {detail}")
    else:
        _logger.info(f"{name}: ok ({worst})")
    return CheckResult(name=name, passed=passed, worst=float(worst), limit=float(limit), detail=detail)


def _axiom_violations(g, vectors, rng):
    """Worst violation of each mean axiom over ``vectors``, relative to the scale of the arguments."""
    scale = max(1.0, abs(g.interval.lo), abs(g.interval.hi))
    means = qa_means(g, vectors)
    lows = np.array([v.min() for v in vectors])
    highs = np.array([v.max() for v in vectors])
    between = np.max(np.maximum(lows - means, means - highs))
    symmetric = np.max(np.abs(qa_means(g, [rng.permutation(v) for v in vectors]) - means))
    constants = rng.uniform(g.interval.lo, g.interval.hi, size=len(vectors))
    reflexive = np.max(np.abs(qa_means(g, [np.full(v.size, c) for v, c in zip(vectors, constants)])
                              - constants))
    bumped = []
    for v in vectors:
        w = v.copy()
        i = rng.integers(v.size)
        w[i] = rng.uniform(w[i], g.interval.hi)
        bumped.append(w)
    monotone = np.max(means - qa_means(g, bumped))
    alpha = rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0])
    affine_gap = np.max(np.abs(qa_means(affine(g, alpha, rng.uniform(-5, 5)), vectors) - means))
    return {name: float(value) / scale for name, value in
            [('betweenness', between), ('symmetry', symmetric), ('reflexivity', reflexive),
             ('monotonicity', monotone), ('affine invariance', affine_gap)]}


# relative to the scale of the arguments; affine maps lose digits to cancellation
AXIOM_LIMITS = {
    'symmetry': 1e-13,
    'monotonicity': 1e-12,
    'affine invariance': 1e-10,
}


def suite_axioms(draws=10000, seed=42, interval=None, tol_inv=TOL_INV, catalog=None):
    """Mean axioms on every catalog generator.

    Betweenness and reflexivity only lose the inversion error ``tol_inv``;
    the other axioms get the fixed limits of ``AXIOM_LIMITS``.
    """
    interval = interval or Interval(1.0, 10.0)
    catalog = Catalog.from_config(interval, catalog)
    rng = np.random.default_rng(seed)
    per_generator = math.ceil(draws / len(catalog))
    sampler = VectorSampler(seed=seed, count=per_generator)
    worst = {}
    for name, g in catalog.items():
        for axiom, value in _axiom_violations(g, sampler.draw(interval), rng).items():
            worst[axiom] = max(worst.get(axiom, 0.0), value)
    return [_check_result(f"axiom {axiom}", value, AXIOM_LIMITS.get(axiom, tol_inv), f"{draws} draws")
            for axiom, value in sorted(worst.items())]


def comparable_pairs(interval):
    """28 ordered catalog pairs ``(f, g)`` with ``QA_f <= QA_g``."""
    catalog = Catalog.build(interval, kinked=False)
    powers = [-2, -1, 0, 0.5, 1, 2, 3]
    names = [(_power_name(p), _power_name(q)) for p, q in itertools.combinations(powers, 2)]
    names += [('exp:-1', 'exp:1'), ('exp:-1', 'exp:2'), ('exp:1', 'exp:2')]
    names += [('exp:-1', 'power:1'), ('power:1', 'exp:1'), ('power:1', 'exp:2'), ('log', 'exp:1')]
    return [(a, b, catalog.generators[a], catalog.generators[b]) for a, b in names]


def suite_compare(seed=42, vectors=1000, interval=None, tol_cmp=TOL_CMP, eps_mono=EPS_MONO):
    interval = interval or Interval(1.0, 10.0)
    sampler = VectorSampler(seed=seed, count=vectors)
    failures = []
    for a, b, f, g in comparable_pairs(interval):
        relation, verdicts = compare(f, g, sampler=sampler, tol_cmp=tol_cmp, eps_mono=eps_mono)
        if not all(v.holds(Relation.LEQ) for v in verdicts):
            failures.append(f"{a} vs {b}: " + ', '.join(f"{v.method.value}={v.relation.value}"
                                                        for v in verdicts))
    return [_check_result('comparable pairs agree on LEQ', len(failures), 0, '; '.join(failures))]


def envelope_cases():
    """``(label, family, closed form or None)`` for the envelope checks."""
    i12, i01, i110, crossing = (Interval(1.0, 2.0), Interval(0.0, 1.0), Interval(1.0, 10.0),
                                Interval(0.5, 2.0))
    return [
        ('sup {power:0.5, power:2} on [1,2]',
         (make_power(0.5, i12), make_power(2, i12)), make_power(2, i12)),
        ('sup {exp:1, exp:2} on [0,1]',
         (Exponential(1, i01), Exponential(2, i01)), Exponential(2, i01)),
        ('sup {power:1, power:2} on [1,10]',
         (make_power(1, i110), make_power(2, i110)), make_power(2, i110)),
        ('sup {power:2, exp:1} on [0.5,2]',
         (make_power(2, crossing), Exponential(1, crossing)), None),
    ]


def suite_envelopes(seed=42, vectors=1000, n=GRID_N, tol_envelope=TOL_ENVELOPE, tol_grid=TOL_GRID,
                    cert_slack=CERT_SLACK, refine_tol=REFINE_TOL, catalog=None, draws=50):
    sampler = VectorSampler(seed=seed, count=vectors)
    checks = []
    for label, family, closed_form in envelope_cases():
        bounds = Catalog.from_config(family[0].interval, catalog)
        c2 = envelope_generator_c2(family, Kind.sup, n=n, catalog=bounds, cert_slack=cert_slack)
        c1 = envelope_generator_c1(family, Kind.sup, n=n, catalog=bounds, refine_tol=refine_tol,
                                   cert_slack=cert_slack)
        if closed_form is not None:
            checks.append(_check_result(f"{label}: closed form",
                                        normalized_distance(c2.generator, closed_form), tol_envelope))
        checks.append(_check_result(f"{label}: pathway agreement",
                                    normalized_distance(c1.generator, c2.generator), tol_envelope))
        for pathway, result in (('c2', c2), ('c1', c1)):
            report = verify_envelope(result, catalog=bounds, sampler=sampler, tol_grid=tol_grid,
                                     cert_slack=cert_slack)
            checks.append(CheckResult(name=f"{label}: {pathway} certificates", passed=report.passed,
                                      worst=-min(report.worst_dominance_margin,
                                                 report.worst_minimality_margin),
                                      detail=f"{len(report.witnesses)} witnesses"))
    checks.append(_uqa_check(seed, draws, n, tol_grid, catalog))
    return checks


def _uqa_check(seed, draws, n, tol_grid=TOL_GRID, catalog=None):
    """Envelope mean never above the best catalog bound on random draws."""
    interval = Interval(1.0, 10.0)
    catalog = Catalog.from_config(interval, dict(catalog or {}, kinked=False))
    names = sorted(catalog.generators)
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(draws):
        chosen = rng.choice(names, size=2, replace=False)
        family = [catalog.generators[name] for name in chosen]
        v = rng.uniform(interval.lo, interval.hi, size=int(rng.integers(2, 9)))
        try:
            bound, envelope = uqa_lqa_report(family, v, catalog, n=n)
        except NoUpperBoundInCatalog:
            continue
        worst = max(worst, envelope - bound)
    return _check_result('envelope mean below catalog bounds', max(worst, 0.0),
                         tol_grid * interval.width, f"{draws} draws")


def _square_family(n):
    interval = Interval(-1.0, 1.0)
    return [GridFunction.sample(np.square, interval, n),
            GridFunction.sample(lambda x: -np.square(x), interval, n)]


def _exponential_family(n):
    interval = Interval(0.0, 1.0)
    return [GridFunction.sample(np.exp, interval, n),
            GridFunction.sample(lambda x: np.exp(2 * x), interval, n)]


def suite_construction(seed=42, n=GRID_N, refine_tol=REFINE_TOL, triples=100):
    rng = np.random.default_rng(seed)
    squares = _square_family(n)
    worst = 0.0
    for x, y, z in np.sort(rng.uniform(-1.0, 1.0, size=(triples, 3)), axis=1):
        gap = capital_delta(squares, x, y) + capital_delta(squares, y, z) - capital_delta(squares, x, z)
        worst = max(worst, abs(gap))
    checks = [_check_result('delta additivity', worst, 2 * refine_tol, f"{triples} triples")]
    for label, family, x0 in (('squares', squares, 0.0), ('exponentials', _exponential_family(n), 0.5)):
        distance = sup_order(family, x0).sup_distance(derivative_envelope_oracle(family, x0))
        checks.append(_check_result(f"sup_order vs derivative oracle ({label})", distance, 1e-5))
    return checks


def desk_kink():
    """``x`` up to 1, then slope 1/2, on ``[0.5, 2]``."""
    return piecewise(identity(Interval(0.5, 2.0)), [(1.0, 1.0, 0.5)])


def two_kinks():
    return piecewise(identity(Interval(0.0, 3.0)), [(1.0, 1.0, 0.5), (2.0, 1.0, 0.5)])


def suite_regularize(seed=42, vectors=1000, tol_eq=TOL_EQ, tol_cmp=TOL_CMP):
    sampler = VectorSampler(seed=seed, count=vectors)
    f = desk_kink()
    m, trace = regularize(f, 'upper', sampler=sampler, tol_cmp=tol_cmp)
    checks = [CheckResult(name='desk example: one step', passed=trace.steps == 1, worst=trace.steps)]
    checks.append(CheckResult(name='desk example: mean grows', passed=trace.certified,
                              worst=-min(v.margin for v in trace.mean_growth)))
    checks.append(_check_result('desk example: equivalent to identity',
                                normalized_distance(m, identity(f.interval)), tol_eq))
    vs = sampler.draw(f.interval)
    arithmetic = np.array([np.mean(v) for v in vs])
    checks.append(_check_result('desk example: arithmetic mean',
                                float(np.max(np.abs(qa_means(m, vs) - arithmetic))), 1e-8))
    bounds = [g for g in (make_power(1, f.interval), make_power(2, f.interval))
             if compare_ratio(make_power(1, f.interval), g).holds(Relation.LEQ)]
    checks.append(CheckResult(name='desk example: projection below its bounds',
                              passed=all(compare_ratio(m, g).holds(Relation.LEQ) for g in bounds)))
    for label, g in (('desk example', f), ('two kinks', two_kinks())):
        _, trace = regularize(g, 'upper')
        d = np.array(trace.pal91_distances)
        decreasing = bool(np.all(np.diff(d) < 0) and d[-1] == 0.0)
        checks.append(CheckResult(name=f"{label}: ratio distances decrease to 0", passed=decreasing,
                                  worst=float(d[0]), detail=str(trace.pal91_distances)))
    nearest, _ = regularize(two_kinks(), 'upper', order=Order.nearest)
    paired, _ = regularize(two_kinks(), 'upper', x0=1.5, order=Order.paired)
    checks.append(_check_result('kink orders give equivalent limits',
                                normalized_distance(nearest, paired), tol_eq))
    return checks


SUITES = {
    'axioms': lambda seed, vectors, n, tol, catalog: suite_axioms(
        seed=seed, tol_inv=tol.tol_inv, catalog=catalog),
    'compare': lambda seed, vectors, n, tol, catalog: suite_compare(
        seed=seed, vectors=vectors, tol_cmp=tol.tol_cmp, eps_mono=tol.eps_mono),
    'construction': lambda seed, vectors, n, tol, catalog: suite_construction(
        seed=seed, n=n, refine_tol=tol.refine_tol),
    'envelopes': lambda seed, vectors, n, tol, catalog: suite_envelopes(
        seed=seed, vectors=vectors, n=n, tol_envelope=tol.tol_envelope, tol_grid=tol.tol_grid,
        cert_slack=tol.cert_slack, refine_tol=tol.refine_tol, catalog=catalog),
    'regularize': lambda seed, vectors, n, tol, catalog: suite_regularize(
        seed=seed, vectors=vectors, tol_eq=tol.tol_eq, tol_cmp=tol.tol_cmp),
}


def run_suite(name='all', seed=42, vectors=1000, n=GRID_N, tolerances=None, catalog=None):
    """Run one verification suite, or every suite for ``'all'``.

    Args:
      tolerances (Tolerances): limits of the checks, the defaults when None
      catalog (dict): ``catalog`` configuration section

    Returns:
      SuiteReport
    """
    if name != 'all' and name not in SUITES:
        raise InputError(f"Unknown suite {name!r}, expected one of {sorted(SUITES)} or 'all'")
    tolerances = tolerances or Tolerances()
    names = sorted(SUITES) if name == 'all' else [name]
    report = SuiteReport(suite=name)
    for suite in names:
        _logger.info(f"Running suite {suite}")
        report.checks.extend(SUITES[suite](seed, vectors, n, tolerances, catalog))
    failed = [check.name for check in report.checks if not check.passed]
    if failed:
        _logger.error(f"Suite {name} failed: {failed}")
    return report
