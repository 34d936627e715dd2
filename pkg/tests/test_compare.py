# -*- coding: utf-8 -*-

import pytest

from qamean.compare import (ComparisonVerdict, Method, Relation, compare, compare_convexity,
                            compare_empirical, compare_ratio, merge_verdicts)
from qamean.exceptions import DerivativeUnavailable, IntervalMismatch
from qamean.generator import AffineOf, Exponential, GridSampled, identity, make_power, piecewise
from qamean.grid import Interval

__author__ = "Moshe Malawach"
__copyright__ = "Moshe Malawach"
__license__ = "mit"


def test_ratio_test_orders_powers(powers):
    assert compare_ratio(powers[1], powers[2]).relation is Relation.LEQ
    assert compare_ratio(powers[2], powers[1]).relation is Relation.GEQ
    assert compare_ratio(powers[-1], powers[1]).relation is Relation.LEQ
    assert compare_ratio(powers[2], AffineOf(powers[2], 3, -7)).relation is Relation.EQUIV


def test_convexity_test_orders_powers(powers):
    assert compare_convexity(powers[1], powers[2]).relation is Relation.LEQ
    assert compare_convexity(powers[2], powers[1]).relation is Relation.GEQ
    assert compare_convexity(powers[-1], powers[0]).relation is Relation.LEQ
    assert compare_convexity(powers[2], AffineOf(powers[2], -3, 1)).relation is Relation.EQUIV


def test_empirical_test(powers, sampler):
    leq = compare_empirical(powers[1], powers[2], sampler=sampler)
    assert leq.relation is Relation.LEQ
    assert leq.margin >= 0.0
    assert leq.witness_reverse is not None
    assert compare_empirical(powers[3], powers[0.5], sampler=sampler).relation is Relation.GEQ


def test_crossing_generators_are_incomparable(sampler):
    interval = Interval(0.5, 2.0)
    f, g = make_power(2, interval), Exponential(1, interval)
    ratio = compare_ratio(f, g)
    assert ratio.relation is Relation.INCOMPARABLE
    assert ratio.violation is not None
    empirical = compare_empirical(f, g, sampler=sampler)
    assert empirical.relation is Relation.INCOMPARABLE
    assert empirical.witness and empirical.witness_reverse
    relation, verdicts = compare(f, g, sampler=sampler)
    assert relation is Relation.INCOMPARABLE
    assert [v.method for v in verdicts] == [Method.ratio, Method.convexity, Method.empirical]


def test_grid_generators_skip_the_ratio_test(powers, sampler):
    grid = GridSampled(powers[2].sample(257))
    with pytest.raises(DerivativeUnavailable):
        compare_ratio(powers[1], grid)
    with pytest.raises(DerivativeUnavailable):
        compare(powers[1], grid, method='ratio')
    relation, verdicts = compare(powers[1], grid, sampler=sampler)
    assert relation is Relation.LEQ
    assert verdicts[0].relation is Relation.UNKNOWN


def test_single_method(powers, sampler):
    relation, verdicts = compare(powers[0], powers[1], method='convexity')
    assert relation is Relation.LEQ
    assert len(verdicts) == 1
    with pytest.raises(ValueError):
        compare(powers[0], powers[1], method='bogus')


def test_interval_mismatch(powers, unit):
    with pytest.raises(IntervalMismatch):
        compare_ratio(powers[1], Exponential(1, unit))


def test_holds():
    equiv = ComparisonVerdict(relation=Relation.EQUIV, method=Method.ratio)
    assert equiv.holds(Relation.LEQ) and equiv.holds(Relation.GEQ)
    leq = ComparisonVerdict(relation=Relation.LEQ, method=Method.ratio)
    assert leq.holds(Relation.LEQ) and not leq.holds(Relation.GEQ)


def test_merge_verdicts():
    def verdict(relation, method):
        return ComparisonVerdict(relation=relation, method=method)

    assert merge_verdicts([]) is Relation.UNKNOWN
    assert merge_verdicts([verdict(Relation.UNKNOWN, Method.ratio)]) is Relation.UNKNOWN
    assert merge_verdicts([verdict(Relation.LEQ, Method.ratio),
                           verdict(Relation.GEQ, Method.empirical)]) is Relation.UNKNOWN
    assert merge_verdicts([verdict(Relation.LEQ, Method.ratio),
                           verdict(Relation.INCOMPARABLE, Method.empirical)]) is Relation.INCOMPARABLE
    assert merge_verdicts([verdict(Relation.EQUIV, Method.empirical),
                           verdict(Relation.LEQ, Method.convexity)]) is Relation.LEQ
    assert merge_verdicts([verdict(Relation.LEQ, Method.ratio),
                           verdict(Relation.INCOMPARABLE, Method.convexity)]) is Relation.INCOMPARABLE


def test_merge_prefers_the_larger_margin():
    equiv = ComparisonVerdict(relation=Relation.EQUIV, method=Method.ratio, margin=-1e-14)
    leq = ComparisonVerdict(relation=Relation.LEQ, method=Method.empirical, margin=0.25)
    assert merge_verdicts([equiv, leq]) is Relation.LEQ
    loose = ComparisonVerdict(relation=Relation.LEQ, method=Method.ratio, margin=-1e-3)
    assert merge_verdicts([loose, equiv]) is Relation.EQUIV


def steep_with_two_kinks():
    g = Exponential(2, Interval(1.0, 10.0))
    return piecewise(g, [(2.0, 0.5, 1.0), (3.0, 1.0, 0.5)]), g


def test_convexity_sees_kinks_of_a_steep_generator():
    f, g = steep_with_two_kinks()
    verdict = compare_convexity(f, g)
    assert verdict.relation is Relation.INCOMPARABLE
    assert verdict.violation is not None
    assert compare_ratio(f, g).relation is Relation.INCOMPARABLE
    assert compare_convexity(g, f).relation is Relation.INCOMPARABLE


def test_sampled_kinked_generator_is_incomparable(sampler):
    f, g = steep_with_two_kinks()
    relation, verdicts = compare(GridSampled(f.sample(4097)), g, sampler=sampler)
    assert relation is Relation.INCOMPARABLE
    assert verdicts[0].relation is Relation.UNKNOWN
    assert verdicts[1].relation is Relation.INCOMPARABLE


def test_methods_agree_on_a_kinked_pair(desk, sampler):
    p2 = make_power(2, desk.interval)
    relation, verdicts = compare(desk, p2, sampler=sampler)
    assert relation is Relation.LEQ
    assert [v.relation for v in verdicts] == [Relation.LEQ] * 3
    assert compare(p2, desk, sampler=sampler)[0] is Relation.GEQ


@pytest.mark.parametrize("chain", [(-1, 1, 3), (-2, 0, 0.5), (0.5, 2, 3)])
def test_ordered_chain_has_no_witness_at_its_ends(powers, sampler, chain):
    f, g, h = (powers[p] for p in chain)
    assert compare_ratio(f, g).relation is Relation.LEQ
    assert compare_ratio(g, h).relation is Relation.LEQ
    verdict = compare_empirical(f, h, sampler=sampler)
    assert verdict.holds(Relation.LEQ)
    assert verdict.witness is None


def test_kinked_chain_has_no_witness_at_its_ends(desk, sampler):
    line, p2 = identity(desk.interval), make_power(2, desk.interval)
    assert compare_convexity(desk, line).relation is Relation.LEQ
    assert compare_ratio(line, p2).relation is Relation.LEQ
    assert compare_empirical(desk, p2, sampler=sampler).witness is None
