# -*- coding: utf-8 -*-

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qamean.exceptions import DegenerateProbe, OutOfDomain
from qamean.generator import AffineOf, make_power
from qamean.grid import Interval
from qamean.mean import VectorSampler, default_probes, pal91_ratio_distance, qa_mean, qa_means

__author__ = "Moshe Malawach"
__copyright__ = "Moshe Malawach"
__license__ = "mit"

INTERVAL = Interval(1.0, 10.0)
GENERATORS = {p: make_power(p, INTERVAL) for p in (-2, -1, -0.5, 0, 0.5, 1, 2, 3)}

vectors = st.lists(st.floats(1.0, 10.0), min_size=1, max_size=8)


def test_power_means(powers):
    assert qa_mean(powers[2], [1, 7]) == pytest.approx(5.0, abs=1e-12)
    assert qa_mean(powers[0], [2, 8]) == pytest.approx(4.0, abs=1e-12)
    assert qa_mean(powers[-1], [1, 3]) == pytest.approx(1.5, abs=1e-12)


def test_invalid_vectors(powers):
    with pytest.raises(OutOfDomain):
        qa_mean(powers[1], [])
    with pytest.raises(OutOfDomain):
        qa_mean(powers[1], [0.5, 2.0])
    with pytest.raises(OutOfDomain):
        qa_mean(powers[1], [np.nan])


def test_batch_matches_single(powers, sampler):
    vs = sampler.draw(INTERVAL, count=50)
    np.testing.assert_array_equal(qa_means(powers[0.5], vs), [qa_mean(powers[0.5], v) for v in vs])
    assert qa_means(powers[1], []).size == 0


@settings(deadline=None, max_examples=100)
@given(p=st.sampled_from(sorted(GENERATORS)), v=vectors)
def test_betweenness_and_symmetry(p, v):
    g = GENERATORS[p]
    m = qa_mean(g, v)
    assert min(v) <= m <= max(v)
    assert qa_mean(g, list(reversed(v))) == m


@settings(deadline=None, max_examples=100)
@given(p=st.sampled_from(sorted(GENERATORS)), c=st.floats(1.0, 10.0), n=st.integers(1, 8))
def test_reflexivity(p, c, n):
    assert qa_mean(GENERATORS[p], [c] * n) == pytest.approx(c, abs=1e-11)


@settings(deadline=None, max_examples=100)
@given(p=st.sampled_from(sorted(GENERATORS)), v=vectors, bump=st.floats(0.0, 1.0))
def test_monotone_in_each_argument(p, v, bump):
    g = GENERATORS[p]
    w = list(v)
    w[0] = w[0] + bump * (10.0 - w[0])
    assert qa_mean(g, w) >= qa_mean(g, v) - 1e-12


@settings(deadline=None, max_examples=50)
@given(p=st.sampled_from(sorted(GENERATORS)), v=vectors, alpha=st.floats(-5.0, 5.0).filter(lambda a: abs(a) > 0.1),
       beta=st.floats(-10.0, 10.0))
def test_affine_invariance(p, v, alpha, beta):
    g = GENERATORS[p]
    assert qa_mean(AffineOf(g, alpha, beta), v) == pytest.approx(qa_mean(g, v), abs=1e-9)


def test_sampler_is_deterministic():
    sampler = VectorSampler(seed=7, count=20)
    first, second = sampler.draw(INTERVAL), sampler.draw(INTERVAL)
    assert all(np.array_equal(a, b) for a, b in zip(first, second))
    assert all(2 <= v.size <= 8 for v in first)
    assert all(v.min() >= 1.009 and v.max() <= 9.991 for v in first)
    with pytest.raises(ValueError):
        VectorSampler(n_min=1)


def test_default_probes():
    probes = default_probes(INTERVAL)
    assert len(probes) == 9 * 9 * 8
    assert all(y != z for _, y, z in probes)
    assert len(default_probes(INTERVAL, n=2, extra=[5.0])) == 3 * 3 * 2


def test_pal91_ratio_distance(powers):
    probes = default_probes(INTERVAL)
    assert pal91_ratio_distance(powers[1], AffineOf(powers[1], 2, 5), probes) == pytest.approx(0.0, abs=1e-12)
    assert pal91_ratio_distance(powers[1], powers[2], probes) > 0.01
    assert pal91_ratio_distance(powers[2], powers[2], probes) == 0.0
    assert pal91_ratio_distance(powers[1], powers[2], [(1.0, 10.0, 5.0)]) > 0.01
    with pytest.raises(DegenerateProbe):
        pal91_ratio_distance(powers[1], powers[2], [(1.0, 2.0, 2.0)])
