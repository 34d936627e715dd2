# -*- coding: utf-8 -*-

import numpy as np
import pytest

from qamean.exceptions import InputError, IntervalMismatch, InvalidInterval, OutOfDomain
from qamean.grid import GridFunction, Interval, check_same_interval, cumulative_integral

__author__ = "Moshe Malawach"
__copyright__ = "Moshe Malawach"
__license__ = "mit"


@pytest.mark.parametrize("lo, hi", [(2.0, 1.0), (1.0, 1.0), (0.0, np.inf), ("a", 1.0), (None, 1.0)])
def test_interval_rejects_bad_bounds(lo, hi):
    with pytest.raises(InvalidInterval):
        Interval(lo, hi)


def test_interval_clip(interval):
    assert interval.clip(10.0 + 1e-13) == 10.0
    assert interval.clip(3.0) == 3.0
    with pytest.raises(OutOfDomain):
        interval.clip(11.0)
    assert interval.is_interior(5.0)
    assert not interval.is_interior(1.0)
    assert interval.midpoint == 5.5


def test_check_same_interval(interval, unit):
    f = GridFunction.sample(np.exp, interval, 5)
    g = GridFunction.sample(np.exp, unit, 5)
    assert check_same_interval(f, f) == interval
    with pytest.raises(IntervalMismatch):
        check_same_interval(f, g)


def test_grid_function_validation(unit):
    with pytest.raises(InputError):
        GridFunction(unit, [1.0])
    with pytest.raises(InputError):
        GridFunction(unit, [0.0, np.nan, 1.0])
    f = GridFunction(unit, [0.0, 1.0, 4.0])
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_interpolation_and_exact_evaluator(unit):
    assert GridFunction(unit, [0.0, 1.0, 4.0])(0.25) == pytest.approx(0.5)
    assert GridFunction.sample(np.square, unit, 3)(0.25) == pytest.approx(0.0625)
    assert GridFunction.sample(np.square, unit, 3, keep_exact=False)(0.25) == pytest.approx(0.125)
    negated = -GridFunction.sample(np.square, unit, 3)
    assert negated(0.25) == pytest.approx(-0.0625)
    assert list(negated.values) == [0.0, -0.25, -1.0]


def test_cumulative_integral(unit):
    constant = GridFunction(unit, np.full(5, 2.0))
    primitive = constant.cumulative_integral(0.5)
    np.testing.assert_allclose(primitive.values, 2.0 * (unit.nodes(5) - 0.5), atol=1e-15)
    x = unit.nodes(4097)
    assert cumulative_integral(x ** 2, x, 0.0)[-1] == pytest.approx(1.0 / 3.0, abs=1e-7)


def test_sup_distance(unit):
    f = GridFunction.sample(np.exp, unit, 9)
    assert f.sup_distance(f - 1.0) == pytest.approx(1.0)
    assert f.sup_distance(f) == 0.0
    with pytest.raises(IntervalMismatch):
        f.sup_distance(GridFunction.sample(np.exp, unit, 17))
