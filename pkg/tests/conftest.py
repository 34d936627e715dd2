# -*- coding: utf-8 -*-
"""
    Shared fixtures for the qamean tests.
"""
import numpy as np
import pytest

from qamean.generator import Exponential, identity, make_power, piecewise
from qamean.grid import Interval
from qamean.mean import VectorSampler


@pytest.fixture
def interval():
    return Interval(1.0, 10.0)


@pytest.fixture
def unit():
    return Interval(0.0, 1.0)


@pytest.fixture
def sampler():
    return VectorSampler(seed=42, count=300)


@pytest.fixture
def powers(interval):
    return {p: make_power(p, interval) for p in (-2, -1, -0.5, 0, 0.5, 1, 2, 3)}


@pytest.fixture
def exponentials(unit):
    return {p: Exponential(p, unit) for p in (-1, 1, 2)}


@pytest.fixture
def desk():
    """Slope 1 up to 1, slope 1/2 after, on [0.5, 2]."""
    return piecewise(identity(Interval(0.5, 2.0)), [(1.0, 1.0, 0.5)])


@pytest.fixture
def squares():
    from qamean.grid import GridFunction
    square_interval = Interval(-1.0, 1.0)
    return [GridFunction.sample(np.square, square_interval, 257),
            GridFunction.sample(lambda x: -np.square(x), square_interval, 257)]
