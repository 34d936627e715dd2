"""Quasi-arithmetic means on finite argument vectors."""
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateProbe, InputError, OutOfDomain
from .grid import check_same_interval

_logger = logging.getLogger(__name__)

# |f(y) - f(z)| below this fraction of the range of f makes a probe degenerate
PROBE_GUARD = 1e-14


def check_vector(v, interval):
    """Validate an argument vector: nonempty, finite, inside ``interval``."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise OutOfDomain("Argument vectors must be nonempty")
    if not np.all(np.isfinite(v)) or not interval.contains(v):
        raise OutOfDomain(f"Arguments {v.tolist()} outside [{interval.lo}, {interval.hi}]")
    return np.clip(v, interval.lo, interval.hi)


def qa_mean(g, v):
    """``g^{-1}`` of the average of ``g(v_i)``.

    The average is a correctly rounded sum, so the result does not depend on
    the order of ``v``; it is clamped into ``[min v, max v]``.
    """
    v = check_vector(v, g.interval)
    y = math.fsum(g.value(v)) / v.size
    return float(np.clip(g.inverse(y), v.min(), v.max()))


def qa_means(g, vectors):
    """qa_mean over many vectors with a single vectorised inversion."""
    vectors = [check_vector(v, g.interval) for v in vectors]
    if not vectors:
        return np.zeros(0)
    averages = np.array([math.fsum(g.value(v)) / v.size for v in vectors])
    lows = np.array([v.min() for v in vectors])
    highs = np.array([v.max() for v in vectors])
    return np.clip(g.inverse(averages), lows, highs)


@dataclass(frozen=True)
class VectorSampler:
    """Deterministic source of argument vectors.

    Entries are uniform on ``[lo + h, hi - h]`` with ``h = (hi - lo) / 1000``
    and lengths uniform in ``n_min..n_max``.
    """

    seed: int = 42
    count: int = 1000
    n_min: int = 2
    n_max: int = 8

    def __post_init__(self):
        if not 2 <= self.n_min <= self.n_max:
            raise InputError(f"Need 2 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        if self.count < 1:
            raise InputError("count must be positive")

    def rng(self):
        return np.random.default_rng(self.seed)

    def draw(self, interval, count=None):
        rng = self.rng()
        margin = interval.width / 1000
        lengths = rng.integers(self.n_min, self.n_max + 1, size=count or self.count)
        return [rng.uniform(interval.lo + margin, interval.hi - margin, size=n) for n in lengths]


def default_probes(interval, n=9, extra=()):
    """Probe triples ``(x, y, z)``, ``y != z``, over ``n`` uniform nodes plus ``extra`` points."""
    points = np.unique(np.concatenate([interval.nodes(n), np.asarray(extra, dtype=float)]))
    return [(x, y, z) for x, y, z in itertools.product(points, repeat=3) if y != z]


def _ratios(g, probes):
    x, y, z = (g.value(np.array(column)) for column in zip(*probes))
    denominator = y - z
    low, high = g.endpoint_values
    if np.any(np.abs(denominator) < PROBE_GUARD * abs(high - low)):
        raise DegenerateProbe(f"f(y) and f(z) coincide numerically for {g.describe()}")
    return (x - z) / denominator


def pal91_ratio_distance(f, g, probes):
    """Largest discrepancy of ``(f(x)-f(z))/(f(y)-f(z))`` against the same ratio for ``g``.

    Zero exactly when the generators are affinely related on the probes.
    """
    check_same_interval(f, g)
    probes = list(probes)
    if not probes:
        return 0.0
    if any(y == z for _, y, z in probes):
        raise DegenerateProbe("Probe triples need y != z")
    return float(np.max(np.abs(_ratios(f, probes) - _ratios(g, probes))))
