"""CSV and JSON artifacts.

Floats are written with 17 significant digits so that a grid exported and
read back reproduces the same doubles.
"""
import json
import logging

import numpy as np
import pandas as pd

from .exceptions import InvalidDescriptor
from .generator import GridSampled
from .grid import GridFunction, Interval
from .lattice_smooth import RatioEnvelope
from .settings import GRID_N

_logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def generator_frame(g, n=GRID_N):
    """Columns ``x, value`` and, when available, ``derivative``."""
    x = g.grid.x if isinstance(g, GridSampled) else g.interval.nodes(n)
    frame = pd.DataFrame({'x': x, 'value': g.value(x)})
    if g.has_derivative:
        frame['derivative'] = g.derivative(x)
    return frame


def envelope_frame(result):
    """Per-node table of an EnvelopeResult: ``x, G, u, u_prime`` or ``x, s, u``."""
    u = result.generator
    x = u.grid.x
    if isinstance(result.envelope, RatioEnvelope):
        return pd.DataFrame({'x': x, 'G': result.envelope.G.values, 'u': u.grid.values,
                             'u_prime': u.slopes.values})
    return pd.DataFrame({'x': x, 's': result.envelope.s.values, 'u': u.grid.values})


def write_csv(frame, path):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    _logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_grid_csv(path):
    """GridSampled from a CSV with columns ``x, value[, derivative]`` on uniform nodes."""
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidDescriptor(f"Cannot read grid CSV {path}: {e}") from e
    if not {'x', 'value'} <= set(frame.columns):
        raise InvalidDescriptor(f"{path} needs the columns x and value, got {list(frame.columns)}")
    x = frame['x'].to_numpy(dtype=float)
    if x.size < 2:
        raise InvalidDescriptor(f"{path} holds fewer than two samples")
    interval = Interval(x[0], x[-1])
    if not np.allclose(x, interval.nodes(x.size), rtol=0, atol=1e-9 * interval.width):
        raise InvalidDescriptor(f"{path} is not sampled on uniform nodes")
    slopes = None
    if 'derivative' in frame.columns:
        slopes = GridFunction(interval, frame['derivative'].to_numpy(dtype=float))
    return GridSampled(GridFunction(interval, frame['value'].to_numpy(dtype=float)), slopes=slopes)


def _default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def dumps_json(data):
    """Deterministic JSON: sorted keys, two-space indent."""
    return json.dumps(data, sort_keys=True, indent=2, default=_default)


def write_json(data, path):
    with open(path, 'w') as f:
        f.write(dumps_json(data))
        f.write('\n')
    _logger.info(f"Wrote {path}")
    return path
