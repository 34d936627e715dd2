import logging
import os
from pathlib import Path
from typing import Tuple

import hiyapyco
from pydantic import BaseModel, BaseSettings, PositiveFloat, validator

LOGGER = logging.getLogger(__name__)

GRID_N = 4097
SEED = 42
TOL_INV = 1e-12
TOL_EQ = 1e-9
TOL_CMP = 1e-10
EPS_MONO = 1e-9
REFINE_TOL = 1e-10
REFINE_DEPTH = 20
# normalized sup-norm for equivalence of grid generators
TOL_ENVELOPE = 1e-5
# mean comparisons involving grid generators, relative to the interval width
TOL_GRID = 1e-6
CERT_SLACK = 1e-7

DEFAULT_CONFIG_FILE = os.path.join(Path(__file__).resolve().parent, 'config_default.yaml')

config = dict()


def load_config(config_file=None):
    """Merge the packaged defaults with an optional user file into ``config``

    Args:
      config_file (str): path of a YAML file overriding the defaults

    Returns:
      dict: the shared ``config`` dict
    """
    files = [DEFAULT_CONFIG_FILE]
    if config_file:
        files.append(config_file)
    config.clear()
    config.update(hiyapyco.load(*files, method=hiyapyco.METHOD_MERGE))
    LOGGER.debug(f"Loaded configuration from {files}")
    return config


class Tolerances(BaseModel):
    tol_inv: PositiveFloat = TOL_INV
    tol_eq: PositiveFloat = TOL_EQ
    tol_cmp: PositiveFloat = TOL_CMP
    eps_mono: PositiveFloat = EPS_MONO
    refine_tol: PositiveFloat = REFINE_TOL
    tol_envelope: PositiveFloat = TOL_ENVELOPE
    tol_grid: PositiveFloat = TOL_GRID
    cert_slack: PositiveFloat = CERT_SLACK


class RunConfig(BaseSettings):
    """Settings of one CLI run.

    Values come from the YAML ``run`` section and command line flags;
    ``QAM_*`` environment variables take precedence over both.
    """

    interval: Tuple[float, float] = (1.0, 10.0)
    grid_n: int = GRID_N
    seed: int = SEED
    vectors: int = 1000
    refine_depth: int = REFINE_DEPTH
    tolerances: Tolerances = Tolerances()
    output_path: str = '.'

    class Config:
        env_prefix = 'QAM_'

        @classmethod
        def customise_sources(cls, init_settings, env_settings, file_secret_settings):
            return env_settings, init_settings, file_secret_settings

    @validator('interval')
    def check_interval(cls, value):
        lo, hi = value
        if not lo < hi:
            raise ValueError(f"interval needs lo < hi, got {value}")
        return value

    @validator('grid_n')
    def check_grid_n(cls, value):
        if value < 33 or (value - 1) & (value - 2):
            raise ValueError(f"grid_n must be 2**k + 1 and at least 33, got {value}")
        return value

    @validator('vectors', 'refine_depth')
    def check_positive(cls, value):
        if value < 1:
            raise ValueError("must be positive")
        return value

    def working_interval(self):
        from .grid import Interval
        return Interval(*self.interval)


def get_run_config(**overrides):
    """Build the RunConfig from ``config['run']`` and non-None overrides."""
    values = dict(config.get('run') or {})
    values.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig(**values)
