import numpy as np
import pytest

from climattr import bundled_config_path
from climattr.config import build_dataset, load_config


@pytest.fixture(scope="session")
def bundled_config():
    return load_config(bundled_config_path())


@pytest.fixture(scope="session")
def bundled_dataset(bundled_config):
    return build_dataset(bundled_config)


def make_series(name, start, values, unit="degC"):
    from climattr import TimeSeries

    years = np.arange(start, start + len(values))
    return TimeSeries(name, unit, years, np.asarray(values, dtype=float))
