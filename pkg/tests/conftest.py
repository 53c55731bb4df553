import numpy as np
import pytest

from macap_cli.channel import random_scene

def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run slow statistical tests')

def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: statistical test with many full solves')

def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)

@pytest.fixture
def rng():
    return np.random.default_rng(1234)

@pytest.fixture
def scene():
    return random_scene(paths=6, wavelength=1.0, region_size=2.0, min_distance=0.5, seed=7)
