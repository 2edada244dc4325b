import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from likefarm.features import extract_features  # noqa: E402
from likefarm.synthgen import default_paper_calibration, generate  # noqa: E402


@pytest.fixture(scope="session")
def small_config():
    return default_paper_calibration(scale=0.08, seed=11, n_pages=1500)


@pytest.fixture(scope="session")
def small_dataset(small_config):
    return generate(small_config)


@pytest.fixture(scope="session")
def small_vectors(small_dataset):
    return extract_features(small_dataset)
