import numpy as np
import pytest

from firewatch.dataset import load_sample_dataset, sample_dataset_path


@pytest.fixture(scope="session")
def sample_path():
    return sample_dataset_path()


@pytest.fixture(scope="session")
def sample():
    return load_sample_dataset()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_instance(rng, n, dim=3):
    """Random small training instance with both classes present."""
    features = rng.uniform(0.0, 1.0, (n, dim))
    while True:
        labels = rng.integers(0, 2, n)
        if 0 < labels.sum() < n:
            break
    return features, labels
