import numpy as np
import pytest

from bourinlab.sampling import random_psd_array


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def psd_pair(rng, n, law="uniform"):
    return random_psd_array(n, law, rng), random_psd_array(n, law, rng)
