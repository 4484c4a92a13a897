import numpy as np
import pytest

from rhodiff import DeltaParams, FrequencyTable
from rhodiff.model import rho_lower_bound
from rhodiff.tableio import load_fixture


@pytest.fixture(scope="session")
def ome():
    return load_fixture("ome")


@pytest.fixture(scope="session")
def orthok():
    return load_fixture("orthok")


def random_interior_params(rng, margin=0.02):
    """A random parameter point with every cell probability above ~margin."""
    while True:
        pi1 = rng.uniform(margin, 1 - margin)
        pi2 = rng.uniform(margin, 1 - margin)
        lo = max(rho_lower_bound(pi1), rho_lower_bound(pi2))
        rho = rng.uniform(lo + margin, 1 - margin)
        params = DeltaParams(delta=pi2 - pi1, pi1=pi1, rho=rho)
        if params.is_interior(margin / 2):
            return params


def random_table(rng, max_count=30, min_group_organs=1):
    """A random frequency table with non-degenerate groups."""
    while True:
        g1 = rng.integers(0, max_count + 1, size=5)
        g2 = rng.integers(0, max_count + 1, size=5)
        t = FrequencyTable.from_counts(tuple(g1), tuple(g2))
        if (t.organ_totals >= min_group_organs).all():
            return t


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
