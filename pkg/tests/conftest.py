import numpy as np
import pytest

from hybridwigner.grids import CvGrid, SphereGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_cv():
    return CvGrid((-4, 4), (-4, 4), 41, 41)


@pytest.fixture(scope="session")
def small_sphere():
    return SphereGrid(16, 32)


def random_density(rng, dim_field, dim_atom=1, rank=None):
    from hybridwigner.operators import Operator

    n = dim_field * dim_atom
    rank = rank or n
    m = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = m @ m.conj().T
    return Operator(rho / np.trace(rho), dim_field, dim_atom)


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2
