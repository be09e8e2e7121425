import numpy as np
import pytest

from wehrlkit import (DensityMatrix, FockVector, PhasePoint, build_profile,
                      coherent_fock_vector, random_density_matrix)


@pytest.fixture(scope="session")
def vacuum64():
    return coherent_fock_vector(PhasePoint(0.0, 0.0), 64)


@pytest.fixture(scope="session")
def coherent_offset64():
    return coherent_fock_vector(PhasePoint(0.7, -0.3), 64)


@pytest.fixture(scope="session")
def e1():
    return FockVector([0, 1, 0, 0, 0, 0, 0, 0])


@pytest.fixture(scope="session")
def mixed_half():
    m = np.zeros((8, 8), dtype=complex)
    m[0, 0] = m[1, 1] = 0.5
    return DensityMatrix(m)


@pytest.fixture(scope="session")
def ginibre8():
    return random_density_matrix(8, 3, 11)


@pytest.fixture(scope="session")
def profile_coherent(vacuum64):
    return build_profile(vacuum64.projector(), K=400)


@pytest.fixture(scope="session")
def profile_e1(e1):
    return build_profile(e1.projector(), K=400)


@pytest.fixture(scope="session")
def profile_ginibre(ginibre8):
    return build_profile(ginibre8, K=400)
