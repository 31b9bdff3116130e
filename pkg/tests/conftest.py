import numpy as np
import pytest

from qentangle.linalg import random_unitary
from qentangle.states import DensityOperator, PureState


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def ket(*amps, dims=None):
    amps = np.asarray(amps, dtype=complex)
    dims = dims or (2,) * int(round(np.log2(amps.size)))
    return PureState.normalized(amps, dims)


def dm(matrix, dims=(2, 2)):
    return DensityOperator.from_matrix(np.asarray(matrix, dtype=complex), dims)


def local_unitary_conjugate(rho, rng):
    """rho -> (U_A x U_B) rho (U_A x U_B)^dagger for Haar-random local unitaries."""
    u = np.ones((1, 1))
    for d in rho.dims:
        u = np.kron(u, random_unitary(d, rng))
    return DensityOperator.from_matrix(u @ rho.matrix @ u.conj().T, rho.dims)
