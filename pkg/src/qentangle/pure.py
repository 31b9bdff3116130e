"""Pure-state entanglement: Schmidt decomposition, Schmidt number, entropies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import support_threshold
from .states import Cut, DensityOperator, PureState, as_density, bipartite_amplitudes, normalize_cut

SCHMIDT_TOL = 1e-10


@dataclass(frozen=True)
class SchmidtDecomposition:
    """psi = sum_k coefficients[k] * basis_a[:, k] (x) basis_b[:, k]."""

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray
    cut: tuple

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ik,jk->ij", self.coefficients, self.basis_a, self.basis_b).reshape(-1)


def schmidt_decompose(psi: PureState, cut: Cut = 0) -> SchmidtDecomposition:
    """Schmidt decomposition from the SVD of the coefficient matrix C = U D V^T.

    Coefficients below 1e-10 are dropped. Each side-A vector is rephased so its
    first nonzero entry is real and positive; the side-B vector absorbs the phase.
    """
    side_a, _ = normalize_cut(psi.dims, cut)
    c = bipartite_amplitudes(psi, cut)
    u, s, vh = np.linalg.svd(c, full_matrices=False)
    keep = s > SCHMIDT_TOL
    u, s, vb = u[:, keep], s[keep], vh[keep].T
    for k in range(s.size):
        col = u[:, k]
        first = np.flatnonzero(np.abs(col) > 1e-12)[0]
        phase = col[first] / abs(col[first])
        u[:, k] = col / phase
        vb[:, k] = vb[:, k] * phase
    return SchmidtDecomposition(s, u, vb, side_a)


def schmidt_number(psi: PureState, cut: Cut = 0) -> int:
    return schmidt_decompose(psi, cut).rank


def entropy_from_probabilities(p) -> float:
    """Shannon entropy in bits; entries at or below the support threshold are skipped."""
    p = np.asarray(p, dtype=float)
    p = p[p > support_threshold(p)]
    return float(max(-np.sum(p * np.log2(p)), 0.0))


def von_neumann_entropy(rho) -> float:
    """S(rho) = -sum_i lambda_i log2 lambda_i over the nonzero eigenvalues."""
    return entropy_from_probabilities(as_density(rho).eigenvalues())


def entropy_of_entanglement(psi: PureState, cut: Cut = 0) -> float:
    """Von Neumann entropy of the reduced state, from the squared Schmidt coefficients."""
    if isinstance(psi, DensityOperator):
        raise TypeError("entropy of entanglement is defined for pure states only")
    return entropy_from_probabilities(schmidt_decompose(psi, cut).coefficients ** 2)
