"""Dense complex linear algebra used throughout the package.

Operators are plain square ``numpy`` arrays of dtype ``complex128``.
All logarithms are base 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; column ``k`` of ``eigenvectors`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(a)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*mats) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.

    Ties keep the order returned by LAPACK (a stable sort is used).

    Raises:
        NotHermitian: if ``max|a - a^dagger| > tol``.
    """
    m = as_matrix(a)
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def _psd_eig(a) -> EigenDecomposition:
    eig = hermitian_eig(a)
    if eig.eigenvalues.size and eig.eigenvalues[-1] < -PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {eig.eigenvalues[-1]:.3e} below -{PSD_TOL}")
    return EigenDecomposition(np.clip(eig.eigenvalues, 0.0, None), eig.eigenvectors)


def psd_sqrt(a) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-9, 0)`` are clamped to zero before the root is taken.
    """
    eig = _psd_eig(a)
    return EigenDecomposition(np.sqrt(eig.eigenvalues), eig.eigenvectors).reconstruct()


def trace_norm(a) -> float:
    """Sum of the singular values of ``a``."""
    return float(np.sum(np.linalg.svd(as_matrix(a), compute_uv=False)))


def support_threshold(eigenvalues: np.ndarray) -> float:
    top = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return SUPPORT_TOL * max(top, 1.0) if top > 0 else SUPPORT_TOL


def matrix_log2_on_support(a) -> np.ndarray:
    """Base-2 logarithm of a PSD matrix restricted to its support.

    Eigenvalues below ``1e-12`` (relative to the largest) map to 0 rather than
    ``-inf``, which is what the ``0 log 0 = 0`` convention needs downstream.
    """
    eig = _psd_eig(a)
    lam = eig.eigenvalues
    on = lam > support_threshold(lam)
    logs = np.zeros_like(lam)
    logs[on] = np.log2(lam[on])
    return EigenDecomposition(logs, eig.eigenvectors).reconstruct()


def is_unitary(u, tol: float = 1e-9) -> bool:
    m = as_matrix(u)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
