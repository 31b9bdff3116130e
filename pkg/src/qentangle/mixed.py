"""Closed-form mixed-state quantities: concurrence, entanglement of formation,
negativities, quantum relative entropy, Uhlmann fidelity and related distances.

All values are in bits where a logarithm is involved.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BadLayout, DimensionMismatch, OutOfRange
from .linalg import SUPPORT_TOL, hermitian_eig, support_threshold, trace_norm
from .states import Cut, DensityOperator, as_density, cut_partial_transpose

_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def _two_qubit(rho) -> DensityOperator:
    rho = as_density(rho)
    if rho.dims != (2, 2):
        raise BadLayout(f"expected a two-qubit (2x2) layout, got {rho.dims}")
    return rho


def spin_flip(rho) -> np.ndarray:
    """(Y x Y) rho* (Y x Y) in the standard basis."""
    rho = _two_qubit(rho)
    return _YY @ rho.matrix.conj() @ _YY


def _sqrt_clamped(m: np.ndarray) -> np.ndarray:
    # eigenvalues at roundoff level would otherwise leak ~1e-8 into the root
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.where(w > 1e-14, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence_eigenvalues(rho) -> np.ndarray:
    """Eigenvalues of R = sqrt(sqrt(rho) rho~ sqrt(rho)), descending.

    They are the singular values of sqrt(rho) sqrt(rho~), and
    sqrt(rho~) = (Y x Y) sqrt(rho)* (Y x Y), so no nested square root is needed.
    """
    rho = _two_qubit(rho)
    s = _sqrt_clamped(rho.matrix)
    s_tilde = _YY @ s.conj() @ _YY
    return np.linalg.svd(s @ s_tilde, compute_uv=False)


def concurrence(rho) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4) of a two-qubit state."""
    lam = concurrence_eigenvalues(rho)
    return float(min(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]), 1.0))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        if -1e-12 <= x < 0.0 or 1.0 < x <= 1.0 + 1e-12:
            x = min(max(x, 0.0), 1.0)
        else:
            raise OutOfRange(f"binary entropy needs 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1 - x) * math.log2(1 - x))


def eof_from_concurrence(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy((1 + math.sqrt(1 - c * c)) / 2)


def eof_two_qubit(rho) -> float:
    """Entanglement of formation of a two-qubit state via its concurrence."""
    return eof_from_concurrence(concurrence(rho))


def _pt_spectrum(rho, cut: Cut) -> tuple[np.ndarray, np.ndarray]:
    pt = cut_partial_transpose(as_density(rho), cut)
    return pt, np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))


def pt_trace_norm(rho, cut: Cut = 0) -> float:
    pt, _ = _pt_spectrum(rho, cut)
    return trace_norm(pt)


def negativity(rho, cut: Cut = 0) -> float:
    """(||rho^T_B||_1 - 1) / 2, checked against |sum of negative PT eigenvalues|."""
    pt, eigs = _pt_spectrum(rho, cut)
    by_norm = (trace_norm(pt) - 1.0) / 2.0
    by_eigs = -float(np.sum(eigs[eigs < 0]))
    if abs(by_norm - by_eigs) > 1e-8:
        raise ArithmeticError(f"negativity formulas disagree: {by_norm!r} vs {by_eigs!r}")
    return max(by_norm, 0.0)


def negativity_from_eigenvalues(rho, cut: Cut = 0) -> float:
    _, eigs = _pt_spectrum(rho, cut)
    return -float(np.sum(eigs[eigs < 0]))


def log_negativity(rho, cut: Cut = 0) -> float:
    return max(math.log2(pt_trace_norm(rho, cut)), 0.0)


def _same_dim(rho, sigma) -> tuple[DensityOperator, DensityOperator]:
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions differ: {rho.dim} vs {sigma.dim}")
    return rho, sigma


def _spectral(rho: DensityOperator):
    eig = hermitian_eig(rho.matrix)
    lam = np.clip(eig.eigenvalues, 0.0, None)
    return lam, eig.eigenvectors, lam > support_threshold(lam)


def relative_entropy(rho, sigma) -> float:
    """S(rho||sigma) = sum_i r_i {log r_i - sum_j log s_j |<r_i|s_j>|^2}.

    Returns ``inf`` when the support of rho is not contained in the support of
    sigma, i.e. some eigenvector of rho with r_i above threshold has more than
    1e-10 of its weight in the kernel of sigma.
    """
    rho, sigma = _same_dim(rho, sigma)
    r, rv, r_on = _spectral(rho)
    s, sv, s_on = _spectral(sigma)
    overlap = np.abs(rv.conj().T @ sv) ** 2
    if np.any(overlap[np.ix_(r_on, ~s_on)].sum(axis=1) > 1e-10):
        return math.inf
    log_s = np.zeros_like(s)
    log_s[s_on] = np.log2(s[s_on])
    total = 0.0
    for i in np.flatnonzero(r_on):
        total += r[i] * (math.log2(r[i]) - float(overlap[i, s_on] @ log_s[s_on]))
    return max(total, 0.0)


def relative_entropy_single_sum(rho, sigma) -> float:
    """sum_i {r_i log r_i - <s_i|rho|s_i> log s_i}; finite-support inputs only."""
    rho, sigma = _same_dim(rho, sigma)
    r, _, r_on = _spectral(rho)
    s, sv, s_on = _spectral(sigma)
    diag = np.einsum("ji,jk,ki->i", sv.conj(), rho.matrix, sv).real
    if np.any(diag[~s_on] > 1e-10):
        return math.inf
    return float(np.sum(r[r_on] * np.log2(r[r_on])) - np.sum(diag[s_on] * np.log2(s[s_on])))


def relative_entropy_commuting(r, s) -> float:
    """sum_i r_i (log r_i - log s_i) for spectra listed in a common eigenbasis."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    on = r > SUPPORT_TOL
    if np.any(s[on] <= SUPPORT_TOL):
        return math.inf
    return float(np.sum(r[on] * (np.log2(r[on]) - np.log2(s[on]))))


def uhlmann_fidelity(rho, sigma) -> float:
    """[tr sqrt(sqrt(sigma) rho sqrt(sigma))]^2, evaluated as ||sqrt(rho) sqrt(sigma)||_1^2."""
    rho, sigma = _same_dim(rho, sigma)
    f = trace_norm(_sqrt_clamped(rho.matrix) @ _sqrt_clamped(sigma.matrix)) ** 2
    return float(min(max(f, 0.0), 1.0))


def bures_distance(rho, sigma) -> float:
    """2 - 2 sqrt(F(rho, sigma))."""
    return max(2.0 - 2.0 * math.sqrt(uhlmann_fidelity(rho, sigma)), 0.0)


def trace_distance(rho, sigma) -> float:
    """||rho - sigma||_1 (no factor 1/2)."""
    rho, sigma = _same_dim(rho, sigma)
    return trace_norm(rho.matrix - sigma.matrix)
