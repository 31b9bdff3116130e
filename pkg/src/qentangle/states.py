"""State data model: pure states, density operators and operations on their tensor layout.

Subsystems are indexed from 0, with subsystem 0 the leftmost tensor factor and
the most significant digit of the computational-basis index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import BadCut, BadIndex, BadLayout, InvalidState, LayoutMismatch, UnknownName
from .linalg import PSD_TOL, as_matrix

STATE_TOL = 1e-10

Cut = Union[int, Iterable[int]]


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise BadLayout("layout needs at least one subsystem")
    if any(d < 2 for d in dims):
        raise BadLayout(f"every subsystem dimension must be >= 2, got {dims}")
    return dims


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != math.prod(dims):
            raise LayoutMismatch(f"{amps.size} amplitudes do not fit layout {dims}")
        if not np.all(np.isfinite(amps)):
            raise InvalidState("amplitudes must be finite")
        if abs(np.vdot(amps, amps).real - 1.0) > STATE_TOL:
            raise InvalidState("state vector is not normalised")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes, dims) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise InvalidState("zero vector cannot be normalised")
        return cls(tuple(dims), amps / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, PSD, unit-trace matrix together with its subsystem layout."""

    dims: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = _check_dims(self.dims)
        m = as_matrix(self.matrix)
        if m.shape[0] != math.prod(dims):
            raise LayoutMismatch(f"matrix of size {m.shape[0]} does not fit layout {dims}")
        if np.max(np.abs(m - m.conj().T)) > STATE_TOL:
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > STATE_TOL:
            raise InvalidState(f"density matrix has trace {np.trace(m).real!r}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if lo < -PSD_TOL:
            raise InvalidState(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def from_matrix(cls, matrix, dims, tol: float = STATE_TOL) -> "DensityOperator":
        """Build a state from a matrix that may be slightly off (trace, Hermiticity).

        Deviations up to ``tol`` are repaired; anything larger raises.
        """
        m = as_matrix(matrix)
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > tol:
            raise InvalidState(f"density matrix has trace {tr!r}, expected 1")
        m = 0.5 * (m + m.conj().T) / tr
        return cls(tuple(dims), m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Spectrum in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


Ensemble = Sequence[tuple[float, PureState]]


def as_density(state: Union[PureState, DensityOperator]) -> DensityOperator:
    if isinstance(state, PureState):
        return density_from_pure(state)
    if isinstance(state, DensityOperator):
        return state
    raise TypeError(f"expected PureState or DensityOperator, got {type(state).__name__}")


def density_from_pure(psi: PureState) -> DensityOperator:
    v = psi.amplitudes
    return DensityOperator(psi.dims, np.outer(v, v.conj()))


def mix(ensemble: Ensemble) -> DensityOperator:
    """Density operator of an ensemble ``[(p_i, psi_i), ...]``."""
    items = list(ensemble)
    if not items:
        raise InvalidState("empty ensemble")
    probs = np.array([p for p, _ in items], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > STATE_TOL:
        raise InvalidState("ensemble probabilities must be nonnegative and sum to 1")
    dims = items[0][1].dims
    out = np.zeros((items[0][1].dim,) * 2, dtype=complex)
    for p, psi in items:
        if psi.dims != dims:
            raise LayoutMismatch(f"ensemble mixes layouts {dims} and {psi.dims}")
        out += p * np.outer(psi.amplitudes, psi.amplitudes.conj())
    return DensityOperator(dims, out)


def _subsystems(dims: Sequence[int], indices: Iterable[int]) -> tuple[int, ...]:
    if isinstance(indices, (int, np.integer)):
        indices = [int(indices)]
    idx = sorted(set(int(i) for i in indices))
    for i in idx:
        if not 0 <= i < len(dims):
            raise BadIndex(f"subsystem index {i} out of range for layout {tuple(dims)}")
    return tuple(idx)


def normalize_cut(dims: Sequence[int], cut: Cut) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split subsystem indices into (side A, side B); ``cut`` lists side A."""
    try:
        side_a = _subsystems(dims, cut)
    except BadIndex as exc:
        raise BadCut(str(exc)) from None
    side_b = tuple(i for i in range(len(dims)) if i not in side_a)
    if not side_a or not side_b:
        raise BadCut(f"cut {side_a} does not split layout {tuple(dims)} into two non-empty sides")
    return side_a, side_b


def _ptrace_matrix(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    t = m.reshape(tuple(dims) * 2)
    rows = list(range(n))
    cols = [i + n if i in keep else i for i in range(n)]
    out = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(t, rows + cols, out)
    d = math.prod(dims[i] for i in keep)
    return reduced.reshape(d, d)


def partial_trace(rho: Union[DensityOperator, PureState], keep: Cut) -> DensityOperator:
    """Reduced state on the subsystems in ``keep`` (original order preserved)."""
    rho = as_density(rho)
    kept = _subsystems(rho.dims, keep)
    if not kept:
        raise BadIndex("keep must name at least one subsystem")
    m = _ptrace_matrix(rho.matrix, rho.dims, kept)
    return DensityOperator.from_matrix(m, [rho.dims[i] for i in kept], tol=1e-9)


def partial_transpose_matrix(m: np.ndarray, dims: Sequence[int], subsystems: Cut) -> np.ndarray:
    sub = _subsystems(dims, subsystems)
    n = len(dims)
    t = np.asarray(m).reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    for i in sub:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    return t.transpose(axes).reshape(m.shape)


def partial_transpose(rho: Union[DensityOperator, PureState], subsystem: Cut = 1) -> np.ndarray:
    """Transpose, in the computational basis, of the given subsystem(s).

    The default transposes subsystem 1, i.e. system B of a bipartite state.
    The result is a plain matrix since it need not be a state.
    """
    rho = as_density(rho)
    return partial_transpose_matrix(rho.matrix, rho.dims, subsystem)


def cut_partial_transpose(rho: DensityOperator, cut: Cut) -> np.ndarray:
    """Partial transpose of side B for the bipartition whose side A is ``cut``."""
    _, side_b = normalize_cut(rho.dims, cut)
    return partial_transpose_matrix(rho.matrix, rho.dims, side_b)


def min_pt_eigenvalue(rho: Union[DensityOperator, PureState], cut: Cut = 0) -> float:
    rho = as_density(rho)
    pt = cut_partial_transpose(rho, cut)
    return float(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))[0])


def is_ppt(rho: Union[DensityOperator, PureState], cut: Cut = 0, tol: float = PSD_TOL) -> bool:
    """True iff the partial transpose across ``cut`` has no eigenvalue below ``-tol``."""
    return min_pt_eigenvalue(rho, cut) >= -tol


def bipartite_matrix(rho: DensityOperator, cut: Cut) -> tuple[np.ndarray, int, int]:
    """Reorder ``rho`` so side A precedes side B; returns (matrix, d_A, d_B)."""
    side_a, side_b = normalize_cut(rho.dims, cut)
    order = side_a + side_b
    n = len(rho.dims)
    t = rho.matrix.reshape(rho.dims * 2).transpose(list(order) + [i + n for i in order])
    d_a = math.prod(rho.dims[i] for i in side_a)
    d_b = math.prod(rho.dims[i] for i in side_b)
    return t.reshape(d_a * d_b, d_a * d_b), d_a, d_b


def bipartite_amplitudes(psi: PureState, cut: Cut) -> np.ndarray:
    """Amplitudes of ``psi`` as a d_A x d_B coefficient matrix."""
    side_a, side_b = normalize_cut(psi.dims, cut)
    t = psi.amplitudes.reshape(psi.dims).transpose(side_a + side_b)
    d_a = math.prod(psi.dims[i] for i in side_a)
    return t.reshape(d_a, -1)


def tensor(a: Union[DensityOperator, PureState], b: Union[DensityOperator, PureState]):
    """Tensor product; pure inputs give a pure output, otherwise a density operator."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(a.dims + b.dims, np.kron(a.amplitudes, b.amplitudes))
    a, b = as_density(a), as_density(b)
    return DensityOperator(a.dims + b.dims, np.kron(a.matrix, b.matrix))


def fidelity_phi_plus(rho: Union[DensityOperator, PureState]) -> float:
    """Overlap <Phi+|rho|Phi+> of a two-qubit state."""
    rho = as_density(rho)
    if rho.dims != (2, 2):
        raise BadLayout(f"fidelity with Phi+ needs a 2x2 layout, got {rho.dims}")
    v = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    return float(np.vdot(v, rho.matrix @ v).real)


def basis_state(index: Union[int, str], dims: Sequence[int] = None) -> PureState:
    """Computational basis state; ``basis_state("01")`` is |01> on two qubits."""
    if isinstance(index, str):
        dims = tuple(dims) if dims is not None else (2,) * len(index)
        index = int(np.ravel_multi_index(tuple(int(c) for c in index), dims))
    v = np.zeros(math.prod(dims), dtype=complex)
    v[index] = 1
    return PureState(tuple(dims), v)


_BELL = {
    "phi+": ([1, 0, 0, 1], 1),
    "phi-": ([1, 0, 0, -1], 1),
    "psi+": ([0, 1, 1, 0], 1),
    "psi-": ([0, 1, -1, 0], 1),
}


def _sepexample() -> DensityOperator:
    s = math.sqrt(2)
    m = np.array(
        [
            [3 / 24, s / 24 * 1j, 0, s / 12 * 1j],
            [-s / 24 * 1j, 1 / 4, -s / 12 * 1j, 0],
            [0, s / 12 * 1j, 5 / 24, -s / 24 * 1j],
            [-s / 12 * 1j, 0, s / 24 * 1j, 5 / 12],
        ],
        dtype=complex,
    )
    return DensityOperator((2, 2), m)


def standard_state(name: str, *params) -> Union[PureState, DensityOperator]:
    """Named states.

    Pure: ``phi+``, ``phi-``, ``psi+``, ``psi-``, ``ghz`` (n qubits, default 3),
    ``w``, ``phi_d`` (d x d maximally entangled), ``partial`` (cos t|00> + sin t|11>).
    Mixed: ``wreduced`` (W with one qubit traced out), ``maxmixed`` (I/d on d x d),
    ``sepexample`` (the 4x4 separable example used for the PPT test).
    """
    key = name.lower()
    if key in _BELL:
        amps, _ = _BELL[key]
        return PureState.normalized(amps, (2, 2))
    if key == "ghz":
        n = int(params[0]) if params else 3
        if n < 2:
            raise UnknownName("GHZ needs at least two qubits")
        v = np.zeros(2**n, dtype=complex)
        v[0] = v[-1] = 1
        return PureState.normalized(v, (2,) * n)
    if key == "w":
        v = np.zeros(8, dtype=complex)
        v[[4, 2, 1]] = 1
        return PureState.normalized(v, (2, 2, 2))
    if key in ("phi_d", "phid", "max"):
        d = int(params[0]) if params else 2
        v = np.eye(d, dtype=complex).reshape(-1)
        return PureState.normalized(v, (d, d))
    if key == "partial":
        theta = float(params[0])
        return PureState((2, 2), [math.cos(theta), 0, 0, math.sin(theta)])
    if key == "wreduced":
        return partial_trace(standard_state("w"), [0, 1])
    if key == "maxmixed":
        d = int(params[0]) if params else 2
        return DensityOperator((d, d), np.eye(d * d) / (d * d))
    if key == "sepexample":
        return _sepexample()
    raise UnknownName(f"unknown state name {name!r}")


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> PureState:
    d = math.prod(dims)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState.normalized(z, dims)


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int = None) -> DensityOperator:
    """Random state G G^dagger / tr with G a d x rank Ginibre matrix."""
    d = math.prod(dims)
    k = rank or d
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityOperator.from_matrix(m / np.trace(m).real, dims)


def random_product_mixture(
    dims: Sequence[int], rng: np.random.Generator, terms: int = 3
) -> DensityOperator:
    """Random convex mixture of product pure states (separable by construction)."""
    weights = rng.dirichlet(np.ones(terms))
    out = np.zeros((math.prod(dims),) * 2, dtype=complex)
    for w in weights:
        v = np.ones(1, dtype=complex)
        for d in dims:
            v = np.kron(v, random_pure_state((d,), rng).amplitudes)
        out += w * np.outer(v, v.conj())
    return DensityOperator.from_matrix(out, dims)
