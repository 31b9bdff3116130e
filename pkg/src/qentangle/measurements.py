"""Generalised measurements described by operator sets {M_m}."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional, Sequence

import numpy as np

from .errors import CountMismatch, DimensionMismatch, NotUnitary
from .linalg import as_matrix, is_unitary
from .states import DensityOperator, PureState, as_density

COMPLETENESS_TOL = 1e-9
ZERO_PROB = 1e-12


@dataclass(frozen=True)
class MeasurementSet:
    operators: tuple
    labels: tuple = None

    def __post_init__(self):
        ops = tuple(as_matrix(m) for m in self.operators)
        if not ops:
            raise DimensionMismatch("a measurement needs at least one operator")
        if len({m.shape for m in ops}) != 1:
            raise DimensionMismatch("measurement operators have different dimensions")
        labels = tuple(self.labels) if self.labels is not None else tuple(range(1, len(ops) + 1))
        if len(labels) != len(ops):
            raise CountMismatch(f"{len(labels)} labels for {len(ops)} operators")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def completeness_error(self) -> float:
        total = sum(m.conj().T @ m for m in self.operators)
        return float(np.max(np.abs(total - np.eye(self.dim))))


@dataclass(frozen=True)
class MeasurementOutcome:
    label: Hashable
    probability: float
    post_state: Optional[DensityOperator] = field(default=None, repr=False)


def projective(vectors: Sequence, labels: Sequence = None) -> MeasurementSet:
    """Measurement set of rank-one projectors onto the given orthonormal vectors."""
    ops = [np.outer(v, np.conj(v)) for v in np.asarray(vectors, dtype=complex)]
    return MeasurementSet(tuple(ops), labels)


def validate(ms: MeasurementSet, tol: float = COMPLETENESS_TOL) -> bool:
    """Whether sum_m M_m^dagger M_m equals the identity within ``tol`` (max entry)."""
    return ms.completeness_error() <= tol


def measure(rho, ms: MeasurementSet) -> list[MeasurementOutcome]:
    """Outcome probabilities tr(M rho M^dagger) and the normalised post-measurement states.

    Outcomes with probability below 1e-12 carry no post state.
    """
    rho = as_density(rho)
    if rho.dim != ms.dim:
        raise DimensionMismatch(f"state of dimension {rho.dim} vs operators of dimension {ms.dim}")
    out = []
    for label, m in zip(ms.labels, ms.operators):
        unnorm = m @ rho.matrix @ m.conj().T
        p = float(np.trace(unnorm).real)
        p = min(max(p, 0.0), 1.0)
        post = None
        if p >= ZERO_PROB:
            post = DensityOperator.from_matrix(unnorm / p, rho.dims, tol=1e-8)
        out.append(MeasurementOutcome(label, p, post))
    return out


def probabilities(rho, ms: MeasurementSet) -> np.ndarray:
    rho = as_density(rho)
    if rho.dim != ms.dim:
        raise DimensionMismatch(f"state of dimension {rho.dim} vs operators of dimension {ms.dim}")
    return np.array([np.trace(m @ rho.matrix @ m.conj().T).real for m in ms.operators])


def with_conditional_unitaries(ms: MeasurementSet, us: Sequence) -> MeasurementSet:
    """The set {U_m M_m}: apply U_m after outcome m."""
    us = [as_matrix(u) for u in us]
    if len(us) != len(ms):
        raise CountMismatch(f"{len(us)} unitaries for {len(ms)} outcomes")
    for u in us:
        if u.shape[0] != ms.dim:
            raise DimensionMismatch("unitary dimension does not match the measurement")
        if not is_unitary(u):
            raise NotUnitary("conditional operation is not unitary")
    return MeasurementSet(tuple(u @ m for u, m in zip(us, ms.operators)), ms.labels)


def compose(first: MeasurementSet, then: Mapping) -> MeasurementSet:
    """Measure ``first``, then ``then[m]`` on outcome m.

    Outcomes whose label is missing from ``then`` are left as they are, labelled ``(m,)``.
    Composite operators are N_k M_m with labels ``(m, k)``.
    """
    ops, labels = [], []
    for label, m in zip(first.labels, first.operators):
        nxt = then.get(label)
        if nxt is None:
            ops.append(m)
            labels.append((label,))
            continue
        if nxt.dim != first.dim:
            raise DimensionMismatch("follow-up measurement has a different dimension")
        for k_label, n in zip(nxt.labels, nxt.operators):
            ops.append(n @ m)
            labels.append((label, k_label))
    return MeasurementSet(tuple(ops), tuple(labels))


def local_operator(op, position: int, dims: Sequence[int]) -> np.ndarray:
    """Embed ``op`` acting on subsystem ``position`` into the full layout."""
    mats = [np.eye(d) for d in dims]
    mats[position] = as_matrix(op)
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def apply_unitary(rho, u) -> DensityOperator:
    rho = as_density(rho)
    u = as_matrix(u)
    return DensityOperator.from_matrix(u @ rho.matrix @ u.conj().T, rho.dims, tol=1e-8)


def pure_outcome_state(outcome: MeasurementOutcome, dims) -> PureState:
    """Extract the dominant eigenvector of a (nearly) pure post-measurement state."""
    w, v = np.linalg.eigh(outcome.post_state.matrix)
    return PureState.normalized(v[:, -1], dims)
