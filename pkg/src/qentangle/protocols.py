"""LOCC protocols on qubit pairs: Bell-state transformation, pure-state
concentration, and the two-pair recurrence distillation with its yield recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import OutOfRange, ThetaOutOfRange
from .measurements import MeasurementSet, apply_unitary, local_operator, measure, with_conditional_unitaries
from .states import DensityOperator, PureState, density_from_pure, partial_trace, standard_state, tensor

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def _phi_plus() -> DensityOperator:
    return density_from_pure(standard_state("phi+"))


def _ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def _proj(bits: str) -> np.ndarray:
    v = _ket(bits)
    return np.outer(v, v)


def bell_transformation_measurement(theta: float) -> MeasurementSet:
    """Alice's {M1, M2} on a qubit pair, with X (x) X applied after outcome 2."""
    m1 = np.diag([math.cos(theta), math.sin(theta)])
    m2 = np.diag([math.sin(theta), math.cos(theta)])
    ms = MeasurementSet((np.kron(m1, I2), np.kron(m2, I2)))
    return with_conditional_unitaries(ms, [np.eye(4), np.kron(X, X)])


def transform_bell(theta: float) -> DensityOperator:
    """Turn Phi+ into cos(theta)|00> + sin(theta)|11> by LOCC.

    The output is the probability-weighted average over both measurement
    branches, which coincide after the conditional bit flips.
    """
    if not 0.0 <= theta <= math.pi:
        raise ThetaOutOfRange(f"theta must lie in [0, pi], got {theta}")
    outcomes = measure(_phi_plus(), bell_transformation_measurement(theta))
    total = sum(o.probability * o.post_state.matrix for o in outcomes if o.post_state is not None)
    return DensityOperator.from_matrix(total, (2, 2), tol=1e-9)


def concentration_measurement(theta: float) -> MeasurementSet:
    m1 = np.diag([math.tan(theta), 1.0])
    m2 = np.diag([math.sqrt(1.0 - math.tan(theta) ** 2), 0.0])
    return MeasurementSet((np.kron(m1, I2), np.kron(m2, I2)), ("success", "failure"))


@dataclass(frozen=True)
class ConcentrationResult:
    p_success: float
    success_state: DensityOperator
    failure_state: Optional[DensityOperator]


def concentrate(theta: float) -> ConcentrationResult:
    """Convert cos(theta)|00> + sin(theta)|11> into Phi+ with probability 2 sin^2(theta)."""
    if not 0.0 < theta < math.pi / 4:
        raise ThetaOutOfRange(f"concentration needs 0 < theta < pi/4, got {theta}")
    psi = standard_state("partial", theta)
    success, failure = measure(psi, concentration_measurement(theta))
    return ConcentrationResult(success.probability, success.post_state, failure.post_state)


@dataclass(frozen=True)
class DistillationStep:
    """One round on two copies of (1-p)|01><01| + p|Phi+><Phi+|.

    ``success_state`` is the four-qubit state (order A1 B1 A2 B2) after the
    target pair is found in |11>; ``retry_state`` is the control pair after
    outcome 00. Either is None when its outcome has zero probability.
    """

    p_in: float
    p_success: float
    p_00: float
    p_next: float
    success_state: Optional[DensityOperator]
    retry_state: Optional[DensityOperator]
    p_other: float = 0.0


def werner_like_state(p: float) -> DensityOperator:
    """(1-p)|01><01| + p|Phi+><Phi+|."""
    m = (1 - p) * _proj("01") + p * _phi_plus().matrix
    return DensityOperator.from_matrix(m, (2, 2))


def _check_p(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"mixing parameter must lie in [0, 1], got {p}")
    return float(p)


def next_ratio(p: float) -> float:
    """p' = p^2 / (3p^2 - 4p + 2); the denominator is at least 2/3."""
    return p * p / (3 * p * p - 4 * p + 2)


def prob_00(p: float) -> float:
    return 1.5 * p * p - 2 * p + 1


def distill_step(p: float) -> DistillationStep:
    """Closed-form outcome of one distillation round."""
    p = _check_p(p)
    p_success = p * p / 2
    p_00 = prob_00(p)
    p_next = next_ratio(p)
    success = None
    if p_success > 0:
        m = np.kron(_phi_plus().matrix, _proj("11"))
        success = DensityOperator((2, 2, 2, 2), m)
    retry = werner_like_state(p_next)
    return DistillationStep(p, p_success, p_00, p_next, success, retry, 1 - p_success - p_00)


def bilateral_cnot() -> np.ndarray:
    """U_CNOT(1,3) U_CNOT(2,4) on qubits ordered A1 B1 A2 B2."""
    dims = (2, 2, 2, 2)
    cnot_13 = local_operator(P0, 0, dims) + local_operator(P1, 0, dims) @ local_operator(X, 2, dims)
    cnot_24 = local_operator(P0, 1, dims) + local_operator(P1, 1, dims) @ local_operator(X, 3, dims)
    return cnot_13 @ cnot_24


def target_measurement() -> MeasurementSet:
    """{M00, M01, M10, M11}: Z on both qubits of the target pair."""
    ops = tuple(np.kron(np.kron(I2, I2), _proj(bits)) for bits in ("00", "01", "10", "11"))
    return MeasurementSet(ops, ("00", "01", "10", "11"))


def simulate_distill_step(p: float) -> DistillationStep:
    """Brute-force 16x16 density-matrix run of one distillation round."""
    p = _check_p(p)
    rho = werner_like_state(p)
    pair = apply_unitary(tensor(rho, rho), bilateral_cnot())
    outcomes = {o.label: o for o in measure(pair, target_measurement())}
    success = outcomes["11"]
    retry = outcomes["00"]
    retry_state = None
    p_next = math.nan
    if retry.post_state is not None:
        retry_state = partial_trace(retry.post_state, [0, 1])
        # control pair stays of the input form: read the mixing ratio off <Phi+|.|Phi+>
        p_next = float(np.vdot(_phi_ket(), retry_state.matrix @ _phi_ket()).real)
    p_other = outcomes["01"].probability + outcomes["10"].probability
    return DistillationStep(
        p, success.probability, retry.probability, p_next, success.post_state, retry_state, p_other
    )


def _phi_ket() -> np.ndarray:
    return np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def control_pair_fidelity(step: DistillationStep) -> float:
    """<Phi+| . |Phi+> of the control pair in the success branch."""
    if step.success_state is None:
        return math.nan
    control = partial_trace(step.success_state, [0, 1])
    return float(np.vdot(_phi_ket(), control.matrix @ _phi_ket()).real)


@dataclass(frozen=True)
class YieldCurve:
    """Yields after k = 1..len(yields) rounds and the converged total."""

    p: float
    yields: tuple
    converged: float
    levels: int


def yield_after(p: float, k: int) -> float:
    """Y_1 = p^2/4, Y_k(p) = p^2/4 + (p_00(p)/2) Y_{k-1}(p')."""
    p = _check_p(p)
    if k < 1:
        raise OutOfRange("iteration count must be >= 1")
    # unroll the recursion from the innermost level outwards
    ps = [p]
    for _ in range(k - 1):
        ps.append(next_ratio(ps[-1]))
    y = ps[-1] ** 2 / 4
    for q in reversed(ps[:-1]):
        y = q * q / 4 + prob_00(q) / 2 * y
    return y


def total_yield(p: float, iterations: int = 3, tol: float = 1e-9, max_levels: int = 200) -> YieldCurve:
    """Yield per input pair for 1..iterations rounds plus the iterated limit.

    The limit is declared once the relative change between successive depths
    drops below ``tol`` (or the yield is below 1e-15), capped at ``max_levels``.
    """
    p = _check_p(p)
    if iterations < 1:
        raise OutOfRange("iterations must be >= 1")
    yields = tuple(yield_after(p, k) for k in range(1, iterations + 1))
    prev = yield_after(p, 1)
    level = 1
    while level < max_levels:
        level += 1
        cur = yield_after(p, level)
        if cur < 1e-15 or abs(cur - prev) <= tol * abs(cur):
            prev = cur
            break
        prev = cur
    return YieldCurve(p, yields, prev, level)
