import math

import numpy as np
import pytest

from qentangle.errors import CountMismatch, DimensionMismatch, NotUnitary
from qentangle.linalg import random_unitary
from qentangle.measurements import (
    MeasurementSet,
    compose,
    local_operator,
    measure,
    probabilities,
    projective,
    validate,
    with_conditional_unitaries,
)
from qentangle.states import (
    basis_state,
    density_from_pure,
    mix,
    random_density,
    random_pure_state,
    standard_state,
)

from conftest import ket

Z_MEAS = projective(np.eye(2), labels=("0", "1"))
X = np.array([[0, 1], [1, 0]])


def alice_ops(theta):
    m1 = np.diag([math.cos(theta), math.sin(theta)])
    m2 = np.diag([math.sin(theta), math.cos(theta)])
    return MeasurementSet((np.kron(m1, np.eye(2)), np.kron(m2, np.eye(2))))


def random_measurement(dim, outcomes, rng):
    """Random Kraus set from slicing an isometry V (dim*outcomes x dim)."""
    g = rng.standard_normal((dim * outcomes, dim)) + 1j * rng.standard_normal((dim * outcomes, dim))
    q, _ = np.linalg.qr(g)
    return MeasurementSet(tuple(q[k * dim : (k + 1) * dim] for k in range(outcomes)))


def test_validate_examples():
    assert validate(Z_MEAS)
    theta = 0.37
    assert validate(MeasurementSet((np.diag([math.cos(theta), math.sin(theta)]), np.diag([math.sin(theta), math.cos(theta)]))))
    assert not validate(MeasurementSet((np.eye(2) / 2,)))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        MeasurementSet((np.eye(2), np.eye(3)))
    with pytest.raises(DimensionMismatch):
        measure(standard_state("phi+"), Z_MEAS)


def test_measure_plus_in_z():
    outs = measure(ket(1, 1), Z_MEAS)
    assert [o.probability for o in outs] == pytest.approx([0.5, 0.5])
    np.testing.assert_allclose(outs[0].post_state.matrix, np.diag([1, 0]))
    np.testing.assert_allclose(outs[1].post_state.matrix, np.diag([0, 1]))


def test_zero_probability_outcome_has_no_post_state():
    outs = measure(basis_state("0"), Z_MEAS)
    assert outs[1].probability == 0 and outs[1].post_state is None


def test_bell_measurement_outcome_one():
    theta = 0.3
    out = measure(standard_state("phi+"), alice_ops(theta))[0]
    expected = density_from_pure(standard_state("partial", theta)).matrix
    np.testing.assert_allclose(out.post_state.matrix, expected, atol=1e-12)
    assert out.probability == pytest.approx(0.5)


def test_concentration_probability():
    theta = math.pi / 7
    m1 = np.kron(np.diag([math.tan(theta), 1]), np.eye(2))
    m2 = np.kron(np.diag([math.sqrt(1 - math.tan(theta) ** 2), 0]), np.eye(2))
    outs = measure(standard_state("partial", theta), MeasurementSet((m1, m2)))
    assert outs[0].probability == pytest.approx(2 * math.sin(theta) ** 2, abs=1e-12)
    np.testing.assert_allclose(
        outs[0].post_state.matrix, density_from_pure(standard_state("phi+")).matrix, atol=1e-12
    )


def test_conditional_unitaries_bell_transformation():
    theta = 1.1
    ms = with_conditional_unitaries(alice_ops(theta), [np.eye(4), np.kron(X, X)])
    assert validate(ms)
    target = density_from_pure(standard_state("partial", theta)).matrix
    for out in measure(standard_state("phi+"), ms):
        np.testing.assert_allclose(out.post_state.matrix, target, atol=1e-12)


def test_conditional_identities_leave_set_unchanged():
    ms = alice_ops(0.4)
    same = with_conditional_unitaries(ms, [np.eye(4)] * 2)
    for a, b in zip(ms.operators, same.operators):
        np.testing.assert_array_equal(a, b)


def test_conditional_unitaries_errors():
    with pytest.raises(CountMismatch):
        with_conditional_unitaries(Z_MEAS, [np.eye(2)])
    with pytest.raises(NotUnitary):
        with_conditional_unitaries(Z_MEAS, [np.eye(2), 2 * np.eye(2)])


def test_conditional_unitaries_keep_probabilities(rng):
    for _ in range(50):
        ms = random_measurement(3, 3, rng)
        us = [random_unitary(3, rng) for _ in range(3)]
        rho = random_density((3,), rng)
        cond = with_conditional_unitaries(ms, us)
        np.testing.assert_allclose(probabilities(rho, ms), probabilities(rho, cond), atol=1e-12)
        for u, a, b in zip(us, measure(rho, ms), measure(rho, cond)):
            np.testing.assert_allclose(u @ a.post_state.matrix @ u.conj().T, b.post_state.matrix, atol=1e-10)


def test_compose_z_then_z_is_idempotent():
    comp = compose(Z_MEAS, {"0": Z_MEAS, "1": Z_MEAS})
    assert validate(comp)
    assert len(comp) == 4
    probs = dict(zip(comp.labels, probabilities(ket(0.6, 0.8), comp)))
    assert probs[("0", "0")] == pytest.approx(0.36)
    assert probs[("1", "1")] == pytest.approx(0.64)
    assert probs[("0", "1")] == pytest.approx(0) and probs[("1", "0")] == pytest.approx(0)


def test_compose_matches_chained_measurements(rng):
    for _ in range(20):
        first = random_measurement(2, 2, rng)
        then = {label: random_measurement(2, 2, rng) for label in first.labels}
        comp = compose(first, then)
        assert validate(comp)
        rho = random_density((2,), rng)
        chained = {}
        for out in measure(rho, first):
            for inner in measure(out.post_state, then[out.label]):
                chained[(out.label, inner.label)] = out.probability * inner.probability
        for label, p in zip(comp.labels, probabilities(rho, comp)):
            assert p == pytest.approx(chained[label], abs=1e-10)


def test_probabilities_sum_to_one(rng):
    for dim, k in [(2, 2), (2, 5), (4, 3), (6, 2)]:
        ms = random_measurement(dim, k, rng)
        assert validate(ms)
        total = probabilities(random_density((dim,), rng), ms).sum()
        assert total == pytest.approx(1, abs=1e-9)


def test_projective_reproduces_born_rule(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    _, vecs = np.linalg.eigh(g + g.conj().T)
    ms = projective(vecs.T)
    psi = random_pure_state((4,), rng)
    expected = np.abs(vecs.conj().T @ psi.amplitudes) ** 2
    np.testing.assert_allclose(probabilities(psi, ms), expected, atol=1e-12)


def test_probabilities_are_linear_in_the_ensemble(rng):
    ms = random_measurement(4, 3, rng)
    members = [random_pure_state((2, 2), rng) for _ in range(3)]
    ps = rng.dirichlet(np.ones(3))
    mixed = probabilities(mix(list(zip(ps, members))), ms)
    weighted = sum(p * probabilities(m, ms) for p, m in zip(ps, members))
    np.testing.assert_allclose(mixed, weighted, atol=1e-12)


def test_local_operator_placement():
    op = local_operator(X, 1, (2, 2, 2))
    np.testing.assert_array_equal(op, np.kron(np.kron(np.eye(2), X), np.eye(2)))
