import math

import numpy as np
import pytest

from qentangle.mixed import bures_distance, relative_entropy, trace_distance
from qentangle.pure import entropy_of_entanglement
from qentangle.separable import (
    NoConvergence,
    OptimizerOptions,
    _ProductMixture,
    bures_measure,
    bures_objective,
    distance_to_separable,
    relative_entropy_objective,
    relative_entropy_of_entanglement,
    trace_distance_to_separable,
    trace_objective,
)
from qentangle.states import (
    density_from_pure,
    is_ppt,
    random_density,
    random_product_mixture,
    random_pure_state,
    standard_state,
    tensor,
)

# Relative entropy of W-reduced to the PPT set (equal to the separable set for
# two qubits), from an independent conic solver run; see test_ree_matches_live_conic_solver.
W_REDUCED_REE = 0.25162965783594876
FAST = OptimizerOptions(restarts=2)


def test_ree_phi_plus():
    res = relative_entropy_of_entanglement(standard_state("phi+"))
    assert abs(res.value - 1) <= 0.01
    assert res.converged
    assert res.measure_name == "relative-entropy-to-separable"


@pytest.mark.parametrize("kind", ["relative-entropy", "bures", "trace"])
def test_separable_example_has_zero_distance(kind):
    res = distance_to_separable(standard_state("sepexample"), distance_kind=kind, options=FAST)
    assert 0 <= res.value <= 1e-4


def test_ree_w_reduced():
    w = standard_state("wreduced")
    res = relative_entropy_of_entanglement(w)
    assert 0 < res.value <= 0.550
    assert res.value == pytest.approx(W_REDUCED_REE, abs=1e-4)
    # the reported value is an exact distance to a genuinely separable witness
    sigma = res.witness.state()
    assert is_ppt(sigma)
    assert relative_entropy(w, sigma) == pytest.approx(res.value, abs=1e-10)


def test_ree_below_random_search(rng):
    """No random product ensemble may beat the optimiser."""
    w = standard_state("wreduced").matrix
    res = relative_entropy_of_entanglement(standard_state("wreduced"), options=FAST)
    n, k = 20000, 4
    a = rng.standard_normal((n, k, 2)) + 1j * rng.standard_normal((n, k, 2))
    b = rng.standard_normal((n, k, 2)) + 1j * rng.standard_normal((n, k, 2))
    a /= np.linalg.norm(a, axis=2, keepdims=True)
    b /= np.linalg.norm(b, axis=2, keepdims=True)
    p = rng.dirichlet(np.ones(k), size=n)
    prod = np.einsum("nki,nkj->nkij", a, b).reshape(n, k, 4)
    sig = np.einsum("nk,nki,nkj->nij", p, prod, prod.conj())
    s, v = np.linalg.eigh(sig)
    r = np.einsum("nia,ij,njb->nab", v.conj(), w, v)
    diag = np.einsum("naa->na", r).real
    r_eig = np.clip(np.linalg.eigvalsh(w), 1e-300, None)
    neg_s = float(np.sum(np.where(r_eig > 1e-12, r_eig * np.log2(r_eig), 0)))
    vals = neg_s - np.sum(diag * np.log2(np.clip(s, 1e-300, None)), axis=1)
    assert res.value <= vals.min() + 1e-9


@pytest.mark.filterwarnings("ignore:Solution may be inaccurate")
def test_ree_matches_live_conic_solver():
    cp = pytest.importorskip("cvxpy")
    w = standard_state("wreduced").matrix.real
    sigma = cp.Variable((4, 4), symmetric=True)
    pt = cp.partial_transpose(sigma, dims=[2, 2], axis=1)
    cons = [sigma >> 0, cp.trace(sigma) == 1, pt >> 0]
    obj = cp.Minimize(cp.quantum_rel_entr(w, sigma, quad_approx=(3, 3)))
    prob = cp.Problem(obj, cons)
    try:
        prob.solve(solver=cp.CLARABEL)
    except (cp.error.SolverError, AttributeError):
        pytest.skip("conic solver unavailable")
    assert prob.value / math.log(2) == pytest.approx(W_REDUCED_REE, abs=1e-4)


def test_ree_of_pure_states_equals_entropy_of_entanglement(rng):
    for _ in range(3):
        psi = random_pure_state((2, 2), rng)
        res = relative_entropy_of_entanglement(psi, options=FAST)
        assert res.value == pytest.approx(entropy_of_entanglement(psi), abs=1e-3)


def test_bures_phi_plus():
    res = bures_measure(standard_state("phi+"), options=FAST)
    assert res.value < 1
    # nearest separable state is the dephased mixture, fidelity 1/2
    assert res.value == pytest.approx(2 - math.sqrt(2), abs=1e-4)


def test_trace_phi_plus():
    res = trace_distance_to_separable(standard_state("phi+"), options=FAST)
    assert res.value == pytest.approx(1, abs=1e-3)


def test_pure_product_state_is_at_zero_distance(rng):
    psi = tensor(random_pure_state((2,), rng), random_pure_state((2,), rng))
    for f in (relative_entropy_of_entanglement, bures_measure):
        assert f(psi, options=FAST).value <= 1e-4


def test_random_separable_mixtures(rng):
    opts = OptimizerOptions(restarts=1)
    for _ in range(20):
        rho = random_product_mixture((2, 2), rng, terms=3)
        assert relative_entropy_of_entanglement(rho, options=opts).value <= 1e-4


def test_witness_reproduces_reported_distance():
    w = standard_state("wreduced")
    for kind, f in [("bures", bures_distance), ("trace", trace_distance)]:
        res = distance_to_separable(w, distance_kind=kind, options=FAST)
        assert f(w, res.witness.state()) == pytest.approx(res.value, abs=1e-10)
        assert np.all(res.witness.weights >= 0)
        assert res.witness.weights.sum() == pytest.approx(1)


def test_deterministic_for_fixed_seed():
    w = standard_state("wreduced")
    a = relative_entropy_of_entanglement(w, options=OptimizerOptions(restarts=2, seed=7))
    b = relative_entropy_of_entanglement(w, options=OptimizerOptions(restarts=2, seed=7))
    assert a.value == b.value
    assert a.seed == 7


def test_other_cut_and_dimensions(rng):
    # Phi+ on qubits 0, 2 with a product qubit in the middle
    phi = density_from_pure(standard_state("phi+"))
    rho = random_density((2,), rng)
    from qentangle.states import DensityOperator

    joint = tensor(phi, rho).matrix.reshape(2, 2, 2, 2, 2, 2).transpose(0, 2, 1, 3, 5, 4)
    joint = DensityOperator.from_matrix(joint.reshape(8, 8), (2, 2, 2))
    opts = OptimizerOptions(restarts=1)
    assert relative_entropy_of_entanglement(joint, [0], opts).value == pytest.approx(1, abs=1e-2)
    assert relative_entropy_of_entanglement(joint, [1], opts).value <= 1e-4


def test_unknown_kind():
    with pytest.raises(ValueError):
        distance_to_separable(standard_state("phi+"), distance_kind="hilbert-schmidt")


def test_non_convergence_is_reported():
    opts = OptimizerOptions(restarts=1, max_iterations=3, patience=1, tol=0.0)
    res = distance_to_separable(standard_state("wreduced"), options=opts)
    assert not res.converged
    with pytest.raises(NoConvergence) as err:
        distance_to_separable(standard_state("wreduced"), options=opts, raise_on_failure=True)
    assert err.value.result.value == res.value


@pytest.mark.parametrize(
    "make",
    [
        lambda m: relative_entropy_objective(m),
        lambda m: bures_objective(m),
        lambda m: trace_objective(m, 1e-2),
    ],
)
def test_objective_gradient_matches_finite_differences(make, rng):
    rho = random_density((2, 2), rng).matrix
    model = _ProductMixture(5, 2, 2)
    x = model.random_start(rng)
    obj = make(rho)
    _, g = model.value_and_grad(x, obj)
    h = 1e-6
    for i in rng.choice(model.size, 12, replace=False):
        e = np.zeros_like(x)
        e[i] = h
        fd = (model.value_and_grad(x + e, obj)[0] - model.value_and_grad(x - e, obj)[0]) / (2 * h)
        assert g[i] == pytest.approx(fd, abs=1e-6)
