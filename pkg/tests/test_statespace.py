import numpy as np
import pytest
from hypothesis import given, strategies as st

from lrfermi.errors import DomainError
from lrfermi.fock import LatticeBox, LocalPolynomial, annihilator, instantiate, operator_norm, random_polynomial
from lrfermi.interactions import hopping_interaction, local_hamiltonian
from lrfermi.models import build_bcs, build_number_squared
from lrfermi.statespace import (
    DensityState,
    StateFunction,
    classical_energy,
    classical_energy_derivative,
    energy_density_scan,
    expect,
    gateaux_derivative,
    poisson_bracket,
    product_state,
    pure_state,
    random_density,
    trace_density,
    vacuum_density,
)


def test_trace_and_vacuum():
    box = LatticeBox.chain(2)
    n0 = instantiate(LocalPolynomial.number((0,)), box)
    assert expect(trace_density(box), n0) == pytest.approx(0.5)
    assert expect(vacuum_density(box), n0) == pytest.approx(0.0)


def test_invalid_states_rejected():
    box = LatticeBox.chain(1)
    with pytest.raises(DomainError):
        DensityState(box, np.diag([0.7, 0.7]))
    with pytest.raises(DomainError):
        DensityState(box, np.diag([1.5, -0.5]))
    with pytest.raises(DomainError):
        product_state(box, [np.array([[0.5, 0.5], [0.5, 0.5]])])


def test_product_factorization():
    rng = np.random.default_rng(0)
    box = LatticeBox.chain(4)
    f = [np.diag(rng.dirichlet([1, 1])) for _ in range(2)]
    rho = product_state(box, f, period=2)
    A1 = instantiate(random_polynomial(rng, box.sites[:2], even=True), box)
    A2 = instantiate(random_polynomial(rng, box.sites[2:], even=True), box)
    assert abs(expect(rho, A1 @ A2) - expect(rho, A1) * expect(rho, A2)) < 1e-12


def test_product_expect_poly_matches_dense():
    box = LatticeBox.chain(5)
    cell = np.zeros((4, 4))
    cell[1:3, 1:3] = [[0.5, 0.5], [0.5, 0.5]]
    rho = product_state(box, [cell])
    poly = LocalPolynomial.hopping((0,), (1,)) + LocalPolynomial.number((1,))
    dense = DensityState(box, rho.matrix)
    assert rho.expect_poly(poly) == pytest.approx(expect(dense, instantiate(poly, box)), abs=1e-12)


def test_energy_density_gap_halves():
    psi = np.zeros(4)
    psi[1] = psi[2] = 1 / np.sqrt(2)
    cell = np.outer(psi, psi)
    scan = energy_density_scan(lambda b: product_state(b, [cell]), hopping_interaction(), 2,
                               [LatticeBox.cube(1, L) for L in (2, 4, 8)])
    gaps = scan.gaps
    for a, b in zip(gaps, gaps[1:]):
        assert a / b == pytest.approx(2.0, rel=0.25)


def test_gateaux_of_affine_function():
    rng = np.random.default_rng(4)
    box = LatticeBox.chain(2)
    A = instantiate(random_polynomial(rng, box.sites, even=True), box)
    rho = random_density(box, rng)
    D = gateaux_derivative(StateFunction.affine(A), rho)
    assert operator_norm(D - (A - expect(rho, A))) < 1e-12


def test_bracket_example_value():
    box = LatticeBox.chain(1)
    a = annihilator(box, (0,))
    n = a.dag @ a
    B = 1j * (a.dag - a)
    rho = pure_state(box, np.array([1.0, 1.0]) / np.sqrt(2))
    val = poisson_bracket(StateFunction.affine(n), StateFunction.affine(B), rho)
    assert val == pytest.approx(-1.0, abs=1e-12)


def test_number_squared_classical_energy_differs_from_quantum():
    box = LatticeBox.chain(2)
    m = build_number_squared()
    rho = trace_density(box)
    assert classical_energy(m, box)(rho) == pytest.approx(0.25, abs=1e-12)
    assert expect(rho, local_hamiltonian(m, box)) == pytest.approx(0.375, abs=1e-12)


seeds = st.integers(0, 2 ** 31)


def _hermitian(rng, box):
    A = instantiate(random_polynomial(rng, box.sites, even=False), box)
    return A + A.dag


@given(seeds)
def test_bracket_of_affine_functions(seed):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(2)
    A, B = _hermitian(rng, box), _hermitian(rng, box)
    rho = random_density(box, rng)
    val = poisson_bracket(StateFunction.affine(A), StateFunction.affine(B), rho)
    assert val == pytest.approx(expect(rho, 1j * A.commutator(B)), abs=1e-11)


@given(seeds)
def test_energy_derivative_matches_generic_path(seed):
    rng = np.random.default_rng(seed)
    m = build_bcs({1: -0.5, -1: -0.5}, float(rng.normal()), float(rng.uniform(0, 2)))
    box = LatticeBox.chain(2, ("up", "down"))
    rho = random_density(box, rng)
    a = classical_energy_derivative(m, box, rho).matrix
    b = gateaux_derivative(classical_energy(m, box), rho).matrix
    assert np.max(np.abs(a - b)) < 1e-12


@given(seeds)
def test_random_density_is_a_state(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(LatticeBox.chain(3), rng)
    assert rho.min_eigenvalue() > -1e-12
    assert np.trace(rho.matrix) == pytest.approx(1.0)
    assert rho.even
