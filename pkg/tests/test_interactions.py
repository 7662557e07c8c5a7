import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lrfermi.errors import DomainError
from lrfermi.fock import LatticeBox, LocalPolynomial, instantiate, operator_norm
from lrfermi.interactions import (
    DecayFunction,
    Interaction,
    LongRangeModel,
    convolution_constant,
    decay_norm_one,
    energy_per_site,
    hopping_interaction,
    lattice_norm_one,
    local_energy,
    local_hamiltonian,
    model_norm,
    number_interaction,
    random_interaction,
    w_norm,
)
from lrfermi.models import SPINFUL, build_bcs, build_number_squared

F = DecayFunction()


def _nonzero(rng, **kw):
    while True:
        phi = random_interaction(rng, **kw)
        if not phi.is_zero():
            return phi


def test_decay_function_values():
    assert F((0,), (0,)) == 1.0
    assert F((0,), (1,)) == pytest.approx(0.25)
    F2 = DecayFunction(dimension=2)
    assert F2((0, 0), (3, 4)) == pytest.approx(6.0 ** -3)
    with pytest.raises(DomainError):
        DecayFunction(epsilon=0)
    with pytest.raises(DomainError):
        DecayFunction.from_config("polynomial", varsigma=1.0)


def test_norm_one_single_site():
    assert decay_norm_one(F, LatticeBox.chain(1)) == 1.0


def test_norm_one_on_box():
    assert decay_norm_one(F, LatticeBox.cube(1, 2)) == pytest.approx(31 / 18, abs=1e-14)


def test_norm_one_on_lattice():
    assert decay_norm_one(F, 10 ** 6) == pytest.approx(math.pi ** 2 / 3 - 1, abs=1e-5)
    assert lattice_norm_one(F) == pytest.approx(math.pi ** 2 / 3 - 1, abs=1e-9)
    assert lattice_norm_one(F) >= math.pi ** 2 / 3 - 1


def test_convolution_constant_three_sites():
    assert convolution_constant(F, LatticeBox.cube(1, 1)) == pytest.approx(41 / 16, abs=1e-14)


def test_w_norm_oracles():
    assert w_norm(number_interaction(), F) == pytest.approx(1.0)
    assert w_norm(hopping_interaction(), F) == pytest.approx(4.0)
    assert w_norm(Interaction(), F) == 0.0


def test_hopping_single_particle_block():
    box = LatticeBox.chain(3)
    H = local_energy(hopping_interaction(), box).matrix
    # one-particle states are the basis vectors with a single set bit
    idx = [1 << (box.n_modes - 1 - j) for j in range(3)]
    block = H[np.ix_(idx, idx)]
    np.testing.assert_allclose(block, [[0, 1, 0], [1, 0, 1], [0, 1, 0]], atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(block), [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-12)


def test_term_that_does_not_fit_raises():
    long = Interaction([(((0,), (3,)), LocalPolynomial.hopping((0,), (3,)))])
    with pytest.raises(DomainError):
        local_energy(long, LatticeBox.chain(3))


def test_odd_term_rejected():
    with pytest.raises(DomainError):
        Interaction([(((0,),), LocalPolynomial.annihilator((0,)))])


def test_number_squared_hamiltonian():
    box = LatticeBox.chain(3)
    N = local_energy(number_interaction(), box).matrix
    H = local_hamiltonian(build_number_squared(), box).matrix
    np.testing.assert_allclose(H, N @ N / 6, atol=1e-12)


def _bcs_literal(box, h, mu, gamma):
    """Literal reduced BCS Hamiltonian built from creation and annihilation operators."""
    up, down = SPINFUL
    op = lambda x, s: instantiate(LocalPolynomial.annihilator(x, s), box).matrix
    dim = box.fock_dim
    H = np.zeros((dim, dim), complex)
    for x in box.sites:
        for y in box.sites:
            for s in SPINFUL:
                v = h.get(x[0] - y[0], 0.0) - (mu if x == y else 0.0)
                if v:
                    H += v * op(x, s).conj().T @ op(y, s)
            pair_x = op(x, down) @ op(x, up)
            pair_y = op(y, down) @ op(y, up)
            H -= gamma / box.n_sites * pair_x.conj().T @ pair_y
    return H


def test_bcs_single_site_pair_term():
    box = LatticeBox.chain(1, SPINFUL)
    H = local_hamiltonian(build_bcs({}, 0.0, 1.0), box).matrix
    up, down = SPINFUL
    a_up = instantiate(LocalPolynomial.annihilator((0,), up), box).matrix
    a_dn = instantiate(LocalPolynomial.annihilator((0,), down), box).matrix
    expected = -a_up.conj().T @ a_dn.conj().T @ a_dn @ a_up
    np.testing.assert_allclose(H, expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_bcs_matches_literal(n):
    h = {1: -0.7 + 0.2j, -1: -0.7 - 0.2j}
    box = LatticeBox.chain(n, SPINFUL)
    if n == 1:
        h = {}
    H = local_hamiltonian(build_bcs(h, 0.3, 1.2), box).matrix
    np.testing.assert_allclose(H, _bcs_literal(box, h, 0.3, 1.2), atol=1e-12)


def test_bcs_kernel_must_be_hermitian():
    with pytest.raises(DomainError, match="offset"):
        build_bcs({1: 1.0, -1: 2.0})


def test_model_atoms_unit_norm_and_symmetric():
    m = build_bcs({1: -1.0, -1: -1.0}, 0.0, 1.0)
    assert m.is_symmetric()
    for a in m.atoms:
        for psi in a.interactions:
            assert w_norm(psi, m.decay) == pytest.approx(1.0)
    # ||phi|| + 4 |w| with ||F||_1 on the lattice for order 2
    expected = w_norm(m.phi, F) + 4 * lattice_norm_one(F) * sum(abs(a.weight) for a in m.atoms)
    assert model_norm(m) == pytest.approx(expected)


def test_symmetrization_splits_weights():
    rng = np.random.default_rng(3)
    psi = _nonzero(rng, self_adjoint=False)
    chi = _nonzero(rng)
    m = LongRangeModel(Interaction(), [(1.0, (psi, chi))], F)
    assert len(m.atoms) == 2
    assert m.is_symmetric()
    H = local_hamiltonian(m, LatticeBox.chain(4)).matrix
    np.testing.assert_allclose(H, H.conj().T, atol=1e-12)


seeds = st.integers(0, 2 ** 31)



@given(seeds)
def test_energy_difference_bound(seed):
    rng = np.random.default_rng(seed)
    box = LatticeBox.cube(1, 2)
    phi, psi = random_interaction(rng), random_interaction(rng)
    diff = phi - psi
    lhs = operator_norm(local_energy(diff, box))
    rhs = box.n_sites * lattice_norm_one(F) * w_norm(diff, F)
    assert lhs <= rhs + 1e-12


@given(seeds)
def test_energy_per_site_bound(seed):
    rng = np.random.default_rng(seed)
    phi = random_interaction(rng)
    box = LatticeBox.chain(5)
    e = energy_per_site(phi, 1, box)
    assert operator_norm(e) <= lattice_norm_one(F) * w_norm(phi, F) + 1e-12


@given(seeds)
def test_long_range_energy_bound(seed):
    rng = np.random.default_rng(seed)
    phi = random_interaction(rng, max_range=1)
    atoms = [(float(rng.normal()), (_nonzero(rng, max_range=1),)),
             (float(rng.normal()), (_nonzero(rng, max_range=1), _nonzero(rng, max_range=1)))]
    m = LongRangeModel(phi, atoms, F)
    for L in (1, 2):
        box = LatticeBox.cube(1, L)
        lhs = operator_norm(local_hamiltonian(m, box))
        assert lhs <= box.n_sites * lattice_norm_one(F) * model_norm(m) + 1e-10


@given(seeds)
def test_w_norm_is_a_norm(seed):
    rng = np.random.default_rng(seed)
    phi, psi = random_interaction(rng), random_interaction(rng)
    assert w_norm(phi + psi, F) <= w_norm(phi, F) + w_norm(psi, F) + 1e-12
    assert w_norm(phi * 2.5, F) == pytest.approx(2.5 * w_norm(phi, F))
