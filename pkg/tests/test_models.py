import numpy as np
import pytest

from lrfermi.errors import DomainError
from lrfermi.fock import LatticeBox, LocalPolynomial, instantiate
from lrfermi.interactions import DecayFunction, local_energy, local_hamiltonian, number_interaction, w_norm
from lrfermi.models import SPINFUL, build_bcs, build_number_squared, hopping_from_kernel, pairing_interaction


def test_pairing_interaction_has_unit_norm():
    P = pairing_interaction()
    assert w_norm(P, DecayFunction()) == pytest.approx(1.0)
    assert P.adjoint().name == "pairing*"
    assert P.adjoint().adjoint().name == "pairing"


def test_kernel_chemical_potential():
    box = LatticeBox.chain(2, SPINFUL)
    phi = hopping_from_kernel({0: 0.5}, mu=0.2)
    N = local_energy(number_interaction(SPINFUL), box).matrix
    np.testing.assert_allclose(local_energy(phi, box).matrix, 0.3 * N, atol=1e-14)


def test_kernel_string_keys_and_decay_condition():
    a = hopping_from_kernel({"1": -1.0, "-1": -1.0}, spins=(0,))
    b = hopping_from_kernel({1: -1.0, -1: -1.0}, spins=(0,))
    assert a.isclose(b)
    with pytest.raises(DomainError):
        hopping_from_kernel({1: 1.0}, spins=(0,))


def test_negative_coupling_rejected():
    with pytest.raises(DomainError):
        build_bcs(gamma=-1.0)


def test_number_squared_two_dimensions():
    box = LatticeBox.cube(2, 1)
    m = build_number_squared(dimension=2)
    # N^2 / (2 |L|) is diagonal in the occupation basis
    H = local_hamiltonian(m, box).matrix
    counts = np.array([bin(k).count("1") for k in range(box.fock_dim)])
    np.testing.assert_allclose(np.diag(H).real, counts ** 2 / (2 * box.n_sites), atol=1e-12)
    assert np.abs(H - np.diag(np.diag(H))).max() < 1e-12


def test_bcs_pair_hopping_conserves_particle_number():
    box = LatticeBox.chain(2, SPINFUL)
    H = local_hamiltonian(build_bcs({1: -1.0, -1: -1.0}, 0.1, 1.0), box)
    N = local_energy(number_interaction(SPINFUL), box)
    assert np.abs(H.commutator(N).matrix).max() < 1e-12
    pair = instantiate(LocalPolynomial.monomial(1.0, [((0,), "down", False), ((0,), "up", False)]), box)
    assert np.abs(pair.matrix).max() == pytest.approx(1.0)
