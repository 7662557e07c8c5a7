import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lrfermi.errors import DomainError
from lrfermi.fock import (
    LatticeBox,
    LocalPolynomial,
    annihilator,
    creator,
    even_part,
    identity,
    instantiate,
    odd_part,
    operator_norm,
    parity_map,
    parse_polynomial,
    random_polynomial,
    trace_state,
)


def _anti(A, B):
    return A @ B + B @ A


@pytest.mark.parametrize("box", [LatticeBox.chain(3), LatticeBox.chain(2, ("up", "down"))])
def test_car_relations(box):
    modes = box.modes()
    for (x, s), (y, t) in itertools.product(modes, repeat=2):
        a, b = annihilator(box, x, s), annihilator(box, y, t)
        assert operator_norm(_anti(a, b)) < 1e-12
        expected = identity(box) if (x, s) == (y, t) else 0 * identity(box)
        assert operator_norm(_anti(a, b.dag) - expected) < 1e-12


def test_hopping_two_sites_spectrum():
    box = LatticeBox.chain(2, start=0)
    H = instantiate(LocalPolynomial.hopping((0,), (1,)), box)
    assert H.is_hermitian()
    np.testing.assert_allclose(np.linalg.eigvalsh(H.matrix), [-1, 0, 0, 1], atol=1e-12)
    assert operator_norm(H) == pytest.approx(1.0, abs=1e-12)


def test_number_trace_is_half():
    box = LatticeBox.chain(1)
    assert trace_state(instantiate(LocalPolynomial.number((0,)), box)) == pytest.approx(0.5)


def test_parity_flips_generators_and_splits():
    box = LatticeBox.chain(2)
    a = annihilator(box, (0,))
    assert operator_norm(parity_map(a) + a) < 1e-12
    n = a.dag @ a
    A = a + n
    assert operator_norm(even_part(A) - n) < 1e-12
    assert operator_norm(odd_part(A) - a) < 1e-12


def test_normal_ordering_uses_car():
    a = LocalPolynomial.annihilator((0,))
    c = LocalPolynomial.creator((0,))
    # a a* = 1 - a* a
    assert (a * c).isclose(LocalPolynomial.constant(1.0) - c * a)
    assert (a * a).is_zero()


def test_parse_polynomial_matches_constructor():
    poly = parse_polynomial([{"ops": ["c+ 0", "c- 1"], "coef": [1.0, 0.0]},
                             {"ops": ["c+ 1", "c- 0"], "coef": [1.0, 0.0]}])
    assert poly.isclose(LocalPolynomial.hopping((0,), (1,)))


def test_instantiate_outside_box_raises():
    with pytest.raises(DomainError):
        instantiate(LocalPolynomial.number((5,)), LatticeBox.chain(2))


def test_dense_cap():
    with pytest.raises(DomainError):
        instantiate(LocalPolynomial.number((0,)), LatticeBox.chain(15))


def test_box_validation():
    with pytest.raises(DomainError):
        LatticeBox(())
    with pytest.raises(DomainError):
        LatticeBox(((0,), (0, 1)))
    with pytest.raises(DomainError):
        LatticeBox.chain(2, ("up", "up"))
    assert LatticeBox.chain(4).sites == ((-1,), (0,), (1,), (2,))
    assert LatticeBox.cube(2, 1).n_sites == 9


seeds = st.integers(0, 2 ** 31)


@given(seeds)
def test_instantiate_is_a_homomorphism(seed):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(3)
    p = random_polynomial(rng, box.sites, n_terms=3, max_degree=3, even=False)
    q = random_polynomial(rng, box.sites, n_terms=3, max_degree=3, even=False)
    P, Q = instantiate(p, box), instantiate(q, box)
    assert np.allclose(instantiate(p * q, box).matrix, (P @ Q).matrix, atol=1e-11)
    assert np.allclose(instantiate(p + q, box).matrix, (P + Q).matrix, atol=1e-11)
    assert np.allclose(instantiate(p.dag, box).matrix, P.dag.matrix, atol=1e-11)


@given(seeds)
def test_trace_state_is_tracial_and_parity_invariant(seed):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(3)
    A = instantiate(random_polynomial(rng, box.sites, even=False), box)
    B = instantiate(random_polynomial(rng, box.sites, even=False), box)
    assert abs(trace_state(A @ B) - trace_state(B @ A)) < 1e-12
    assert abs(trace_state(parity_map(A)) - trace_state(A)) < 1e-12
    assert trace_state(identity(box)) == pytest.approx(1.0)


@given(seeds)
def test_disjoint_even_operators_commute(seed):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(4)
    left, right = box.sites[:2], box.sites[2:]
    A = instantiate(random_polynomial(rng, left, even=True), box)
    B = instantiate(random_polynomial(rng, right, even=False), box)
    assert operator_norm(A.commutator(B)) < 1e-11


@given(seeds)
def test_translation_preserves_norm(seed):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(5)
    p = random_polynomial(rng, [(0,), (1,)], even=True)
    assert operator_norm(instantiate(p, box)) == pytest.approx(operator_norm(instantiate(p.translate((-2,)), box)),
                                                               abs=1e-10)


def test_parse_rejects_bad_token():
    with pytest.raises(DomainError):
        parse_polynomial([{"ops": ["b+ 0"], "coef": [1.0, 0.0]}])
