import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrfermi.dynamics import (
    Schedule,
    TimeDependentInteraction,
    derivation,
    heisenberg,
    heisenberg_nonautonomous,
    lr_bound_check,
    nonconvergence_probe,
)
from lrfermi.errors import DomainError
from lrfermi.fock import (
    LatticeBox,
    LocalPolynomial,
    annihilator,
    creator,
    instantiate,
    operator_norm,
    random_polynomial,
)
from lrfermi.interactions import (
    DecayFunction,
    hopping_interaction,
    number_interaction,
    random_interaction,
    single_site_interaction,
)
from lrfermi.harness.suites import commuting_family_check, integrator_order_check

F = DecayFunction()


def test_number_derivation_rotates_phase():
    box = LatticeBox.chain(3)
    a = annihilator(box, (0,))
    assert operator_norm(derivation(number_interaction(), box, a) + 1j * a) < 1e-12


def test_single_mode_phase_rotation():
    box = LatticeBox.chain(1)
    omega, t = 1.7, 0.9
    U = single_site_interaction(LocalPolynomial.number((0,)) * omega)
    a = annihilator(box, (0,))
    assert operator_norm(heisenberg(U, box, a, t) - np.exp(-1j * omega * t) * a) < 1e-12


def test_schedule_rules():
    s = Schedule((0.0, 1.0, 2.0), (1.0, 3.0, 5.0))
    assert s(0.5) == 1.0 and s(1.0) == 3.0 and s(1.0, "left") == 1.0 and s(-4) == 1.0
    assert s.breakpoints == (1.0, 2.0)
    lin = Schedule((0.0, 1.0), (0.0, 2.0), "linear")
    assert lin(0.25) == pytest.approx(0.5) and lin(5.0) == 2.0
    with pytest.raises(DomainError):
        Schedule((1.0, 0.0), (0.0, 0.0))
    with pytest.raises(DomainError):
        Schedule((0.0,), (0.0,), "cubic")


def test_time_dependent_needs_self_adjoint_components():
    rng = np.random.default_rng(1)
    while True:
        phi = random_interaction(rng, self_adjoint=False)
        if not phi.is_self_adjoint(1e-10):
            break
    with pytest.raises(DomainError):
        TimeDependentInteraction([phi], [1.0])


def test_commuting_family_closed_form():
    rec = commuting_family_check(0)
    assert rec.lhs <= 1e-8


def test_integrator_order_two():
    rec = integrator_order_check(0)
    assert rec.passed, rec.statement


def test_reverse_cocycle():
    box = LatticeBox.chain(3)
    psi = TimeDependentInteraction.from_breakpoints([0.0, 0.4], [hopping_interaction(), number_interaction()],
                                                    "linear")
    A = instantiate(LocalPolynomial.hopping((0,), (1,)), box)
    s, t, tol = 0.0, 0.8, 1e-10
    r = 0.5 * (s + t)
    direct = heisenberg_nonautonomous(psi, box, A, s, t, tol).operator
    # tau_{t,s} = tau_{r,s} tau_{t,r}: evolve over [r, t] first, then over [s, r]
    inner = heisenberg_nonautonomous(psi, box, A, r, t, tol).operator
    two = heisenberg_nonautonomous(psi, box, inner, s, r, tol).operator
    assert operator_norm(two - direct) <= 10 * tol


def test_autonomous_matches_nonautonomous_constant():
    box = LatticeBox.chain(3)
    A = annihilator(box, (0,)) + creator(box, (1,))
    phi = hopping_interaction(0.8) + number_interaction() * 0.3
    res = heisenberg_nonautonomous(TimeDependentInteraction.constant(phi), box, A, 0.2, 1.1, 1e-12)
    assert operator_norm(res.operator - heisenberg(phi, box, A, 0.9)) < 1e-10


def test_lieb_robinson_commutator_six_sites():
    box = LatticeBox.chain(6, start=0)
    psi = TimeDependentInteraction.from_breakpoints([0.0, 0.5], [hopping_interaction(), number_interaction()])
    A1 = instantiate(LocalPolynomial.number((0,)), box)
    A2 = annihilator(box, (5,))
    c = lr_bound_check("i", psi, box, F, s=0.0, t=1.0, A1=A1, A2=A2)
    assert c.holds and c.lhs <= c.rhs


def test_probe_remainder_at_two_sites():
    boxes = [LatticeBox.cube(1, 1), LatticeBox.cube(1, 2)]
    pr = nonconvergence_probe(boxes, 0.5)
    assert pr.remainder_bound == pytest.approx(0.5)
    assert pr.remainder_holds


def test_probe_requires_nested_boxes():
    with pytest.raises(DomainError):
        nonconvergence_probe([LatticeBox.chain(2, start=3), LatticeBox.cube(1, 4)], 0.5)


seeds = st.integers(0, 2 ** 31)


def _operator(rng, box):
    return instantiate(random_polynomial(rng, box.sites, n_terms=3, even=False), box)


def _phi(rng):
    while True:
        phi = random_interaction(rng)
        if not phi.is_zero():
            return phi


@given(seeds, st.floats(-1, 1), st.floats(-1, 1))
def test_group_law(seed, s, t):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(3)
    phi, A = _phi(rng), _operator(rng, box)
    lhs = heisenberg(phi, box, heisenberg(phi, box, A, s), t)
    assert operator_norm(lhs - heisenberg(phi, box, A, s + t)) < 1e-10 * max(1.0, operator_norm(A))


@given(seeds, st.floats(-1, 1))
def test_automorphism(seed, t):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(3)
    phi, A, B = _phi(rng), _operator(rng, box), _operator(rng, box)
    scale = max(1.0, operator_norm(A) * operator_norm(B))
    tA, tB = heisenberg(phi, box, A, t), heisenberg(phi, box, B, t)
    assert operator_norm(heisenberg(phi, box, A @ B, t) - tA @ tB) < 1e-10 * scale
    assert operator_norm(heisenberg(phi, box, A.dag, t) - tA.dag) < 1e-10 * scale
    assert operator_norm(tA) == pytest.approx(operator_norm(A), abs=1e-10 * scale)


@settings(max_examples=10)
@given(seeds)
def test_evolution_preserves_parity(seed):
    rng = np.random.default_rng(seed)
    box = LatticeBox.chain(3)
    A = instantiate(random_polynomial(rng, box.sites, even=True), box)
    assert heisenberg(_phi(rng), box, A, 0.7).is_even(1e-10)
