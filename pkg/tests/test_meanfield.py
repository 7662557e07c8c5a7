import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from lrfermi.errors import ConvergenceError, DomainError
from lrfermi.fock import LatticeBox, LocalPolynomial, instantiate, random_polynomial
from lrfermi.interactions import (
    DecayFunction,
    LongRangeModel,
    energy_per_site,
    hopping_interaction,
    local_hamiltonian,
    model_norm,
    random_interaction,
    w_norm,
)
from lrfermi.meanfield import (
    MeanFieldSystem,
    SolverConfig,
    approximating_interaction,
    classical_evolution,
    contraction_window,
    floor_bracket,
    flow_apply,
    solve_selfconsistency,
)
from lrfermi.models import SPINFUL, build_bcs
from lrfermi.statespace import StateFunction, expect, random_density, vacuum_density
from lrfermi.harness.suites import bcs_pair_state, bcs_scenario_model

F = DecayFunction()
GRID = np.linspace(0.0, 0.5, 6)


def _nonzero(rng, **kw):
    while True:
        phi = random_interaction(rng, **kw)
        if not phi.is_zero():
            return phi


def test_contraction_window_unit_inputs():
    T = contraction_window(1.0, 1.0, 1.0, 1.0)
    oracle = brentq(lambda x: x - math.exp(-4 * x) / 8, 0.0, 1.0, xtol=1e-15)
    assert T == pytest.approx(oracle, abs=1e-12)
    assert T == pytest.approx(0.0879, abs=5e-5)


def test_contraction_window_degenerate():
    assert contraction_window(0.0, 3.0, 2.0, 1.0, cap=0.7) == 0.7
    with pytest.raises(DomainError):
        contraction_window(1.0, 0.0, 1.0, 1.0)


def test_floor_bracket_single_entry_is_identity():
    rng = np.random.default_rng(0)
    psi = _nonzero(rng)
    rho = random_density(LatticeBox.chain(4), rng)
    assert floor_bracket(rho, [psi], 1) is psi


def test_floor_bracket_pair():
    rng = np.random.default_rng(1)
    box = LatticeBox.chain(6)
    p1, p2 = _nonzero(rng), _nonzero(rng)
    rho = random_density(box, rng)
    e1 = expect(rho, energy_per_site(p1, 1, box))
    e2 = expect(rho, energy_per_site(p2, 1, box))
    assert floor_bracket(rho, [p1, p2], 1).isclose(p1 * e2 + p2 * e1, 1e-12)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 31))
def test_approximating_interaction_norm_bound(seed):
    rng = np.random.default_rng(seed)
    atoms = [(float(rng.normal()), (_nonzero(rng, max_range=1), _nonzero(rng, max_range=1)))]
    m = LongRangeModel(_nonzero(rng, max_range=1), atoms, F)
    box = LatticeBox.chain(4)
    rho = random_density(box, rng)
    xi = approximating_interaction(m, lambda t: rho)
    assert w_norm(xi(0.3), F) <= model_norm(m) + 1e-12


def test_system_labels_and_observables():
    m = build_bcs({1: -1.0, -1: -1.0}, 0.0, 1.0)
    box = LatticeBox.chain(2, SPINFUL)
    e = MeanFieldSystem(m, box, "e-density")
    assert e.labels == ["e[pairing*]", "e[pairing]"]
    h = MeanFieldSystem(m, box, "h-gradient")
    assert h.labels == ["U[pairing*]/V", "U[pairing]/V"]
    with pytest.raises(DomainError):
        MeanFieldSystem(m, box, "exact")


def test_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(tolerance=0)
    with pytest.raises(DomainError):
        SolverConfig(variant="other")
    with pytest.raises(DomainError):
        SolverConfig(max_iterations=0)


def test_grid_validation():
    m = bcs_scenario_model()
    rho = bcs_pair_state(LatticeBox.chain(2, SPINFUL))
    with pytest.raises(DomainError):
        solve_selfconsistency(m, rho, 0.0, [0.3, 0.1, 0.2])
    with pytest.raises(DomainError):
        solve_selfconsistency(m, rho, 0.0, [-0.1, 0.2])


@pytest.mark.parametrize("method", ["picard", "ode"])
def test_free_model_matches_exact(method):
    m = build_bcs({1: -0.5 * np.exp(0.3j), -1: -0.5 * np.exp(-0.3j)}, 0.2, 0.0)
    box = LatticeBox.chain(2, SPINFUL)
    rho = bcs_pair_state(box)
    traj = solve_selfconsistency(m, rho, 0.0, GRID, SolverConfig(), method)
    H = local_hamiltonian(m, box).matrix
    E, V = np.linalg.eigh(H)
    A = instantiate(LocalPolynomial.number((0,), "up"), box).matrix
    for t, r in zip(GRID, traj.states):
        W = (V * np.exp(-1j * t * E)) @ V.conj().T
        exact = np.einsum("ij,ji->", W @ rho.matrix @ W.conj().T, A)
        assert abs(np.einsum("ij,ji->", r.matrix, A) - exact) < 1e-9


def test_vacuum_is_stationary():
    m = bcs_scenario_model()
    box = LatticeBox.chain(2, SPINFUL)
    traj = solve_selfconsistency(m, vacuum_density(box), 0.0, GRID, SolverConfig(), "ode")
    assert np.abs(traj.order_parameters).max() < 1e-12
    assert np.abs(traj.states[-1].matrix - vacuum_density(box).matrix).max() < 1e-10


def test_picard_and_ode_agree_with_diagnostics():
    m = bcs_scenario_model()
    rho = bcs_pair_state(LatticeBox.chain(2, SPINFUL))
    tp = solve_selfconsistency(m, rho, 0.0, GRID, SolverConfig(), "picard")
    to = solve_selfconsistency(m, rho, 0.0, GRID, SolverConfig(), "ode")
    assert np.abs(tp.order_parameters - to.order_parameters).max() < 1e-7
    d = tp.diagnostics
    assert d["certificate"] < 1e-6
    assert len(d["windows"]) == len(d["iterations"]) == len(d["residual_history"])
    assert d["window_length"] > 0
    assert max(d["final_residuals"]) < SolverConfig().tolerance


def test_pairing_parameters_are_conjugate():
    m = bcs_scenario_model()
    rho = bcs_pair_state(LatticeBox.chain(2, SPINFUL), phase=0.4)
    traj = solve_selfconsistency(m, rho, 0.0, GRID, SolverConfig(), "ode")
    c = traj.order_parameters
    np.testing.assert_allclose(c[:, 0], np.conj(c[:, 1]), atol=1e-12)


def test_too_few_iterations_raise():
    m = bcs_scenario_model()
    rho = bcs_pair_state(LatticeBox.chain(2, SPINFUL))
    with pytest.raises(ConvergenceError):
        solve_selfconsistency(m, rho, 0.0, GRID, SolverConfig(max_iterations=1), "picard")


def test_backward_then_forward_returns():
    m = bcs_scenario_model()
    box = LatticeBox.chain(2, SPINFUL)
    rho = bcs_pair_state(box)
    cfg = SolverConfig()
    r1 = flow_apply(m, 0.0, 0.4, [rho], cfg, "ode")[0]
    back = flow_apply(m, 0.4, 0.0, [r1], cfg, "ode")[0]
    assert np.abs(back.matrix - rho.matrix).max() < 1e-8


def test_classical_evolution_is_multiplicative():
    m = bcs_scenario_model()
    box = LatticeBox.chain(2, SPINFUL)
    rho = bcs_pair_state(box)
    rng = np.random.default_rng(5)
    f, g = (StateFunction.affine(instantiate(random_polynomial(rng, box.sites, SPINFUL, even=True), box))
            for _ in range(2))
    fg = classical_evolution(m, f * g, 0.0, 0.5, rho)
    assert abs(fg - classical_evolution(m, f, 0.0, 0.5, rho) * classical_evolution(m, g, 0.0, 0.5, rho)) < 1e-9
