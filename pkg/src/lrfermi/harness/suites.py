"""Seeded verification suites.

Every check yields a :class:`CheckRecord` with both sides of an inequality
``lhs <= rhs + tolerance`` (or ``lhs < rhs`` for strict trend checks) and a
short statement of the property it tests.  Suites are deterministic for a
given seed.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..dynamics import (
    TimeDependentInteraction,
    derivation_tail,
    generator_bound,
    heisenberg,
    heisenberg_nonautonomous,
    lr_bound_check,
    nonconvergence_probe,
    propagator,
)
from ..fock import (
    FockOperator,
    LatticeBox,
    LocalPolynomial,
    annihilator,
    creator,
    instantiate,
    odd_part,
    operator_norm,
    parity_map,
    random_polynomial,
    trace_state,
    even_part,
)
from ..interactions import (
    Atom,
    DecayFunction,
    LongRangeModel,
    energy_per_site,
    hopping_interaction,
    lattice_norm_one,
    local_energy,
    local_hamiltonian,
    model_norm,
    random_interaction,
    w_norm,
)
from ..meanfield import SolverConfig, flow_apply, liouville_residual, meanfield_vs_exact, solve_selfconsistency
from ..models import SPINFUL, build_bcs, build_number_squared
from ..statespace import (
    DensityState,
    StateFunction,
    bracket_function,
    classical_energy,
    energy_density_scan,
    expect,
    gateaux_derivative,
    poisson_bracket,
    product_state,
    product_vector,
    pure_state,
    random_density,
)


@dataclass
class CheckRecord:
    """Outcome of one numerical check."""

    suite: str
    check: str
    inputs: str
    lhs: float
    rhs: float
    tolerance: float
    passed: bool
    statement: str

    def as_row(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    """Collection of check records with per-suite counts."""

    records: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def summary(self) -> dict:
        out: dict = {}
        for r in self.records:
            s = out.setdefault(r.suite, {"passed": 0, "failed": 0})
            s["passed" if r.passed else "failed"] += 1
        out["total"] = {"passed": sum(v["passed"] for v in out.values()),
                        "failed": sum(v["failed"] for v in out.values())}
        return out

    def extend(self, other: "VerificationReport"):
        self.records.extend(other.records)
        self.timings.update(other.timings)


def _digest(*parts) -> str:
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:12]


def _check(suite, check, inputs, lhs, rhs, statement, tol=0.0, strict=False) -> CheckRecord:
    lhs, rhs = float(lhs), float(rhs)
    passed = lhs < rhs if strict else lhs <= rhs + tol
    return CheckRecord(suite, check, _digest(*inputs) if isinstance(inputs, tuple) else str(inputs),
                       lhs, rhs, float(tol), bool(passed), statement)


def _unit(A: FockOperator) -> FockOperator:
    n = operator_norm(A)
    return A / n if n > 0 else A


def _random_operator(rng, box: LatticeBox, sites, even=False) -> FockOperator:
    while True:
        poly = random_polynomial(rng, sites, box.spins, n_terms=4, max_degree=4, even=even)
        A = instantiate(poly, box)
        if operator_norm(A) > 1e-8 and (even or operator_norm(odd_part(A)) > 1e-8):
            return _unit(A)


def _nonzero_interaction(rng, scale=1.0, **kw):
    while True:
        phi = random_interaction(rng, scale=scale, **kw)
        if not phi.is_zero():
            return phi


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


def algebra_suite(seed: int = 0, n_pairs: int = 200, max_modes: int = 6) -> list:
    """CAR relations, parity automorphism, trace state and disjoint commutation."""
    rng = np.random.default_rng([seed, 1])
    tol = 1e-12
    boxes = [LatticeBox.chain(n) for n in range(1, max_modes + 1)]
    boxes += [LatticeBox.chain(n, SPINFUL) for n in range(1, max_modes // 2 + 1)]
    out = []
    for box in boxes:
        a = [annihilator(box, x, s).matrix for x, s in box.modes()]
        eye = np.eye(box.fock_dim)
        err_mixed = err_same = err_par = 0.0
        for i, ai in enumerate(a):
            err_par = max(err_par, np.abs(parity_map(annihilator(box, *box.modes()[i])).matrix + ai).max())
            for j, aj in enumerate(a):
                ajd = aj.conj().T
                err_mixed = max(err_mixed, np.abs(ai @ ajd + ajd @ ai - (i == j) * eye).max())
                err_same = max(err_same, np.abs(ai @ aj + aj @ ai).max())
        key = (box.sites, box.spins)
        out.append(_check("algebra", "car-mixed", key, err_mixed, 0, "{a_i, a_j*} = delta_ij", tol))
        out.append(_check("algebra", "car-same", key, err_same, 0, "{a_i, a_j} = 0", tol))
        out.append(_check("algebra", "parity-generator", key, err_par, 0, "parity maps a_i to -a_i", tol))
    for k in range(n_pairs):
        box = boxes[int(rng.integers(len(boxes)))]
        A = _random_operator(rng, box, box.sites)
        B = _random_operator(rng, box, box.sites)
        key = (seed, k, box.sites, box.spins)
        sA, sB = parity_map(A), parity_map(B)
        out.append(_check("algebra", "parity-multiplicative", key,
                          operator_norm(parity_map(A @ B) - sA @ sB), 0, "sigma(AB) = sigma(A) sigma(B)", tol))
        out.append(_check("algebra", "parity-star", key, operator_norm(parity_map(A.dag) - sA.dag), 0,
                          "sigma(A*) = sigma(A)*", tol))
        out.append(_check("algebra", "parity-involution", key, operator_norm(parity_map(sA) - A), 0,
                          "sigma(sigma(A)) = A", tol))
        out.append(_check("algebra", "trace-cyclic", key, abs(trace_state(A @ B) - trace_state(B @ A)), 0,
                          "tr(AB) = tr(BA)", tol))
        out.append(_check("algebra", "trace-odd", key, abs(trace_state(odd_part(A))), 0,
                          "the trace state vanishes on odd elements", tol))
        out.append(_check("algebra", "trace-positive", key, -trace_state(A.dag @ A).real, 0,
                          "tr(A* A) >= 0", tol))
        if box.n_sites >= 2:
            sites = list(box.sites)
            rng.shuffle(sites)
            cut = int(rng.integers(1, len(sites)))
            X, Y = sorted(sites[:cut]), sorted(sites[cut:])
            E = _random_operator(rng, box, X, even=True)
            C = _random_operator(rng, box, Y)
            out.append(_check("algebra", "disjoint-even-commute", key + (tuple(X),),
                              operator_norm(E @ C - C @ E), 0,
                              "even elements commute with everything localized in a disjoint region", tol))
            O1 = _unit(odd_part(_random_operator(rng, box, X)))
            O2 = _unit(odd_part(_random_operator(rng, box, Y)))
            out.append(_check("algebra", "disjoint-odd-anticommute", key + (tuple(X),),
                              operator_norm(O1 @ O2 + O2 @ O1), 0,
                              "odd elements on disjoint regions anticommute", tol))
    return out


# ---------------------------------------------------------------------------
# Norm bounds and Lieb-Robinson estimates
# ---------------------------------------------------------------------------


def _scaled_interaction(rng, F: DecayFunction, **kw):
    """Random interaction rescaled to a W-norm in [0.5, 1.5] so that exponential bounds stay finite."""
    phi = _nonzero_interaction(rng, **kw)
    return phi * (float(rng.uniform(0.5, 1.5)) / w_norm(phi, F))


def _random_decay(rng) -> DecayFunction:
    return DecayFunction(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.0, 1.0)), 1)


def bounds_suite(seed: int = 0, n_instances: int = 100, max_sites: int = 8, horizon: float = 1.0,
                 tol: float = 1e-10) -> list:
    """Energy norm bounds, derivation bounds and the four short-range dynamics estimates."""
    rng = np.random.default_rng([seed, 2])
    out = []
    for k in range(n_instances):
        n = int(rng.integers(5, max_sites + 1))
        box = LatticeBox.chain(n)
        F = _random_decay(rng)
        f1 = lattice_norm_one(F)
        phi = _scaled_interaction(rng, F)
        wn = w_norm(phi, F)
        key = (seed, k, n, F)
        out.append(_check("bounds", "local-energy-norm", key, operator_norm(local_energy(phi, box)), n * f1 * wn,
                          "||U_L|| <= |L| ||F||_1 ||phi||_W", 1e-12))
        ell = int(rng.integers(1, 3))
        ebox = LatticeBox.chain(max(n, 6))
        out.append(_check("bounds", "energy-per-site-norm", key + (ell,),
                          operator_norm(energy_per_site(phi, ell, ebox)), f1 * wn,
                          "||e_phi|| <= ||F||_1 ||phi||_W", 1e-12))
        atoms = [Atom(float(rng.normal()), (_nonzero_interaction(rng, max_range=1),))]
        order = int(rng.integers(2, 4))
        atoms.append(Atom(float(rng.normal()), tuple(_nonzero_interaction(rng, max_range=1) for _ in range(order))))
        m = LongRangeModel(phi, atoms, F)
        out.append(_check("bounds", "long-range-energy-norm", key + (order,),
                          operator_norm(local_hamiltonian(m, box)), n * f1 * model_norm(m, F),
                          "||U_L^m|| <= |L| ||F||_1 ||m||", 1e-12))
        x0 = box.sites[int(rng.integers(n - 1))]
        A = _random_operator(rng, box, [x0, (x0[0] + 1,)])
        g = generator_bound(phi, box, A, F)
        out.append(_check("bounds", "generator", key, g["lhs"], g["rhs"],
                          "||delta_L(A)|| <= 2 |Lambda| ||A|| ||phi||_W ||F||_1", 1e-12))
        small = LatticeBox(box.sites[1:-1], box.spins)
        As = _random_operator(rng, box, [small.sites[int(rng.integers(small.n_sites))]])
        tail = derivation_tail(phi, small, box, As, F)
        out.append(_check("bounds", "derivation-tail", key, tail["difference"], tail["bound"],
                          "derivations on nested boxes differ by at most the decay tail", 1e-12))
        # time-dependent short-range dynamics
        phi2 = _scaled_interaction(rng, F)
        s = float(rng.uniform(-0.5, 0.5))
        t = s + float(rng.uniform(-horizon, horizon))
        mid = 0.5 * (s + t)
        psi = TimeDependentInteraction.from_breakpoints(sorted([min(s, t) - 1.0, mid]), [phi, phi2])
        A1 = _random_operator(rng, box, [box.sites[0]], even=True)
        A2 = _random_operator(rng, box, [box.sites[-1]])
        c = lr_bound_check("i", psi, box, F, s=s, t=t, A1=A1, A2=A2, tol=tol)
        out.append(_check("bounds", "lieb-robinson-commutator", key + (s, t), c.lhs, c.rhs,
                          "commutator of an evolved even observable with a distant one", tol + 1e-12))
        centre = box.sites[n // 2]
        region = [x for x in box.sites if abs(x[0] - centre[0]) <= 1]
        Ac = _random_operator(rng, box, [centre])
        c = lr_bound_check("ii", psi, box, F, s=s, t=t, A=Ac, region=region, tol=tol)
        out.append(_check("bounds", "lieb-robinson-localization", key + (s, t), c.lhs, c.rhs,
                          "evolution restricted to a region approximates the full evolution", 2 * tol + 1e-12))
        phi3 = _scaled_interaction(rng, F) * 0.2
        psi_t = TimeDependentInteraction.from_breakpoints(sorted([min(s, t) - 1.0, mid]), [phi + phi3, phi2])
        c = lr_bound_check("iii", psi, box, F, s=s, t=t, A=Ac, psi_tilde=psi_t, tol=tol)
        out.append(_check("bounds", "lieb-robinson-interaction-continuity", key + (s, t), c.lhs, c.rhs,
                          "evolutions of nearby interactions stay close", 2 * tol + 1e-12))
        s2 = s + float(rng.uniform(-0.2, 0.2))
        t2 = t + float(rng.uniform(-0.2, 0.2))
        c = lr_bound_check("iv", psi, box, F, s=s, t=t, A=Ac, s2=s2, t2=t2, tol=tol)
        out.append(_check("bounds", "lieb-robinson-time-continuity", key + (s, t, s2, t2), c.lhs, c.rhs,
                          "evolutions over nearby time intervals stay close", 2 * tol + 1e-12))
    return out


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------


def dynamics_suite(seed: int = 0, n_instances: int = 20) -> list:
    """Group law, automorphism identities, commuting-family oracle and integrator order."""
    rng = np.random.default_rng([seed, 3])
    out = []
    tol = 1e-10
    for k in range(n_instances):
        box = LatticeBox.chain(int(rng.integers(3, 6)))
        phi = _nonzero_interaction(rng)
        A = _random_operator(rng, box, box.sites)
        B = _random_operator(rng, box, box.sites)
        s, t = (float(v) for v in rng.uniform(-1, 1, size=2))
        key = (seed, k, box.sites)
        ts = heisenberg(phi, box, heisenberg(phi, box, A, s), t)
        out.append(_check("dynamics", "group-law", key, operator_norm(ts - heisenberg(phi, box, A, s + t)), 0,
                          "tau_t tau_s = tau_{t+s}", tol))
        tA, tB = heisenberg(phi, box, A, t), heisenberg(phi, box, B, t)
        out.append(_check("dynamics", "multiplicative", key, operator_norm(heisenberg(phi, box, A @ B, t) - tA @ tB),
                          0, "tau_t(AB) = tau_t(A) tau_t(B)", tol))
        out.append(_check("dynamics", "star", key, operator_norm(heisenberg(phi, box, A.dag, t) - tA.dag), 0,
                          "tau_t(A*) = tau_t(A)*", tol))
        out.append(_check("dynamics", "identity-at-zero", key, operator_norm(heisenberg(phi, box, A, 0.0) - A), 0,
                          "tau_0 = id", tol))
    # long-range generator
    m = build_bcs({1: -1.0, -1: -1.0}, mu=0.2, gamma=1.0)
    box = LatticeBox.chain(2, SPINFUL)
    A = _random_operator(rng, box, box.sites)
    g = heisenberg(m, box, heisenberg(m, box, A, 0.3), 0.4)
    out.append(_check("dynamics", "group-law-long-range", (seed, "bcs"),
                      operator_norm(g - heisenberg(m, box, A, 0.7)), 0, "tau_t tau_s = tau_{t+s}", tol))
    out.append(commuting_family_check(seed))
    out.append(integrator_order_check(seed))
    return out


def commuting_family_check(seed: int = 0, tol: float = 1e-9) -> CheckRecord:
    """Non-autonomous evolution of ``f(t) phi`` against ``tau`` at time ``int f``."""
    hop = hopping_interaction()
    box = LatticeBox.chain(4)

    def f(t):
        return 1 + 0.5 * np.sin(3 * t)

    psi = TimeDependentInteraction([hop], [f])
    A = annihilator(box, (0,)) @ creator(box, (1,)) + annihilator(box, (-1,))
    res = heisenberg_nonautonomous(psi, box, A, 0.1, 1.3, tol)
    def primitive(t):
        return t - np.cos(3 * t) / 6

    exact = heisenberg(hop, box, A, primitive(1.3) - primitive(0.1))
    return _check("dynamics", "commuting-family", (seed, tol), operator_norm(res.operator - exact), 1e-8,
                  "time-ordered evolution of a commuting family equals the evolution at the integrated time")


def integrator_order_check(seed: int = 0) -> CheckRecord:
    """Observed convergence order of the midpoint-exponential propagator."""
    rng = np.random.default_rng([seed, 4])
    box = LatticeBox.chain(3)
    p1, p2 = _nonzero_interaction(rng), _nonzero_interaction(rng)
    psi = TimeDependentInteraction.from_breakpoints([0.0, 1.0], [p1, p2], "linear")
    ref = propagator(psi, box, 0.0, 1.0, 4096)
    steps = np.array([8, 16, 32, 64])
    errs = np.array([np.linalg.norm(propagator(psi, box, 0.0, 1.0, int(n)) - ref, 2) for n in steps])
    slope = -np.polyfit(np.log(steps), np.log(errs), 1)[0]
    return _check("dynamics", "integrator-order", (seed,), abs(slope - 2.0), 0.2,
                  f"error decays with order 2 in the step size (observed {slope:.3f})")


# ---------------------------------------------------------------------------
# Self-consistency, conservation
# ---------------------------------------------------------------------------

BCS_SCENARIO = {"hopping": {1: -0.5 * np.exp(0.3j), -1: -0.5 * np.exp(-0.3j)}, "mu": 0.0, "gamma": 1.0,
                "theta": 0.3}


def bcs_scenario_model() -> LongRangeModel:
    """BCS model with weak complex nearest-neighbour hopping used by the trend and solver checks."""
    return build_bcs(BCS_SCENARIO["hopping"], BCS_SCENARIO["mu"], BCS_SCENARIO["gamma"])


def bcs_pair_state(box: LatticeBox, theta: float = BCS_SCENARIO["theta"], phase: float = 0.0) -> DensityState:
    """Pure product of ``cos(theta)|0> + e^{i phase} sin(theta)|up down>`` on every site."""
    v = np.zeros(4, dtype=complex)
    v[0] = math.cos(theta)
    v[3] = math.sin(theta) * np.exp(1j * phase)
    return pure_state(box, product_vector(box, [v] * box.n_sites))


def picard_ratio(histories, floor: float) -> float:
    """Worst ``r_{k+1} / r_k`` over windows, for iterates past the first and above ``floor``."""
    worst = 0.0
    for h in histories:
        for a, b in zip(h[1:], h[2:]):
            if a > floor:
                worst = max(worst, b / a)
    return worst


def selfconsistency_suite(seed: int = 0, n_sites: int = 3, horizon: float = 1.0) -> list:
    """Picard contraction, Picard versus direct integration, cocycle and certificate on BCS."""
    m = bcs_scenario_model()
    box = LatticeBox.chain(n_sites, SPINFUL)
    rho = bcs_pair_state(box)
    cfg = SolverConfig()
    grid = np.linspace(0.0, horizon, 11)
    tp = solve_selfconsistency(m, rho, 0.0, grid, cfg, "picard")
    to = solve_selfconsistency(m, rho, 0.0, grid, cfg, "ode")
    key = (seed, n_sites, horizon)
    floor = 10 * cfg.integrator_tolerance
    out = [
        _check("selfconsistency", "picard-ratio", key, picard_ratio(tp.diagnostics["residual_history"], floor), 0.6,
               "successive Picard residuals shrink by at least 0.6 past the first iterate"),
        _check("selfconsistency", "picard-vs-ode", key, np.abs(tp.order_parameters - to.order_parameters).max(), 1e-7,
               "Picard and direct integration give the same order parameters"),
        _check("selfconsistency", "certificate", key, tp.diagnostics["certificate"], 1e-6,
               "the returned path is a fixed point of the order-parameter map"),
    ]
    half = 0.5 * horizon
    r1 = flow_apply(m, 0.0, half, [rho], cfg)[0]
    r2 = flow_apply(m, half, horizon, [r1], cfg)[0]
    r3 = flow_apply(m, 0.0, horizon, [rho], cfg)[0]
    out.append(_check("selfconsistency", "cocycle", key, np.abs(r2.matrix - r3.matrix).max(), 1e-6,
                      "flow from s to t equals flow from r to t after s to r"))
    out.append(_check("selfconsistency", "purity", key, abs(r3.purity() - 1.0), 1e-9,
                      "pure states stay pure under the mean-field flow"))
    out.append(_check("selfconsistency", "evenness", key, float(not r3.even), 0,
                      "even states stay even under the mean-field flow"))
    return out


def conservation_suite(seed: int = 0, n_sites: int = 3, horizon: float = 1.0) -> list:
    """Energy conservation of exact long-range dynamics and of the h-gradient flow."""
    m = bcs_scenario_model()
    box = LatticeBox.chain(n_sites, SPINFUL)
    rng = np.random.default_rng([seed, 5])
    rho = random_density(box, rng)
    H = local_hamiltonian(m, box).matrix
    E, V = np.linalg.eigh(H)
    e0 = np.einsum("ij,ji->", rho.matrix, H)
    drift = 0.0
    for t in np.linspace(0, horizon, 11):
        W = (V * np.exp(-1j * t * E)) @ V.conj().T
        rt = W @ rho.matrix @ W.conj().T
        drift = max(drift, abs(np.einsum("ij,ji->", rt, H) - e0))
    out = [_check("conservation", "exact-energy", (seed, n_sites), drift, 1e-10,
                  "exact long-range dynamics conserves the local Hamiltonian")]
    # the Picard fixed point is resolved to the integrator accuracy so that
    # both methods approximate the flow equally well
    cfg = SolverConfig(variant="h-gradient", tolerance=1e-12, integrator_tolerance=1e-12)
    pure = bcs_pair_state(box)
    h = classical_energy(m, box)
    for method in ("ode", "picard"):
        traj = solve_selfconsistency(m, pure, 0.0, np.linspace(0, horizon, 11), cfg, method)
        vals = np.array([h(r) for r in traj.states])
        out.append(_check("conservation", f"h-gradient-energy-{method}", (seed, n_sites, method),
                          np.abs(vals - vals[0]).max(), 10 * cfg.integrator_tolerance,
                          "the h-gradient flow conserves the classical energy"))
    return out


# ---------------------------------------------------------------------------
# Classical structure
# ---------------------------------------------------------------------------


def _random_function(rng, ops, degree_max=3) -> StateFunction:
    terms = []
    for _ in range(int(rng.integers(1, 4))):
        deg = int(rng.integers(1, degree_max + 1))
        terms.append((float(rng.normal()), tuple(ops[int(rng.integers(len(ops)))] for _ in range(deg))))
    return StateFunction(terms, ops[0].box)


def classical_suite(seed: int = 0, n_triples: int = 100, n_derivative: int = 10) -> list:
    """Poisson bracket identities and the Gateaux derivative against finite differences."""
    rng = np.random.default_rng([seed, 6])
    out = []
    box = LatticeBox.chain(3)
    for k in range(n_triples):
        ops = []
        for _ in range(4):
            A = _random_operator(rng, box, box.sites)
            ops.append(_unit(A + A.dag))
        f, g, h = (_random_function(rng, ops) for _ in range(3))
        rho = random_density(box, rng)
        key = (seed, k)
        fg, gf = poisson_bracket(f, g, rho), poisson_bracket(g, f, rho)
        scale = max(1.0, abs(fg))
        out.append(_check("classical", "antisymmetry", key, abs(fg + gf), 0, "{f,g} = -{g,f}", 1e-12 * scale))
        lhs = poisson_bracket(f, g * h, rho)
        rhs = poisson_bracket(f, g, rho) * h(rho) + g(rho) * poisson_bracket(f, h, rho)
        out.append(_check("classical", "biderivation", key, abs(lhs - rhs), 0, "{f,gh} = {f,g}h + g{f,h}",
                          1e-12 * max(1.0, abs(lhs))))
        j1 = poisson_bracket(f, bracket_function(g, h), rho)
        j2 = poisson_bracket(g, bracket_function(h, f), rho)
        j3 = poisson_bracket(h, bracket_function(f, g), rho)
        out.append(_check("classical", "jacobi", key, abs(j1 + j2 + j3), 0, "Jacobi identity",
                          1e-12 * max(1.0, abs(j1), abs(j2), abs(j3))))
        out.append(_check("classical", "reality", key, abs(fg.imag), 0,
                          "brackets of real functions of self-adjoint elements are real", 1e-12 * scale))
    for k in range(n_derivative):
        ops = [_unit(_random_operator(rng, box, box.sites)) for _ in range(3)]
        f = _random_function(rng, ops)
        rho, sigma = random_density(box, rng), random_density(box, rng)
        exact = expect(sigma, gateaux_derivative(f, rho))

        def fd(eps):
            mix = DensityState(box, (1 - eps) * rho.matrix + eps * sigma.matrix, validate=False)
            return (f(mix) - f(rho)) / eps

        eps = 1e-3
        e1, e2 = abs(fd(eps) - exact), abs(fd(eps / 2) - exact)
        rich = abs(2 * fd(eps / 2) - fd(eps) - exact)
        key = (seed, "fd", k)
        if e2 < 1e-9:
            # f is affine along this segment, the quotient is exact
            out.append(_check("classical", "gateaux-affine", key, e1, 0, "difference quotient is exact", 1e-9))
            continue
        out.append(_check("classical", "gateaux-first-order", key, abs(math.log2(e1 / e2) - 1.0), 0.1,
                          "forward differences converge with order one to the derivative"))
        out.append(_check("classical", "gateaux-richardson", key, rich, 0.1 * e2,
                          "one Richardson step removes the first-order error"))
    return out


# ---------------------------------------------------------------------------
# Convergence trends
# ---------------------------------------------------------------------------


def energy_density_trend(seed: int = 0, radii=(2, 4, 8)) -> CheckRecord:
    """Gap between boxed energy density and the energy-per-site observable halves as the box doubles."""
    psi = np.zeros(4)
    psi[1] = psi[2] = 1 / np.sqrt(2)
    cell = np.outer(psi, psi)
    scan = energy_density_scan(lambda b: product_state(b, [cell]), hopping_interaction(), 2,
                               [LatticeBox.cube(1, L) for L in radii])
    gaps = [abs(g) for g in scan.gaps]
    ratios = [a / b for a, b in zip(gaps, gaps[1:])]
    dev = max(abs(r - 2.0) / 2.0 for r in ratios)
    return _check("trends", "energy-density-gap", (seed, tuple(radii)), dev, 0.25,
                  f"energy-density gap halves when L doubles (ratios {', '.join(f'{r:.3f}' for r in ratios)})")


def _n0up(box):
    return instantiate(LocalPolynomial.number((0,), "up"), box)


def liouville_trend(seed: int = 0, sizes=(2, 3, 4), t: float = 0.5) -> CheckRecord:
    """Liouville residual of the e-density flow on BCS decreases along the ladder."""
    res = liouville_residual(bcs_scenario_model(), lambda b: StateFunction.affine(_n0up(b)), bcs_pair_state, t,
                             [LatticeBox.chain(n, SPINFUL) for n in sizes])
    worst = max(b / a for a, b in zip(res.values, res.values[1:]))
    return _check("trends", "liouville-residual", (seed, tuple(sizes), t), worst, 1.0,
                  f"Liouville residual strictly decreases ({', '.join(f'{v:.3e}' for v in res.values)})",
                  strict=True)


def meanfield_trend(seed: int = 0, sizes=(2, 3, 4, 5), t: float = 0.5) -> CheckRecord:
    """Mean-field versus exact dynamics gap decreases along the ladder."""
    res = meanfield_vs_exact(bcs_scenario_model(), bcs_pair_state, _n0up, t,
                             [LatticeBox.chain(n, SPINFUL) for n in sizes])
    worst = max(b / a for a, b in zip(res.values, res.values[1:]))
    return _check("trends", "meanfield-vs-exact", (seed, tuple(sizes), t), worst, 1.0,
                  f"mean-field versus exact gap strictly decreases ({', '.join(f'{v:.3e}' for v in res.values)})",
                  strict=True)


def probe_trend(seed: int = 0, radii=(1, 2, 3, 4), t: float = 0.5) -> list:
    """Long-range dynamics of the number-squared model does not converge, a short-range control does."""
    boxes = [LatticeBox.cube(1, r) for r in radii]
    pr = nonconvergence_probe(boxes, t, control=hopping_interaction())
    first = pr.consecutive[0]
    key = (seed, tuple(radii), t)
    ctrl = pr.control_consecutive
    return [
        _check("trends", "probe-non-convergence", key, first / 2, min(pr.consecutive),
               "distances between consecutive rungs stay above half the first one"),
        _check("trends", "probe-control-decreasing", key, max(b / a for a, b in zip(ctrl, ctrl[1:])), 1.0,
               "short-range control distances decrease along the ladder", strict=True),
        _check("trends", "probe-remainder", key, max(pr.remainders), pr.remainder_bound,
               "remainder of the number-squared evolution is at most 2 t^2", 1e-12),
    ]


def trends_suite(seed: int = 0) -> list:
    return [energy_density_trend(seed), liouville_trend(seed), meanfield_trend(seed)] + probe_trend(seed)


SUITES: dict[str, Callable[..., list]] = {
    "algebra": algebra_suite,
    "bounds": bounds_suite,
    "dynamics": dynamics_suite,
    "selfconsistency": selfconsistency_suite,
    "conservation": conservation_suite,
    "classical": classical_suite,
    "trends": trends_suite,
}


def verify(suite: str | None = None, seed: int = 0, **options) -> VerificationReport:
    """Run one suite (or all of them) and collect the records.

    Parameters
    ----------
    suite : str, optional
        Key of :data:`SUITES`; all suites when omitted.
    seed : int
    options
        Forwarded to the suite function (only with a single suite).
    """
    names = [suite] if suite else list(SUITES)
    report = VerificationReport()
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
        start = time.perf_counter()
        report.records.extend(SUITES[name](seed, **(options if suite else {})))
        report.timings[name] = time.perf_counter() - start
    return report
