"""Self-consistent mean-field dynamics of long-range models on a box.

The unknowns of the self-consistency problem are the finitely many order
parameters ``c_k(t) = xi_t(O_k)``, one per interaction appearing in an atom
tuple.  ``O_k`` is the energy-per-site observable of that interaction
(``e-density`` variant) or its boxed energy divided by the volume
(``h-gradient`` variant).  Given order-parameter paths, the effective
Hamiltonian

    H(t) = U^{phi(t)} + sum_atoms w(t) sum_m U^{psi_m} prod_{j != m} c_j(t)

generates a linear evolution ``rho_t = U(t,s) rho U(t,s)*``.  States are
propagated as ensembles ``rho = X diag(w) X*`` so pure states cost a single
vector.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

from .dynamics import Schedule, TimeDependentInteraction, _as_schedule
from .errors import ConvergenceError, DomainError, IntegrationError
from .fock import FockOperator, LatticeBox, instantiate, operator_norm
from .interactions import (
    DecayFunction,
    Interaction,
    LongRangeModel,
    _as_period,
    _default_anchor,
    _energy_sparse,
    energy_per_site_poly,
    lattice_convolution_constant,
    lattice_norm_one,
    local_hamiltonian,
    model_norm,
    w_norm,
)
from .statespace import (
    DensityState,
    StateFunction,
    classical_energy_derivative,
    expect,
    gateaux_derivative,
)

log = logging.getLogger(__name__)

VARIANTS = ("e-density", "h-gradient")
NORMALIZATION_LIMIT = 1e-6
# The integrator controls the local error per step; the accumulated error over
# a trajectory is typically about ten times larger, so steps are controlled a
# decade below the requested accuracy.
STEP_SAFETY = 0.1


# ---------------------------------------------------------------------------
# Configuration and results
# ---------------------------------------------------------------------------


@dataclass
class SolverConfig:
    """Parameters of the self-consistency solvers.

    Attributes
    ----------
    tolerance : float
        Stop the Picard iteration once successive order-parameter paths
        differ by less than this (sup over the window samples).
    max_iterations : int
        Picard iterations allowed per window.
    window : float, optional
        Override of the contraction window length.
    integrator_tolerance : float
        Requested accuracy of integrated trajectories; the per-step error
        control runs ``STEP_SAFETY`` below it.
    variant : {"e-density", "h-gradient"}
    period : int or tuple
        Period ``ell`` of the energy-per-site observables.
    window_samples : int
        Sample points per window for residuals.
    max_window : float
        Cap returned by the window computation for models without atoms.
    """

    tolerance: float = 1e-10
    max_iterations: int = 50
    window: float | None = None
    integrator_tolerance: float = 1e-12
    variant: str = "e-density"
    period: object = 1
    window_samples: int = 9
    max_window: float = 1.0
    convolution_constant: float | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}")


@dataclass
class Trajectory:
    """Solution of the self-consistency equations on a time grid.

    Attributes
    ----------
    times : ndarray
    states : list of DensityState
    order_parameters : ndarray, shape (len(times), n_params), complex
    labels : list of str
    diagnostics : dict
        ``windows``, ``iterations``, ``residual_history``, ``final_residuals``,
        ``certificate``, ``window_length``, ``method``, ``variant``.
    """

    times: np.ndarray
    states: list
    order_parameters: np.ndarray
    labels: list
    diagnostics: dict = field(default_factory=dict)

    def observable(self, A: FockOperator) -> np.ndarray:
        return np.array([expect(r, A) for r in self.states])


# ---------------------------------------------------------------------------
# Time-dependent models
# ---------------------------------------------------------------------------


class ModelSchedule:
    """Long-range model with time-dependent short-range part and atom weights.

    Parameters
    ----------
    model : LongRangeModel
        Supplies the atoms and the decay function.  Its ``phi`` is used when
        ``phi`` is not given.
    phi : TimeDependentInteraction, optional
    weights : sequence of schedules, optional
        One multiplier schedule per atom of ``model`` (applied to the weight).
    """

    def __init__(self, model: LongRangeModel, phi: TimeDependentInteraction | None = None,
                 weights: Sequence | None = None):
        self.model = model
        self.phi = phi if phi is not None else TimeDependentInteraction.constant(model.phi)
        if weights is None:
            weights = [1.0] * len(model.atoms)
        if len(weights) != len(model.atoms):
            raise DomainError("one weight schedule per atom is required")
        self.weights = tuple(_as_schedule(w) for w in weights)

    @classmethod
    def wrap(cls, m) -> "ModelSchedule":
        return m if isinstance(m, ModelSchedule) else cls(m)

    @property
    def atoms(self):
        return self.model.atoms

    @property
    def breakpoints(self) -> tuple:
        out = set(self.phi.breakpoints)
        for w in self.weights:
            out.update(w.breakpoints)
        return tuple(sorted(out))

    def atom_weights(self, t: float, side: str = "right") -> np.ndarray:
        return np.array([a.weight * w(t, side) for a, w in zip(self.model.atoms, self.weights)])

    def at(self, t: float, side: str = "right") -> LongRangeModel:
        phi = self.phi.at(t, side)
        m = self.model.with_phi(phi if phi is not None else Interaction())
        return m.with_weights(self.atom_weights(t, side))

    def sup_norm(self) -> float:
        """Max of the model norm over breakpoints (both one-sided values)."""
        times = self.breakpoints or (0.0,)
        return max(max(model_norm(self.at(t, "left")), model_norm(self.at(t, "right"))) for t in times)

    def is_autonomous(self) -> bool:
        return not self.breakpoints and all(isinstance(w, Schedule) for w in self.weights) and all(
            isinstance(c, Schedule) for c in self.phi.coefficients
        )


# ---------------------------------------------------------------------------
# Symbolic pieces
# ---------------------------------------------------------------------------


def floor_bracket(rho: DensityState, interactions: Sequence[Interaction], ell, box: LatticeBox | None = None,
                  anchor=None) -> Interaction:
    """``sum_m psi_m prod_{j != m} rho(e_{psi_j, ell})``; returns ``psi`` for a single entry."""
    box = box or rho.box
    if len(interactions) == 1:
        return interactions[0]
    vals = []
    for psi in interactions:
        poly = energy_per_site_poly(psi, ell)
        a = anchor if anchor is not None else _default_anchor(poly.support, box, _as_period(ell, box.dimension))
        vals.append(rho.expect_poly(poly, a))
    out = None
    for m, psi in enumerate(interactions):
        coef = complex(np.prod([v for j, v in enumerate(vals) if j != m]))
        term = psi * coef
        out = term if out is None else out + term
    return out


class ApproximatingInteraction:
    """``t -> phi(t) + sum_atoms w(t) floor(xi(t); tuple)`` for a state path ``xi``."""

    def __init__(self, model, xi: Callable[[float], DensityState], ell=1, box: LatticeBox | None = None):
        self.model = ModelSchedule.wrap(model)
        self.xi = xi
        self.ell = ell
        self.box = box

    def at(self, t: float) -> Interaction:
        rho = self.xi(t)
        out = self.model.phi.at(t)
        for w, a in zip(self.model.atom_weights(t), self.model.atoms):
            out = out + floor_bracket(rho, a.interactions, self.ell, self.box or rho.box) * w
        return out

    def __call__(self, t: float) -> Interaction:
        return self.at(t)


def approximating_interaction(model, xi: Callable[[float], DensityState], ell=1,
                              box: LatticeBox | None = None) -> ApproximatingInteraction:
    """Effective short-range interaction along a state path (see :class:`ApproximatingInteraction`)."""
    return ApproximatingInteraction(model, xi, ell, box)


def contraction_window(norm: float, volume: float, f1: float, D: float, cap: float = 1.0) -> float:
    """Largest ``T`` with ``T <= exp(-4 D T norm) / (8 volume f1 norm)``.

    Returns ``cap`` when ``norm`` is zero.
    """
    if norm == 0:
        return cap
    if min(volume, f1, D, norm) <= 0:
        raise DomainError("window inputs must be positive")
    c = 8 * volume * f1 * norm

    def g(T):
        return T - math.exp(-4 * D * T * norm) / c

    return bisect(g, 0.0, 1.0 / c, xtol=1e-13, rtol=4 * np.finfo(float).eps)


# ---------------------------------------------------------------------------
# Numerical core
# ---------------------------------------------------------------------------


class MeanFieldSystem:
    """Sparse matrices and order-parameter observables of a model on a box.

    Parameters
    ----------
    model : LongRangeModel or ModelSchedule
    box : LatticeBox
    variant : {"e-density", "h-gradient"}
    ell : period of the energy-per-site observables
    """

    def __init__(self, model, box: LatticeBox, variant: str = "e-density", ell=1, anchor=None):
        if variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}")
        self.schedule = ModelSchedule.wrap(model)
        self.box = box
        self.variant = variant
        self.ell = _as_period(ell, box.dimension)
        comps = self.schedule.phi.components
        self.phi_mats = [_energy_sparse(c, box).tocsr() for c in comps]
        # distinct interactions in atom tuples
        self.keys: list = []
        self.atom_index: list = []
        for a in self.schedule.atoms:
            idx = []
            for psi in a.interactions:
                for k, other in enumerate(self.keys):
                    if other is psi or other.isclose(psi, 1e-13):
                        idx.append(k)
                        break
                else:
                    self.keys.append(psi)
                    idx.append(len(self.keys) - 1)
            self.atom_index.append(idx)
        self.energies = [_energy_sparse(psi, box).tocsr() for psi in self.keys]
        self.observables = []
        self.labels = []
        support = set()
        for k, psi in enumerate(self.keys):
            name = psi.name or f"psi{k}"
            if variant == "e-density":
                poly = energy_per_site_poly(psi, self.ell)
                a = anchor if anchor is not None else _default_anchor(poly.support, box, self.ell)
                op = instantiate(poly, box, a)
                support |= set(op.support)
                self.observables.append(sp.csr_matrix(op.matrix))
                self.labels.append(f"e[{name}]")
            else:
                self.observables.append(self.energies[k] / box.n_sites)
                self.labels.append(f"U[{name}]/V")
                support |= set(box.sites)
        self.support = frozenset(support)

    @property
    def n_params(self) -> int:
        return len(self.keys)

    def scalars(self, X: np.ndarray, w: np.ndarray) -> np.ndarray:
        out = np.empty(len(self.observables), dtype=complex)
        for k, O in enumerate(self.observables):
            out[k] = ((X.conj() * (O @ X)).sum(axis=0)) @ w
        return out

    def coefficients(self, t: float, c: np.ndarray) -> tuple:
        """Coefficients of the short-range components and of each ``U^{psi_k}``."""
        phi_c = self.schedule.phi.coefficients_at(t)
        key_c = np.zeros(len(self.keys), dtype=complex)
        for w, idx in zip(self.schedule.atom_weights(t), self.atom_index):
            for m, k in enumerate(idx):
                prod = 1.0 + 0j
                for j, kk in enumerate(idx):
                    if j != m:
                        prod *= c[kk]
                key_c[k] += w * prod
        return phi_c, key_c

    def apply_h(self, t: float, c: np.ndarray, X: np.ndarray) -> np.ndarray:
        phi_c, key_c = self.coefficients(t, c)
        out = np.zeros_like(X)
        for a, M in zip(phi_c, self.phi_mats):
            if a != 0:
                out += a * (M @ X)
        for a, M in zip(key_c, self.energies):
            if a != 0:
                out += a * (M @ X)
        return out

    def hamiltonian(self, t: float, c: np.ndarray) -> np.ndarray:
        phi_c, key_c = self.coefficients(t, c)
        H = np.zeros((self.box.fock_dim,) * 2, dtype=complex)
        for a, M in zip(phi_c, self.phi_mats):
            if a != 0:
                H += a * M.toarray()
        for a, M in zip(key_c, self.energies):
            if a != 0:
                H += a * M.toarray()
        return H


def _windows(s: float, end: float, T: float, breakpoints: Sequence[float]) -> list:
    """Consecutive intervals from ``s`` to ``end`` of length at most ``T``,
    also cut at breakpoints."""
    if s == end:
        return []
    direction = 1.0 if end > s else -1.0
    length = abs(end - s)
    n = max(1, math.ceil(length / T - 1e-12))
    edges = {s + direction * length * k / n for k in range(n + 1)}
    edges |= {b for b in breakpoints if min(s, end) < b < max(s, end)}
    edges = sorted(edges, reverse=direction < 0)
    return list(zip(edges[:-1], edges[1:]))


def _step_tolerance(cfg: SolverConfig) -> float:
    return max(cfg.integrator_tolerance * STEP_SAFETY, 2.3e-14)


def _ivp(fun, a, b, y0, rtol, atol, dense=True, t_eval=None):
    sol = solve_ivp(fun, (a, b), y0, method="DOP853", rtol=rtol, atol=atol, dense_output=dense, t_eval=t_eval)
    if not sol.success:
        raise IntegrationError(f"ODE integration failed on [{a}, {b}]: {sol.message}")
    return sol


class _PathFunction:
    """Piecewise order-parameter path assembled from per-window dense outputs."""

    def __init__(self, direction: float):
        self.direction = direction
        self.pieces: list = []  # (a, b, callable)

    def add(self, a, b, fn):
        self.pieces.append((a, b, fn))

    def __call__(self, t):
        for a, b, fn in self.pieces:
            lo, hi = min(a, b), max(a, b)
            if lo - 1e-14 <= t <= hi + 1e-14:
                return fn(t)
        raise DomainError(f"time {t} outside the solved horizon")


def _window_length(system: MeanFieldSystem, cfg: SolverConfig) -> float:
    if cfg.window is not None:
        warnings.warn("using a user supplied window instead of the contraction bound", stacklevel=3)
        return cfg.window
    sched = system.schedule
    if not sched.atoms:
        return cfg.max_window
    F = sched.model.decay
    f1 = lattice_norm_one(F)
    D = cfg.convolution_constant
    if D is None:
        if F.dimension != 1:
            raise DomainError("set SolverConfig.convolution_constant for lattices of dimension > 1")
        D = lattice_convolution_constant(F)
    vol = len(system.support) if system.variant == "e-density" else system.box.n_sites
    return min(cfg.max_window, contraction_window(sched.sup_norm(), vol, f1, D, cfg.max_window))


def _check_grid(s, t_grid):
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise DomainError("time grid must be a non-empty 1-d sequence")
    d = np.diff(t_grid)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise DomainError("time grid must be strictly monotone")
    if np.any((t_grid - s) * (t_grid[-1] - s) < 0):
        raise DomainError("all grid times must lie on one side of the initial time")
    return t_grid


def solve_selfconsistency(model, rho0: DensityState, s: float, t_grid, cfg: SolverConfig | None = None,
                          method: str = "picard") -> Trajectory:
    """Solve the self-consistency equations from ``(s, rho0)`` over ``t_grid``.

    Parameters
    ----------
    model : LongRangeModel or ModelSchedule
    rho0 : DensityState
    s : float
        Initial time.
    t_grid : sequence of float
        Monotone output times on one side of ``s``.
    cfg : SolverConfig
    method : {"picard", "ode"}
        ``picard`` iterates the order-parameter map on consecutive
        contraction windows; ``ode`` integrates the nonlinear equation
        ``d rho/dt = -i[H(t, rho), rho]`` directly.

    Raises
    ------
    ConvergenceError
        When a window needs more than ``cfg.max_iterations`` iterations.
    IntegrationError
        When the integrator fails or the ensemble loses orthonormality by
        more than ``NORMALIZATION_LIMIT``.
    """
    cfg = cfg or SolverConfig()
    if method not in ("picard", "ode"):
        raise DomainError("method must be 'picard' or 'ode'")
    t_grid = _check_grid(s, t_grid)
    box = rho0.box
    system = MeanFieldSystem(model, box, cfg.variant, cfg.period)
    X0, w = rho0.ensemble()
    X0 = np.array(X0, dtype=complex)
    shape = X0.shape
    end = float(t_grid[-1]) if abs(t_grid[-1] - s) >= abs(t_grid[0] - s) else float(t_grid[0])
    rtol = atol = _step_tolerance(cfg)
    start_clock = time.perf_counter()
    diag = {"method": method, "variant": cfg.variant, "windows": [], "iterations": [],
            "residual_history": [], "final_residuals": []}
    path = _PathFunction(1.0 if end >= s else -1.0)
    states_at: dict = {}
    no_atoms = system.n_params == 0

    def grid_points(a, b):
        lo, hi = min(a, b), max(a, b)
        return [t for t in t_grid if lo <= t <= hi]

    if method == "ode" or no_atoms:
        segs = _windows(s, end, abs(end - s) or 1.0, system.schedule.breakpoints) if end != s else []
        X = X0
        for a, b in segs:
            def rhs(t, y):
                Y = y.reshape(shape)
                c = system.scalars(Y, w)
                return (-1j * system.apply_h(t, c, Y)).ravel()

            sol = _ivp(rhs, a, b, X.ravel(), rtol, atol)
            path.add(a, b, _scalar_path(system, sol, shape, w))
            for t in grid_points(a, b):
                states_at[t] = sol.sol(t).reshape(shape)
            X = sol.y[:, -1].reshape(shape)
            diag["windows"].append((a, b))
            diag["iterations"].append(1)
        diag["window_length"] = abs(end - s)
    else:
        T = _window_length(system, cfg)
        diag["window_length"] = T
        X = X0
        for a, b in _windows(s, end, T, system.schedule.breakpoints):
            sol, hist = _picard_window(system, X, w, a, b, cfg)
            path.add(a, b, _scalar_path(system, sol, shape, w))
            for t in grid_points(a, b):
                states_at[t] = sol.sol(t).reshape(shape)
            X = sol.y[:, -1].reshape(shape)
            diag["windows"].append((a, b))
            diag["iterations"].append(len(hist))
            diag["residual_history"].append(hist)
            diag["final_residuals"].append(hist[-1] if hist else 0.0)
    # grid points equal to s
    for t in t_grid:
        if t == s:
            states_at[t] = X0
    states = []
    params = np.zeros((len(t_grid), system.n_params), dtype=complex)
    norm_error = 0.0
    for i, t in enumerate(t_grid):
        Y = states_at[t]
        norm_error = max(norm_error, _orthonormality_error(Y, len(w)))
        states.append(DensityState(box, ensemble=(Y, w), validate=False))
        params[i] = system.scalars(Y, w)
    diag["normalization_error"] = norm_error
    diag["certificate"] = _certificate(system, X0, w, s, end, path, diag["windows"], cfg) if end != s else 0.0
    diag["wall_time"] = time.perf_counter() - start_clock
    return Trajectory(t_grid, states, params, list(system.labels), diag)


def _orthonormality_error(Y, rank):
    """Deviation of the propagated ensemble from orthonormality.

    States ``X diag(w) X*`` are positive by construction, so the only way the
    integrator can spoil them is by drifting off the unitary orbit.
    """
    gram = Y.conj().T @ Y
    err = float(np.max(np.abs(gram - np.eye(rank)), initial=0.0))
    if err > NORMALIZATION_LIMIT:
        raise IntegrationError(f"propagated state lost normalization (error {err:.2e})", {"error": err})
    return err


def _scalar_path(system, sol, shape, w):
    def fn(t):
        return system.scalars(sol.sol(t).reshape(shape), w)

    return fn


def _picard_window(system: MeanFieldSystem, X: np.ndarray, w: np.ndarray, a: float, b: float,
                   cfg: SolverConfig):
    """Fixed-point iteration of the order parameters on one window."""
    shape = X.shape
    rtol = atol = _step_tolerance(cfg)
    samples = np.linspace(a, b, cfg.window_samples)
    c_a = system.scalars(X, w)
    current = lambda t: c_a  # noqa: E731  (initial guess: frozen order parameters)
    prev_vals = np.array([c_a] * len(samples))
    hist = []
    for _ in range(cfg.max_iterations):
        guess = current

        def rhs(t, y, guess=guess):
            return (-1j * system.apply_h(t, guess(t), y.reshape(shape))).ravel()

        sol = _ivp(rhs, a, b, X.ravel(), rtol, atol)
        new_vals = np.array([system.scalars(sol.sol(t).reshape(shape), w) for t in samples])
        res = float(np.max(np.abs(new_vals - prev_vals))) if len(new_vals[0]) else 0.0
        hist.append(res)
        if res < cfg.tolerance:
            return sol, hist
        current = _scalar_path(system, sol, shape, w)
        prev_vals = new_vals
    raise ConvergenceError(f"Picard iteration did not converge on [{a}, {b}]", hist)


def _certificate(system, X0, w, s, end, path, windows, cfg) -> float:
    """Residual of one explicit evaluation of the fixed-point map on the full horizon."""
    if system.n_params == 0:
        return 0.0
    shape = X0.shape
    rtol = atol = _step_tolerance(cfg)
    X = X0
    worst = 0.0
    for a, b in windows:
        def rhs(t, y):
            return (-1j * system.apply_h(t, path(t), y.reshape(shape))).ravel()

        sol = _ivp(rhs, a, b, X.ravel(), rtol, atol)
        for t in np.linspace(a, b, cfg.window_samples):
            new = system.scalars(sol.sol(t).reshape(shape), w)
            worst = max(worst, float(np.max(np.abs(new - path(t)))))
        X = sol.y[:, -1].reshape(shape)
    return worst


# ---------------------------------------------------------------------------
# Flows and classical evolutions
# ---------------------------------------------------------------------------


def flow_apply(model, s: float, t: float, states: Sequence[DensityState], cfg: SolverConfig | None = None,
               method: str = "picard") -> list:
    """Map each initial state ``rho`` to ``varpi(s, t; rho)``."""
    out = []
    for rho in states:
        if s == t:
            out.append(rho)
            continue
        traj = solve_selfconsistency(model, rho, s, [t], cfg, method)
        out.append(traj.states[-1])
    return out


def classical_evolution(model, f: StateFunction, s: float, t: float, rho: DensityState,
                        cfg: SolverConfig | None = None, method: str = "picard") -> complex:
    """``f(varpi(s, t; rho))``."""
    return f(flow_apply(model, s, t, [rho], cfg, method)[0])


# ---------------------------------------------------------------------------
# Convergence diagnostics
# ---------------------------------------------------------------------------


@dataclass
class LadderResult:
    sizes: list
    values: list
    details: list = field(default_factory=list)

    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.values, self.values[1:]))


def _effective_hamiltonian(system: MeanFieldSystem, t: float, X, w) -> np.ndarray:
    return system.hamiltonian(t, system.scalars(X, w))


def liouville_residual(model: LongRangeModel, f: Callable[[LatticeBox], StateFunction],
                       rho: Callable[[LatticeBox], DensityState], t: float, boxes: Sequence[LatticeBox],
                       cfg: SolverConfig | None = None, step: float = 1e-4, method: str = "ode") -> LadderResult:
    """``|d/dt f(rho_t) - {h_L, f}(rho_t)|`` along a ladder of boxes.

    The time derivative is a Richardson-refined central difference with
    step ``step``; the bracket uses the derivative of the classical energy
    at the evolved state.

    Parameters
    ----------
    f : callable box -> StateFunction
    rho : callable box -> DensityState
        Initial state at time 0 for each rung.
    """
    cfg = cfg or SolverConfig()
    values, details = [], []
    for box in boxes:
        fun = f(box)
        rho0 = rho(box)
        times = [t - step, t - step / 2, t, t + step / 2, t + step]
        traj = solve_selfconsistency(model, rho0, 0.0, times, cfg, method)
        vals = [fun(r) for r in traj.states]
        d1 = (vals[4] - vals[0]) / (2 * step)
        d2 = (vals[3] - vals[1]) / step
        deriv = (4 * d2 - d1) / 3
        rho_t = traj.states[2]
        Dh = classical_energy_derivative(ModelSchedule.wrap(model).at(t), box, rho_t).matrix
        Df = gateaux_derivative(fun, rho_t).matrix
        bracket = complex(1j * np.einsum("ij,ji->", rho_t.matrix, Dh @ Df - Df @ Dh))
        values.append(abs(deriv - bracket))
        details.append({"derivative": deriv, "bracket": bracket})
    return LadderResult([b.n_sites for b in boxes], values, details)


def meanfield_vs_exact(model: LongRangeModel, rho: Callable[[LatticeBox], DensityState],
                       A: Callable[[LatticeBox], FockOperator], t: float, boxes: Sequence[LatticeBox],
                       cfg: SolverConfig | None = None, method: str = "ode") -> LadderResult:
    """``|rho(tau_t^{(L)}(A)) - varpi(0, t; rho)(A)|`` along a ladder of boxes.

    The exact side uses the eigendecomposition of the local Hamiltonian of
    the long-range model; the mean-field side solves the self-consistency
    equations on the same box.
    """
    cfg = cfg or SolverConfig()
    values, details = [], []
    for box in boxes:
        rho0 = rho(box)
        obs = A(box)
        H = local_hamiltonian(model, box).matrix
        E, V = np.linalg.eigh((H + H.conj().T) / 2)
        X, w = rho0.ensemble()
        Xt = V @ (np.exp(-1j * t * E)[:, None] * (V.conj().T @ X))
        exact = complex(((Xt.conj() * (obs.matrix @ Xt)).sum(axis=0)) @ w)
        if t == 0:
            mf = expect(rho0, obs)
        else:
            traj = solve_selfconsistency(model, rho0, 0.0, [t], cfg, method)
            mf = expect(traj.states[-1], obs)
        values.append(abs(exact - mf))
        details.append({"exact": exact, "meanfield": mf})
    return LadderResult([b.n_sites for b in boxes], values, details)
