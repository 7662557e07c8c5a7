"""Finite-volume derivations and Heisenberg dynamics, with bound verifiers.

Convention for non-autonomous evolutions
----------------------------------------
The Schrödinger propagator solves ``d/dt U(t,s) = -i H(t) U(t,s)`` with
``U(s,s) = 1`` and observables evolve as ``tau_{t,s}(A) = U(t,s)* A U(t,s)``.
Differentiating in ``t`` gives

    d/dt tau_{t,s}(A) = U* (i H(t) A - i A H(t)) U = tau_{t,s}(i[H(t), A]),

that is ``d/dt tau_{t,s} = tau_{t,s} o delta^{Psi(t)}`` with the derivation
``delta(A) = i[H, A]``.  From ``U(t,s) = U(t,r) U(r,s)`` one obtains the
reverse cocycle ``tau_{t,s} = tau_{r,s} o tau_{t,r}``.  For a constant
Hamiltonian ``tau_{t,s}(A) = exp(i(t-s)H) A exp(-i(t-s)H)``, matching the
autonomous group.
"""

from __future__ import annotations

import math
import numbers
import time
import weakref
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .errors import DomainError, IntegrationError
from .fock import FockOperator, LatticeBox, instantiate, operator_norm
from .interactions import (
    DecayFunction,
    Interaction,
    LongRangeModel,
    _energy_sparse,
    _region_box,
    _shift,
    convolution_constant,
    decay_norm_one,
    lattice_convolution_constant,
    local_hamiltonian,
    w_norm,
)

# ---------------------------------------------------------------------------
# Schedules and time-dependent interactions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Real coefficient given at breakpoints.

    Parameters
    ----------
    times : sequence of float
        Strictly increasing breakpoints.
    values : sequence of float
        Value at each breakpoint.
    rule : {"piecewise", "linear"}
        ``piecewise`` holds ``values[k]`` on ``[times[k], times[k+1])`` (the
        last value extends to infinity, the first to minus infinity);
        ``linear`` interpolates and is constant outside the table.
    """

    times: tuple
    values: tuple
    rule: str = "piecewise"

    def __post_init__(self):
        t = tuple(float(v) for v in self.times)
        v = tuple(float(x) for x in self.values)
        if not t or len(t) != len(v):
            raise DomainError("a schedule needs matching non-empty times and values")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise DomainError("schedule times must be strictly increasing")
        if self.rule not in ("piecewise", "linear"):
            raise DomainError(f"unknown interpolation rule {self.rule!r}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value: float) -> "Schedule":
        return cls((0.0,), (float(value),), "piecewise")

    @property
    def breakpoints(self) -> tuple:
        if self.rule == "piecewise":
            return self.times[1:]
        return self.times if len(self.times) > 1 else ()

    def __call__(self, t: float, side: str = "right") -> float:
        if self.rule == "linear":
            return float(np.interp(t, self.times, self.values))
        idx = np.searchsorted(self.times, t, side="right" if side == "right" else "left") - 1
        return self.values[max(int(idx), 0)]

    def sup_abs(self) -> float:
        return max(abs(v) for v in self.values)


@dataclass(frozen=True)
class FunctionSchedule:
    """Coefficient given by a smooth callable, with optional breakpoints."""

    func: Callable
    breakpoints: tuple = ()

    def __call__(self, t: float, side: str = "right") -> float:
        return float(self.func(t))


def _as_schedule(c):
    if isinstance(c, (Schedule, FunctionSchedule)):
        return c
    if isinstance(c, numbers.Real):
        return Schedule.constant(float(c))
    if callable(c):
        return FunctionSchedule(c)
    raise DomainError(f"cannot interpret {c!r} as a coefficient schedule")


class TimeDependentInteraction:
    """Interaction ``Psi(t) = sum_k c_k(t) Psi_k`` with real coefficients.

    Parameters
    ----------
    components : sequence of Interaction
        Self-adjoint building blocks.
    coefficients : sequence of Schedule, FunctionSchedule, callable or float
        One real coefficient per component.
    """

    def __init__(self, components: Sequence[Interaction], coefficients: Sequence):
        if len(components) != len(coefficients):
            raise DomainError("one coefficient schedule per component is required")
        for c in components:
            if not c.is_self_adjoint(1e-10):
                raise DomainError(f"component {c!r} is not self-adjoint")
        self.components = tuple(components)
        self.coefficients = tuple(_as_schedule(c) for c in coefficients)
        self._ham_cache: dict = {}
        self._wnorm_cache: dict = {}

    @classmethod
    def constant(cls, phi: Interaction) -> "TimeDependentInteraction":
        return cls([phi], [1.0])

    @classmethod
    def from_breakpoints(cls, times: Sequence[float], interactions: Sequence[Interaction],
                         rule: str = "piecewise") -> "TimeDependentInteraction":
        """Schedule of interactions given at breakpoints.

        ``piecewise`` holds ``interactions[k]`` on ``[times[k], times[k+1])``;
        ``linear`` interpolates linearly between consecutive interactions.
        """
        n = len(interactions)
        coefs = []
        for k in range(n):
            values = [1.0 if j == k else 0.0 for j in range(n)]
            coefs.append(Schedule(tuple(times), tuple(values), rule))
        return cls(interactions, coefs)

    @property
    def breakpoints(self) -> tuple:
        out = set()
        for c in self.coefficients:
            out.update(c.breakpoints)
        return tuple(sorted(out))

    def coefficients_at(self, t: float, side: str = "right") -> np.ndarray:
        return np.array([c(t, side) for c in self.coefficients], dtype=float)

    def at(self, t: float, side: str = "right") -> Interaction:
        out = None
        for c, comp in zip(self.coefficients_at(t, side), self.components):
            term = comp * float(c)
            out = term if out is None else out + term
        return out

    def _component_matrices(self, box: LatticeBox, region=None) -> list:
        key = (box, None if region is None else _region_box(box, region).sites)
        mats = self._ham_cache.get(key)
        if mats is None:
            mats = [_energy_sparse(c, box, region).toarray() for c in self.components]
            self._ham_cache[key] = mats
        return mats

    def hamiltonian(self, box: LatticeBox, t: float, region=None, side: str = "right") -> np.ndarray:
        """Dense ``U^{Psi(t)}`` on ``box`` (terms restricted to ``region``)."""
        mats = self._component_matrices(box, region)
        c = self.coefficients_at(t, side)
        H = np.zeros_like(mats[0])
        for ck, M in zip(c, mats):
            if ck != 0.0:
                H += ck * M
        return H

    def norm_evaluator(self, F: DecayFunction, box: LatticeBox | None) -> "WNormEvaluator":
        key = (F, box)
        ev = self._wnorm_cache.get(key)
        if ev is None:
            ev = WNormEvaluator(self.components, F, box)
            self._wnorm_cache[key] = ev
        return ev

    def w_norm_at(self, t: float, F: DecayFunction, box: LatticeBox | None, side: str = "right") -> float:
        return self.norm_evaluator(F, box)(self.coefficients_at(t, side))

    def sup_model_norm(self, F: DecayFunction, box: LatticeBox | None = None) -> float:
        """Max of ``||Psi(t)||_W`` over breakpoints (and both sides of each)."""
        ev = self.norm_evaluator(F, box)
        times = self.breakpoints or (0.0,)
        return max(max(ev(self.coefficients_at(t, "left")), ev(self.coefficients_at(t, "right"))) for t in times)

    def __neg__(self):
        return TimeDependentInteraction(
            self.components, [FunctionSchedule(lambda t, c=c: -c(t), c.breakpoints) for c in self.coefficients]
        )

    def difference(self, other: "TimeDependentInteraction") -> "TimeDependentInteraction":
        """``self - other`` as a schedule over the concatenated components."""
        neg = [
            _NegatedSchedule(c) for c in other.coefficients
        ]
        return TimeDependentInteraction(self.components + other.components, list(self.coefficients) + neg)


@dataclass(frozen=True)
class _NegatedSchedule:
    inner: object

    @property
    def breakpoints(self):
        return self.inner.breakpoints

    def __call__(self, t, side="right"):
        return -self.inner(t, side)


class WNormEvaluator:
    """Fast ``||sum_k c_k Psi_k||_W`` for a fixed list of components.

    Term matrices of every canonical site set are precomputed on minimal
    boxes; evaluation only needs small eigenvalue problems and one weighted
    incidence product.
    """

    def __init__(self, components: Sequence[Interaction], F: DecayFunction, box: LatticeBox | None):
        ti = {c.translation_invariant for c in components}
        if len(ti) > 1:
            raise DomainError("components must all be translation invariant or all general")
        self.translation_invariant = ti.pop() if ti else True
        keys = []
        for c in components:
            for Z in c._terms:
                if Z not in keys:
                    keys.append(Z)
        self.keys = keys
        self.blocks = []  # per key: list of (component index, matrix)
        for Z in keys:
            spins = []
            for c in components:
                if Z in c._terms:
                    for s in c._local_spins(c._terms[Z]):
                        if s not in spins:
                            spins.append(s)
            small = LatticeBox(Z, tuple(spins) or (0,))
            self.blocks.append(
                [(k, instantiate(c._terms[Z], small).matrix) for k, c in enumerate(components) if Z in c._terms]
            )
        # incidence: weight of each key for each (x,y) pair
        rows: dict = {}
        origin = None
        for j, Z in enumerate(keys):
            if box is None:
                if self.translation_invariant:
                    origin = tuple([0] * len(Z[0]))
                    for z in Z:
                        v = tuple(-a for a in z)
                        for y in Z:
                            pair = (origin, _shift(y, v))
                            rows.setdefault(pair, {}).setdefault(j, 0)
                            rows[pair][j] += 1
                    continue
                translates = [Z]
            else:
                sites = box.site_set()
                if self.translation_invariant:
                    translates = [tuple(_shift(z, x) for z in Z) for x in box.sites]
                    translates = [T for T in translates if set(T) <= sites]
                else:
                    translates = [Z] if set(Z) <= sites else []
            for T in translates:
                for x in T:
                    for y in T:
                        rows.setdefault((x, y), {}).setdefault(j, 0)
                        rows[(x, y)][j] += 1
        pairs = list(rows)
        self.weights = np.zeros((len(pairs), len(keys)))
        for i, pair in enumerate(pairs):
            f = F(*pair)
            for j, cnt in rows[pair].items():
                self.weights[i, j] = cnt / f

    def term_norms(self, coefficients) -> np.ndarray:
        out = np.zeros(len(self.keys))
        for j, block in enumerate(self.blocks):
            M = None
            for k, mat in block:
                if coefficients[k] != 0.0:
                    M = coefficients[k] * mat if M is None else M + coefficients[k] * mat
            if M is not None:
                out[j] = operator_norm(M)
        return out

    def __call__(self, coefficients) -> float:
        if not self.keys or self.weights.size == 0:
            return 0.0
        return float(np.max(self.weights @ self.term_norms(coefficients)))


# ---------------------------------------------------------------------------
# Derivations and autonomous dynamics
# ---------------------------------------------------------------------------


def generator_matrix(generator, box: LatticeBox, region=None) -> np.ndarray:
    """Dense local energy of an interaction or local Hamiltonian of a model."""
    if isinstance(generator, LongRangeModel):
        return local_hamiltonian(generator, box, region).matrix
    if isinstance(generator, Interaction):
        return _energy_sparse(generator, box, region).toarray()
    if isinstance(generator, FockOperator):
        if generator.box != box:
            raise DomainError("generator lives on a different box")
        return generator.matrix
    raise DomainError(f"unsupported generator {generator!r}")


def derivation(generator, box: LatticeBox, A: FockOperator) -> FockOperator:
    """``delta(A) = i[U, A]`` with ``U`` the boxed energy of ``generator``."""
    if A.box != box:
        raise DomainError("observable lives on a different box")
    U = generator_matrix(generator, box)
    return FockOperator(1j * (U @ A.matrix - A.matrix @ U), box, A.support)


def derivation_tail(phi: Interaction, small: LatticeBox, big: LatticeBox, A: FockOperator,
                    F: DecayFunction) -> dict:
    """Compare derivations of ``phi`` on nested boxes for an observable ``A``.

    ``A`` acts on the Fock space of ``big`` and is localized in
    ``Lambda = A.support`` which must lie in ``small``.  The lattice is taken
    to be ``big``, so the norm of ``phi`` and the tail sum refer to it.

    Returns
    -------
    dict
        ``difference`` (norm of the difference of derivations), ``bound`` and
        ``holds``.
    """
    if A.box != big:
        raise DomainError("observable must act on the larger box")
    region = set(small.sites)
    if not region <= big.site_set():
        raise DomainError("boxes must be nested")
    support = set(A.support)
    if not support <= region:
        raise DomainError("observable support must lie in the smaller box")
    U_big = _energy_sparse(phi, big).toarray()
    U_small = _energy_sparse(phi, big, small.sites).toarray()
    diff = 1j * ((U_big - U_small) @ A.matrix - A.matrix @ (U_big - U_small))
    lhs = operator_norm(diff)
    outside = [x for x in big.sites if x not in region]
    if outside:
        tail = F.matrix(sorted(support), outside).sum(axis=1).max()
    else:
        tail = 0.0
    rhs = 2 * len(support) * operator_norm(A) * w_norm(phi, F, big) * float(tail)
    return {"difference": lhs, "bound": rhs, "holds": lhs <= rhs + 1e-12}


def generator_bound(phi: Interaction, box: LatticeBox, A: FockOperator, F: DecayFunction) -> dict:
    """``||delta(A)|| <= 2 |Lambda| ||A|| ||phi||_W ||F||_1`` with the box as lattice."""
    lhs = operator_norm(derivation(phi, box, A))
    rhs = 2 * len(A.support) * operator_norm(A) * w_norm(phi, F, box) * decay_norm_one(F, box)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + 1e-12}


_EIGEN_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _eigensystem(generator, box: LatticeBox, region=None):
    try:
        per_gen = _EIGEN_CACHE.setdefault(generator, {})
    except TypeError:
        per_gen = {}
    key = (box, None if region is None else tuple(sorted(region)))
    if key not in per_gen:
        H = generator_matrix(generator, box, region)
        per_gen[key] = np.linalg.eigh((H + H.conj().T) / 2)
    return per_gen[key]


def heisenberg(generator, box: LatticeBox, A: FockOperator, t: float, region=None) -> FockOperator:
    """``exp(itU) A exp(-itU)`` through the eigendecomposition of ``U``.

    Parameters
    ----------
    generator : Interaction, LongRangeModel or FockOperator
    region : sequence of sites, optional
        Restrict the generator to terms inside ``region`` (the operator still
        acts on ``box``).
    """
    if A.box != box:
        raise DomainError("observable lives on a different box")
    E, V = _eigensystem(generator, box, region)
    phase = np.exp(1j * t * E)
    W = (V * phase) @ V.conj().T
    return FockOperator(W @ A.matrix @ W.conj().T, box, A.support)


# ---------------------------------------------------------------------------
# Non-autonomous dynamics
# ---------------------------------------------------------------------------


@dataclass
class PropagatorResult:
    """Outcome of a non-autonomous evolution.

    Attributes
    ----------
    operator : FockOperator
        ``tau_{t,s}(A)``.
    steps : int
        Number of midpoint steps of the accepted refinement.
    error_estimate : float
        Norm difference between the last two refinements.
    wall_time : float
        Seconds spent.
    history : list of float
        Refinement differences.
    """

    operator: FockOperator
    steps: int
    error_estimate: float
    wall_time: float
    history: list = field(default_factory=list)
    propagator: np.ndarray | None = None


def _segments(s: float, t: float, breakpoints: Sequence[float]) -> list:
    lo, hi = min(s, t), max(s, t)
    cuts = [b for b in breakpoints if lo < b < hi]
    nodes = [lo] + cuts + [hi]
    segs = list(zip(nodes[:-1], nodes[1:]))
    if t < s:
        segs = [(b, a) for a, b in reversed(segs)]
    return segs


def _expm_hermitian(H: np.ndarray, h: float) -> np.ndarray:
    E, V = np.linalg.eigh((H + H.conj().T) / 2)
    return (V * np.exp(-1j * h * E)) @ V.conj().T


def propagator(psi: TimeDependentInteraction, box: LatticeBox, s: float, t: float, steps: int,
               region=None) -> np.ndarray:
    """Midpoint-exponential approximation of ``U(t,s)`` with about ``steps`` steps.

    The interval is split at the schedule breakpoints and each piece receives
    a number of steps proportional to its length (at least one).
    """
    dim = box.fock_dim
    U = np.eye(dim, dtype=complex)
    if s == t:
        return U
    total = abs(t - s)
    last_key, last_step = None, None
    for a, b in _segments(s, t, psi.breakpoints):
        n = max(1, math.ceil(steps * abs(b - a) / total))
        h = (b - a) / n
        for k in range(n):
            mid = a + (k + 0.5) * h
            c = psi.coefficients_at(mid)
            key = (tuple(c), h)
            if key != last_key:
                last_step = _expm_hermitian(psi.hamiltonian(box, mid, region), h)
                last_key = key
            U = last_step @ U
    return U


def heisenberg_nonautonomous(psi: TimeDependentInteraction, box: LatticeBox, A: FockOperator, s: float,
                             t: float, tol: float = 1e-10, region=None, initial_steps: int = 4,
                             max_steps: int = 2 ** 16) -> PropagatorResult:
    """``tau_{t,s}(A) = U(t,s)* A U(t,s)`` by midpoint-exponential steps.

    The step count is doubled until two successive results differ by less
    than ``tol`` in operator norm.

    Raises
    ------
    IntegrationError
        If ``max_steps`` is reached without meeting the tolerance.
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    if A.box != box:
        raise DomainError("observable lives on a different box")
    start = time.perf_counter()
    if s == t:
        return PropagatorResult(A, 0, 0.0, 0.0, [], np.eye(box.fock_dim, dtype=complex))
    steps = initial_steps
    prev = None
    history = []
    while True:
        U = propagator(psi, box, s, t, steps, region)
        cur = U.conj().T @ A.matrix @ U
        if prev is not None:
            diff = operator_norm(cur - prev)
            history.append(diff)
            if diff < tol:
                op = FockOperator(cur, box, A.support)
                return PropagatorResult(op, steps, diff, time.perf_counter() - start, history, U)
        if steps >= max_steps:
            raise IntegrationError(
                f"no convergence to {tol} after {steps} steps",
                {"history": history, "steps": steps},
            )
        prev = cur
        steps *= 2


# ---------------------------------------------------------------------------
# Time integrals of interaction norms
# ---------------------------------------------------------------------------


class _NormProfile:
    """Samples ``g(alpha) = ||Psi(alpha)||_W`` on a composite grid."""

    def __init__(self, psi: TimeDependentInteraction, F: DecayFunction, box: LatticeBox | None):
        self.psi = psi
        self.ev = psi.norm_evaluator(F, box)
        self._cache: dict = {}

    def g(self, alpha: float, side: str) -> float:
        key = (alpha, side)
        if key not in self._cache:
            self._cache[key] = self.ev(self.psi.coefficients_at(alpha, side))
        return self._cache[key]

    def grid(self, a: float, b: float, panels: int):
        """Nodes and values over ``[a, b]`` (a < b), split at breakpoints.

        Returns a list of ``(nodes, values)`` per smooth piece.
        """
        pieces = []
        for lo, hi in _segments(a, b, self.psi.breakpoints):
            n = 2 * max(1, math.ceil(panels * (hi - lo) / (b - a) / 2))
            x = np.linspace(lo, hi, n + 1)
            vals = np.array([self.g(v, "left" if i == n else "right") for i, v in enumerate(x)])
            pieces.append((x, vals))
        return pieces


def _refine(compute: Callable[[int], float], rel: float = 1e-8, start: int = 16, cap: int = 4096) -> float:
    """Double the panel count until the value changes by less than ``rel``."""
    prev = compute(start)
    n = start
    while n < cap:
        n *= 2
        cur = compute(n)
        if abs(cur - prev) <= rel * max(abs(cur), 1e-300) or cur == prev:
            return cur
        prev = cur
    return prev


def norm_integral(psi: TimeDependentInteraction, F: DecayFunction, box: LatticeBox | None, a: float,
                  b: float) -> float:
    """``int_{a ^ b}^{a v b} ||Psi(alpha)||_W d alpha`` by refined composite Simpson."""
    if a == b:
        return 0.0
    return _plain(_NormProfile(psi, F, box), min(a, b), max(a, b))


def _weighted_integral(prof: _NormProfile, lo: float, hi: float, anchor: float, D: float,
                       weight: _NormProfile | None = None) -> float:
    """``int_lo^hi w(alpha) exp(2D |int_alpha^anchor g|) d alpha``.

    ``g`` is the norm profile ``prof`` and ``w`` is ``g`` itself unless
    another profile is given.  The anchor may lie anywhere.
    """
    if lo == hi:
        return 0.0
    if lo < anchor < hi:
        return (_weighted_integral(prof, lo, anchor, anchor, D, weight)
                + _weighted_integral(prof, anchor, hi, anchor, D, weight))
    weight = weight or prof
    if anchor <= lo:
        offset, from_lo = _plain(prof, anchor, lo), True
    else:
        offset, from_lo = _plain(prof, hi, anchor), False

    def compute(n):
        pieces = prof.grid(lo, hi, n)
        wpieces = pieces if weight is prof else weight.grid(lo, hi, n)
        full = sum(float(simpson(v, x=x)) for x, v in pieces)
        acc, total = 0.0, 0.0
        for (x, v), (_, wv) in zip(pieces, wpieces):
            C = acc + cumulative_simpson(v, x=x, initial=0.0)
            acc = C[-1]
            dist = offset + (C if from_lo else full - C)
            total += float(simpson(wv * np.exp(2 * D * dist), x=x))
        return total

    return _refine(compute)


def _plain(prof: _NormProfile, a: float, b: float) -> float:
    if a == b:
        return 0.0

    def compute(n):
        return sum(float(simpson(v, x=x)) for x, v in prof.grid(a, b, n))

    return _refine(compute)


# ---------------------------------------------------------------------------
# Lieb-Robinson type estimates
# ---------------------------------------------------------------------------


@dataclass
class BoundCheck:
    """Both sides of an inequality, evaluated numerically."""

    case: str
    lhs: float
    rhs: float
    holds: bool
    ratio: float
    details: dict = field(default_factory=dict)

    def as_row(self, L=None, t=None, s=None) -> dict:
        return {"case": self.case, "L": L, "t": t, "s": s, "lhs": self.lhs, "rhs": self.rhs,
                "ratio": self.ratio, "pass": self.holds}


def interaction_boundary(psi: TimeDependentInteraction, region, box: LatticeBox) -> list:
    """Sites of ``region`` lying in a term (inside ``box``) that leaves ``region``."""
    region = set(region)
    out = set()
    for comp in psi.components:
        for Z, _ in comp.translates_in(box):
            Zs = set(Z)
            if Zs & region and Zs - region:
                out |= Zs & region
    return sorted(out)


def _ratio(lhs, rhs):
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


def lr_bound_check(case: str, psi: TimeDependentInteraction, box: LatticeBox, F: DecayFunction, *,
                   s: float, t: float, A: FockOperator | None = None, A1: FockOperator | None = None,
                   A2: FockOperator | None = None, region=None, psi_tilde: TimeDependentInteraction | None = None,
                   s2: float | None = None, t2: float | None = None, tol: float = 1e-10) -> BoundCheck:
    """Evaluate one of the four short-range dynamics estimates on a finite box.

    The box plays the role of the whole lattice: its convolution constant
    and ``||F||_1`` enter the right-hand sides and interaction norms are taken
    over translates inside it.  The convolution constant of Z is reported as
    ``D_lattice`` for comparison.

    Parameters
    ----------
    case : {"i", "ii", "iii", "iv"}
        ``i`` commutator bound for ``A1`` (even) and ``A2`` on disjoint sets;
        ``ii`` distance to the evolution restricted to ``region``;
        ``iii`` distance between evolutions of ``psi`` and ``psi_tilde``;
        ``iv`` distance between ``tau_{t,s}`` and ``tau_{t2,s2}``.
    tol : float
        Integrator tolerance; added to ``rhs`` when deciding ``holds``.
    """
    D = convolution_constant(F, box)
    f1 = decay_norm_one(F, box)
    details = {"D_box": D, "F1_box": f1}
    if F.dimension == 1:
        details["D_lattice"] = lattice_convolution_constant(F)
    slack = 0.0
    if case == "i":
        if A1 is None or A2 is None:
            raise DomainError("case i needs A1 and A2")
        if set(A1.support) & set(A2.support):
            raise DomainError("A1 and A2 must have disjoint supports")
        if not A1.is_even(1e-10):
            raise DomainError("A1 must be even")
        res = heisenberg_nonautonomous(psi, box, A1, s, t, tol)
        lhs = operator_norm(res.operator.matrix @ A2.matrix - A2.matrix @ res.operator.matrix)
        boundary = interaction_boundary(psi, A1.support, box)
        fsum = float(F.matrix(boundary, sorted(A2.support)).sum()) if boundary else 0.0
        I = norm_integral(psi, F, box, s, t)
        rhs = 2 / D * operator_norm(A1) * operator_norm(A2) * math.expm1(2 * D * I) * fsum
        slack = 2 * res.error_estimate * operator_norm(A2)
        details.update(boundary=boundary, integral=I)
    elif case == "ii":
        if A is None or region is None:
            raise DomainError("case ii needs A and region")
        region_sites = set(_region_box(box, region).sites)
        if not set(A.support) <= region_sites:
            raise DomainError("support of A must lie in the region")
        full = heisenberg_nonautonomous(psi, box, A, s, t, tol)
        part = heisenberg_nonautonomous(psi, box, A, s, t, tol, region=sorted(region_sites))
        lhs = operator_norm(full.operator.matrix - part.operator.matrix)
        outside = [x for x in box.sites if x not in region_sites]
        fsum = float(F.matrix(sorted(A.support), outside).sum()) if outside else 0.0
        prof = _NormProfile(psi, F, box)
        lo, hi = min(s, t), max(s, t)
        J = _weighted_integral(prof, lo, hi, anchor=s, D=D)
        rhs = 2 * operator_norm(A) * J * fsum
        slack = full.error_estimate + part.error_estimate
        details.update(integral=J)
    elif case == "iii":
        if A is None or psi_tilde is None:
            raise DomainError("case iii needs A and psi_tilde")
        r1 = heisenberg_nonautonomous(psi, box, A, s, t, tol)
        r2 = heisenberg_nonautonomous(psi_tilde, box, A, s, t, tol)
        lhs = operator_norm(r1.operator.matrix - r2.operator.matrix)
        lo, hi = min(s, t), max(s, t)
        prof = _NormProfile(psi, F, box)
        diff = _NormProfile(psi_tilde.difference(psi), F, box)
        J = _weighted_integral(prof, lo, hi, anchor=t, D=D, weight=diff) if lo < hi else 0.0
        rhs = 2 * len(A.support) * operator_norm(A) * f1 * J
        slack = r1.error_estimate + r2.error_estimate
        details.update(integral=J)
    elif case == "iv":
        if A is None or s2 is None or t2 is None:
            raise DomainError("case iv needs A, s2 and t2")
        r1 = heisenberg_nonautonomous(psi, box, A, s, t, tol)
        r2 = heisenberg_nonautonomous(psi, box, A, s2, t2, tol)
        lhs = operator_norm(r1.operator.matrix - r2.operator.matrix)
        I_t = norm_integral(psi, F, box, t, t2)
        prof = _NormProfile(psi, F, box)
        lo, hi = min(s, s2), max(s, s2)
        J = _weighted_integral(prof, lo, hi, anchor=t2, D=D)
        rhs = 2 * len(A.support) * operator_norm(A) * f1 * (I_t + J)
        slack = r1.error_estimate + r2.error_estimate
        details.update(integral_t=I_t, integral_s=J)
    else:
        raise DomainError(f"unknown case {case!r}")
    return BoundCheck(case, lhs, rhs, lhs <= rhs + slack + 1e-12, _ratio(lhs, rhs), details)


# ---------------------------------------------------------------------------
# Non-convergence of long-range dynamics
# ---------------------------------------------------------------------------


@dataclass
class ProbeResult:
    """Distances between boxed evolutions of one annihilator."""

    sizes: list
    distances: np.ndarray
    consecutive: list
    remainders: list
    remainder_bound: float
    control_consecutive: list | None = None

    @property
    def remainder_holds(self) -> bool:
        return all(r <= self.remainder_bound + 1e-12 for r in self.remainders)


def nonconvergence_probe(boxes: Sequence[LatticeBox], t: float, spin=None, model: LongRangeModel | None = None,
                         control=None) -> ProbeResult:
    """Compare ``tau_t^{(L)}(a_{0,s})`` across a ladder of boxes.

    All evolutions are realized on the Fock space of the largest box with
    the generator restricted to each rung.  For each rung the remainder

        R_L(t) = exp(-it/(2|L|)) tau_t(a) - a - it|L|^-1 [n_0 N_L, a]

    of the number-squared model is computed; its norm is at most ``2 t^2``.

    Parameters
    ----------
    boxes : sequence of LatticeBox
        Nested boxes containing the origin, in increasing order.
    model : LongRangeModel, optional
        Defaults to the number-squared model on the spin set of the boxes.
    control : Interaction or LongRangeModel, optional
        A short-range generator probed the same way for comparison.
    """
    from .models import build_number_squared

    big = boxes[-1]
    spins = big.spins
    spin = spins[0] if spin is None else spin
    model = model or build_number_squared(spins, dimension=big.dimension)
    origin = tuple([0] * big.dimension)
    a = instantiate(_annihilator_poly(origin, spin), big)
    n0 = a.dag @ a
    evolved = []
    remainders = []
    for box in boxes:
        if not set(box.sites) <= set(big.sites) or not box.contains(origin):
            raise DomainError("probe boxes must be nested and contain the origin")
        region = box.sites
        ev = heisenberg(model, big, a, t, region=region)
        evolved.append(ev.matrix)
        vol = box.n_sites
        N = _energy_sparse(_number(spins, big.dimension), big, region).toarray()
        comm = n0.matrix @ N @ a.matrix - a.matrix @ n0.matrix @ N
        R = np.exp(-1j * t / (2 * vol)) * ev.matrix - a.matrix - 1j * t / vol * comm
        remainders.append(operator_norm(R))
    k = len(boxes)
    dist = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            dist[i, j] = dist[j, i] = operator_norm(evolved[i] - evolved[j])
    consecutive = [float(dist[i, i + 1]) for i in range(k - 1)]
    control_consecutive = None
    if control is not None:
        cev = [heisenberg(control, big, a, t, region=box.sites).matrix for box in boxes]
        control_consecutive = [operator_norm(cev[i] - cev[i + 1]) for i in range(k - 1)]
    return ProbeResult([b.n_sites for b in boxes], dist, consecutive, remainders, 2 * t * t, control_consecutive)


def _annihilator_poly(site, spin):
    from .fock import LocalPolynomial

    return LocalPolynomial.annihilator(site, spin)


def _number(spins, dimension):
    from .interactions import number_interaction

    return number_interaction(spins, dimension)
