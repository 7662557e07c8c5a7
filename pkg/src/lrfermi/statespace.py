"""Finite-volume states, polynomial state functions and Poisson brackets."""

from __future__ import annotations

import functools
import numbers
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DomainError
from .fock import (
    MAX_DENSE_MODES,
    FockOperator,
    LatticeBox,
    LocalPolynomial,
    _as_site,
    identity,
    instantiate,
    parity_diagonal,
    translate,
    zero_operator,
)
from .interactions import (
    Interaction,
    LongRangeModel,
    _as_period,
    _default_anchor,
    energy_per_site_poly,
    local_energy,
)

STATE_ATOL = 1e-12


def _parity_vector(n_modes: int) -> np.ndarray:
    b = np.arange(2 ** n_modes, dtype=np.int64)
    return np.where(np.bitwise_count(b) % 2 == 0, 1.0, -1.0)


def _is_even_matrix(m: np.ndarray, n_modes: int, atol: float) -> bool:
    p = _parity_vector(n_modes)
    return bool(np.max(np.abs(m[np.outer(p, p) < 0]), initial=0.0) <= atol)


def _check_density(m: np.ndarray, atol: float, what: str = "state"):
    if np.max(np.abs(m - m.conj().T), initial=0.0) > atol:
        raise DomainError(f"{what} matrix is not Hermitian")
    if abs(np.trace(m) - 1) > atol * max(1, m.shape[0]):
        raise DomainError(f"{what} matrix does not have unit trace")
    if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -atol * max(1, m.shape[0]):
        raise DomainError(f"{what} matrix is not positive semi-definite")


def _partial_trace_keep(m: np.ndarray, n_modes: int, keep: Sequence[int]) -> np.ndarray:
    """Trace out all qubits of ``m`` except the (sorted) ``keep`` positions."""
    t = m.reshape([2] * (2 * n_modes))
    drop = [k for k in range(n_modes) if k not in keep]
    # contract dropped row/column indices pairwise, highest first
    for k in sorted(drop, reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + cur)
    d = 2 ** len(keep)
    return t.reshape(d, d)


class DensityState:
    """Density matrix on the Fock space of a box.

    Either a dense ``matrix`` is given, or ``cells``: a list of
    ``(sites, factor)`` pairs describing a fermionic product of even
    factors over consecutive groups of sites (in mode order).  Product
    states can evaluate local observables without forming the full matrix.

    Parameters
    ----------
    box : LatticeBox
    matrix : ndarray, optional
    cells : list of (tuple of sites, ndarray), optional
    period : tuple of int, optional
        Period vector recorded as metadata.
    validate : bool
        Check Hermiticity, unit trace and positivity.
    """

    def __init__(self, box: LatticeBox, matrix: np.ndarray | None = None, cells: list | None = None,
                 period: tuple | None = None, validate: bool = True, atol: float = STATE_ATOL,
                 ensemble: tuple | None = None):
        if sum(v is not None for v in (matrix, cells, ensemble)) != 1:
            raise DomainError("give exactly one of matrix, cells or ensemble")
        self.box = box
        self.period = period
        self._cells = None
        self._matrix = None
        self._ensemble = None
        if ensemble is not None:
            X, w = ensemble
            X = np.asarray(X, dtype=complex)
            w = np.asarray(w, dtype=float)
            if X.shape != (box.fock_dim, len(w)):
                raise DomainError("ensemble vectors do not match the Fock dimension")
            if validate:
                gram = X.conj().T @ X
                if np.max(np.abs(gram - np.eye(len(w))), initial=0.0) > 1e-9 or w.min(initial=0) < -atol:
                    raise DomainError("ensemble must consist of orthonormal vectors with non-negative weights")
                if abs(w.sum() - 1) > 1e-9:
                    raise DomainError("ensemble weights must sum to one")
            self._ensemble = (X, w)
        elif matrix is not None:
            m = np.asarray(matrix, dtype=complex)
            if m.shape != (box.fock_dim,) * 2:
                raise DomainError("state matrix does not match the Fock dimension")
            if validate:
                _check_density(m, atol)
            self._matrix = m
        else:
            covered = [s for sites, _ in cells for s in sites]
            if sorted(covered) != list(box.sites) or covered != sorted(covered):
                raise DomainError("cells must cover the box sites in order")
            self._cells = [(tuple(sites), np.asarray(f, dtype=complex)) for sites, f in cells]
            for sites, f in self._cells:
                n = len(sites) * len(box.spins)
                if f.shape != (2 ** n,) * 2:
                    raise DomainError("cell factor has the wrong dimension")
                if validate:
                    _check_density(f, atol, "cell factor")
                if not _is_even_matrix(f, n, 1e-12):
                    raise DomainError("product factors must be even")

    # basic properties -----------------------------------------------------
    @property
    def is_product(self) -> bool:
        return self._cells is not None

    @property
    def cells(self) -> list:
        return list(self._cells or [])

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None and self._ensemble is not None:
            X, w = self._ensemble
            self._matrix = (X * w) @ X.conj().T
        if self._matrix is None:
            if self.box.n_modes > MAX_DENSE_MODES:
                raise DomainError("box too large to form the dense state matrix")
            m = np.ones((1, 1), dtype=complex)
            for _, f in self._cells:
                m = np.kron(m, f)
            self._matrix = m
        return self._matrix

    def ensemble(self, cutoff: float = 1e-15) -> tuple:
        """Vectors ``X`` and weights ``w`` with ``rho = X diag(w) X*``."""
        if self._ensemble is not None:
            return self._ensemble
        w, V = np.linalg.eigh(self.matrix)
        keep = w > cutoff
        w = w[keep]
        return V[:, keep], w / w.sum()

    @property
    def even(self) -> bool:
        if self._cells is not None:
            return True
        return _is_even_matrix(self.matrix, self.box.n_modes, 1e-10)

    def purity(self) -> float:
        m = self.matrix
        return float(np.real(np.einsum("ij,ji->", m, m)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())

    def expect(self, A: FockOperator) -> complex:
        return expect(self, A)

    def expect_poly(self, poly: LocalPolynomial, anchor=None) -> complex:
        """Expectation of a symbolic observable placed at ``anchor``."""
        if anchor is not None:
            poly = translate(poly, anchor)
        if self._cells is None:
            return expect(self, instantiate(poly, self.box))
        support = poly.support
        if not support:
            return complex(poly.terms.get((), 0.0))
        used = [(sites, f) for sites, f in self._cells if support & set(sites)]
        sub_sites = tuple(s for sites, _ in used for s in sites)
        sub = LatticeBox(sub_sites, self.box.spins)
        m = np.ones((1, 1), dtype=complex)
        for _, f in used:
            m = np.kron(m, f)
        op = instantiate(poly, sub)
        return complex(np.einsum("ij,ji->", m, op.matrix))

    def mixed_with(self, other: "DensityState", lam: float) -> "DensityState":
        """``(1 - lam) self + lam other``."""
        if other.box != self.box:
            raise DomainError("states live on different boxes")
        return DensityState(self.box, (1 - lam) * self.matrix + lam * other.matrix, validate=False)

    def __repr__(self):
        kind = "product" if self.is_product else "dense"
        return f"<DensityState {kind} on {self.box.n_sites} sites>"


def expect(rho: DensityState, A: FockOperator) -> complex:
    """``tr(rho A)``."""
    if A.box != rho.box:
        raise DomainError("observable and state live on different boxes")
    if rho._matrix is None and rho._ensemble is not None:
        X, w = rho._ensemble
        return complex(((X.conj() * (A.matrix @ X)).sum(axis=0)) @ w)
    return complex(np.einsum("ij,ji->", rho.matrix, A.matrix))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def trace_density(box: LatticeBox) -> DensityState:
    """The tracial state ``1 / 2**N``."""
    f = np.eye(2 ** len(box.spins)) / 2 ** len(box.spins)
    return product_state(box, [f])


def vacuum_density(box: LatticeBox) -> DensityState:
    f = np.zeros((2 ** len(box.spins),) * 2)
    f[0, 0] = 1.0
    return product_state(box, [f])


def filled_density(box: LatticeBox) -> DensityState:
    f = np.zeros((2 ** len(box.spins),) * 2)
    f[-1, -1] = 1.0
    return product_state(box, [f])


def pure_state(box: LatticeBox, vector: np.ndarray) -> DensityState:
    """Pure state of a (normalized on input) Fock-space vector."""
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityState(box, ensemble=(v[:, None], np.ones(1)))


def product_vector(box: LatticeBox, site_vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of on-site vectors, repeated periodically along the box.

    Each vector must have definite parity so that the product is a
    fermionic product state.
    """
    ns = len(box.spins)
    p = _parity_vector(ns)
    vecs = [np.asarray(v, dtype=complex) for v in site_vectors]
    for v in vecs:
        if v.shape != (2 ** ns,):
            raise DomainError("on-site vectors must have dimension 2**|S|")
        if np.abs(v[p > 0]).max() > 0 and np.abs(v[p < 0]).max(initial=0.0) > 0:
            raise DomainError("on-site vectors must have definite parity")
    out = np.ones(1, dtype=complex)
    for k in range(box.n_sites):
        out = np.kron(out, vecs[k % len(vecs)])
    return out / np.linalg.norm(out)


def product_state(box: LatticeBox, factors: Sequence[np.ndarray], period=None) -> DensityState:
    """Fermionic product state built from even factors repeated periodically.

    Parameters
    ----------
    box : LatticeBox
    factors : sequence of ndarray
        Either on-site factors (dimension ``2**|S|``), assigned to site ``x``
        by the position of ``x mod period`` in the period cell, or (in one
        dimension) a single factor on a whole cell of ``period`` consecutive
        sites.  Cells are aligned at multiples of the period; a cell cut by
        the box boundary is restricted by a partial trace.
    period : int or tuple of int, optional
        Defaults to 1 (or to the cell length implied by the factor size).

    Raises
    ------
    DomainError
        If a factor is not an even density matrix.
    """
    ns = len(box.spins)
    d = box.dimension
    mats = [np.asarray(f, dtype=complex) for f in factors]
    if not mats:
        raise DomainError("at least one factor is required")
    site_dim = 2 ** ns
    if all(m.shape == (site_dim, site_dim) for m in mats):
        ell = _as_period(period if period is not None else _default_period(len(mats), d), d)
        cell_count = int(np.prod(ell))
        if len(mats) not in (1, cell_count):
            raise DomainError(f"expected 1 or {cell_count} on-site factors for period {ell}")
        for m in mats:
            _check_density(m, STATE_ATOL, "on-site factor")
            if not _is_even_matrix(m, ns, 1e-12):
                raise DomainError("on-site factors must be even")
        cells = []
        for x in box.sites:
            idx = 0
            for c, l in zip(x, ell):
                idx = idx * l + (c % l)
            cells.append(((x,), mats[idx if len(mats) > 1 else 0]))
        return DensityState(box, cells=cells, period=ell)
    if len(mats) != 1 or d != 1:
        raise DomainError("multi-site cell factors are supported for a single factor in one dimension")
    f = mats[0]
    n_modes = int(round(np.log2(f.shape[0])))
    if f.shape != (2 ** n_modes,) * 2 or n_modes % ns:
        raise DomainError("cell factor dimension is not a power of the site dimension")
    length = n_modes // ns
    if period is not None and _as_period(period, 1) != (length,):
        raise DomainError("period does not match the cell factor size")
    _check_density(f, STATE_ATOL, "cell factor")
    if not _is_even_matrix(f, n_modes, 1e-12):
        raise DomainError("cell factors must be even")
    groups: dict = {}
    for x in box.sites:
        groups.setdefault(x[0] // length, []).append(x)
    cells = []
    for k in sorted(groups):
        sites = groups[k]
        pos = [x[0] - k * length for x in sites]
        keep = [p * ns + j for p in pos for j in range(ns)]
        cells.append((tuple(sites), _partial_trace_keep(f, n_modes, keep)))
    return DensityState(box, cells=cells, period=(length,))


def _default_period(n_factors, d):
    if d == 1:
        return n_factors
    return 1


def random_even_density(n_modes: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random even density matrix on ``n_modes`` modes."""
    dim = 2 ** n_modes
    rank = rank or dim
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = G @ G.conj().T
    p = _parity_vector(n_modes)
    m = m * (np.outer(p, p) > 0)
    return m / np.trace(m)


def random_density(box: LatticeBox, rng: np.random.Generator, even: bool = True,
                   rank: int | None = None) -> DensityState:
    dim = box.fock_dim
    rank = rank or dim
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = G @ G.conj().T
    if even:
        p = parity_diagonal(box)
        m = m * (np.outer(p, p) > 0)
    m = (m + m.conj().T) / 2
    return DensityState(box, m / np.trace(m).real)


def random_pure_state(box: LatticeBox, rng: np.random.Generator, even: bool = True) -> DensityState:
    v = rng.normal(size=box.fock_dim) + 1j * rng.normal(size=box.fock_dim)
    if even:
        v = v * (parity_diagonal(box) > 0)
    return pure_state(box, v)


# ---------------------------------------------------------------------------
# Energy densities
# ---------------------------------------------------------------------------


@dataclass
class EnergyDensityScan:
    sizes: list
    values: list
    target: complex

    @property
    def gaps(self) -> list:
        return [abs(v - self.target) for v in self.values]


def boxed_energy_expectation(rho: DensityState, phi: Interaction) -> complex:
    """``rho(U^phi)`` on the state's box, term by term for product states."""
    if not rho.is_product and rho.box.n_modes <= MAX_DENSE_MODES:
        return expect(rho, local_energy(phi, rho.box))
    return sum((rho.expect_poly(poly) for _, poly in phi.translates_in(rho.box)), 0j)


def energy_density_scan(states: Mapping | Callable, phi: Interaction, ell, boxes: Sequence[LatticeBox]) -> EnergyDensityScan:
    """Energy per site ``rho_L(U_L^phi) / |Lambda_L|`` along a ladder of boxes.

    Parameters
    ----------
    states : mapping box -> DensityState, or callable box -> DensityState
        Periodic product states, one per rung.
    phi : Interaction
    ell : period
    boxes : ladder of boxes

    Returns
    -------
    EnergyDensityScan
        Values per rung and the target ``rho(e_{phi, ell})`` evaluated in the
        bulk of the largest rung.
    """
    get = states if callable(states) else states.__getitem__
    values = []
    for box in boxes:
        rho = get(box)
        values.append(boxed_energy_expectation(rho, phi) / box.n_sites)
    rho = get(boxes[-1])
    poly = energy_per_site_poly(phi, ell)
    anchor = _default_anchor(poly.support, boxes[-1], _as_period(ell, boxes[-1].dimension))
    target = rho.expect_poly(poly, anchor)
    return EnergyDensityScan([b.n_sites for b in boxes], values, target)


# ---------------------------------------------------------------------------
# State functions
# ---------------------------------------------------------------------------


class StateFunction:
    """Polynomial ``sum_k c_k prod_i A_hat_{k,i}`` in the affine functions ``A_hat(rho) = rho(A)``.

    Parameters
    ----------
    terms : sequence of (complex, sequence of FockOperator)
    box : LatticeBox, optional
        Needed only for constant functions.
    """

    def __init__(self, terms: Sequence = (), box: LatticeBox | None = None):
        self.terms = tuple((complex(c), tuple(fs)) for c, fs in terms if c != 0)
        boxes = {A.box for _, fs in self.terms for A in fs}
        if box is not None:
            boxes.add(box)
        if len(boxes) > 1:
            raise DomainError("all factors must live on one box")
        self.box = boxes.pop() if boxes else None

    @classmethod
    def affine(cls, A: FockOperator) -> "StateFunction":
        return cls([(1.0, (A,))], A.box)

    @classmethod
    def constant(cls, value: complex, box: LatticeBox | None = None) -> "StateFunction":
        return cls([(value, ())], box)

    def __call__(self, rho: DensityState) -> complex:
        cache: dict = {}
        total = 0j
        for c, fs in self.terms:
            val = c
            for A in fs:
                key = id(A)
                if key not in cache:
                    cache[key] = expect(rho, A)
                val *= cache[key]
            total += val
        return total

    def __add__(self, other):
        if isinstance(other, numbers.Number):
            other = StateFunction.constant(other, self.box)
        return StateFunction(self.terms + other.terms, self.box or other.box)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return StateFunction([(c * other, fs) for c, fs in self.terms], self.box)
        if not isinstance(other, StateFunction):
            return NotImplemented
        return StateFunction(
            [(c1 * c2, f1 + f2) for c1, f1 in self.terms for c2, f2 in other.terms], self.box or other.box
        )

    __rmul__ = __mul__

    def conjugate(self) -> "StateFunction":
        return StateFunction([(np.conj(c), tuple(A.dag for A in fs)) for c, fs in self.terms], self.box)

    def degree(self) -> int:
        return max((len(fs) for _, fs in self.terms), default=0)


def gateaux_derivative(f: StateFunction, rho: DensityState) -> FockOperator:
    """``Df(rho) = sum_k c_k sum_i (A_i - rho(A_i)) prod_{j != i} rho(A_j)``."""
    if f.box is not None and f.box != rho.box:
        raise DomainError("function and state live on different boxes")
    cache: dict = {}

    def ev(A):
        if id(A) not in cache:
            cache[id(A)] = expect(rho, A)
        return cache[id(A)]

    out = np.zeros((rho.box.fock_dim,) * 2, dtype=complex)
    eye_scalar = 0j
    for c, fs in f.terms:
        vals = [ev(A) for A in fs]
        for i, A in enumerate(fs):
            w = c * np.prod([v for j, v in enumerate(vals) if j != i])
            if w != 0:
                out += w * A.matrix
                eye_scalar -= w * vals[i]
    out[np.diag_indices_from(out)] += eye_scalar
    return FockOperator(out, rho.box)


def poisson_bracket(f: StateFunction, g: StateFunction, rho: DensityState) -> complex:
    """``{f, g}(rho) = rho(i[Df(rho), Dg(rho)])``."""
    Df = gateaux_derivative(f, rho).matrix
    Dg = gateaux_derivative(g, rho).matrix
    return complex(1j * np.einsum("ij,ji->", rho.matrix, Df @ Dg - Dg @ Df))


def bracket_function(f: StateFunction, g: StateFunction) -> StateFunction:
    """Polynomial realizing ``{f, g}`` through ``{A_hat, B_hat} = (i[A, B])_hat`` and the Leibniz rule."""
    terms = []
    for c1, f1 in f.terms:
        for c2, f2 in g.terms:
            for i, A in enumerate(f1):
                for j, B in enumerate(f2):
                    comm = FockOperator(1j * (A.matrix @ B.matrix - B.matrix @ A.matrix), A.box)
                    rest = f1[:i] + f1[i + 1:] + f2[:j] + f2[j + 1:]
                    terms.append((c1 * c2, (comm,) + rest))
    return StateFunction(terms, f.box or g.box)


# ---------------------------------------------------------------------------
# Classical energies
# ---------------------------------------------------------------------------


def _energies(m: LongRangeModel, box: LatticeBox) -> tuple:
    U_phi = local_energy(m.phi, box) if not m.phi.is_zero() else zero_operator(box)
    cache: dict = {}
    per_atom = []
    for a in m.atoms:
        ops = []
        for psi in a.interactions:
            if id(psi) not in cache:
                cache[id(psi)] = local_energy(psi, box)
            ops.append(cache[id(psi)])
        per_atom.append(ops)
    return U_phi, per_atom


def classical_energy(m: LongRangeModel, box: LatticeBox) -> StateFunction:
    """``h_L = U_phi_hat + sum_atoms w |L|^-(n-1) U_{psi_1}_hat ... U_{psi_n}_hat``."""
    U_phi, per_atom = _energies(m, box)
    vol = box.n_sites
    terms = [(1.0, (U_phi,))]
    for a, ops in zip(m.atoms, per_atom):
        terms.append((a.weight * vol ** (-(a.order - 1)), tuple(ops)))
    return StateFunction(terms, box)


def classical_energy_derivative(m: LongRangeModel, box: LatticeBox, rho: DensityState) -> FockOperator:
    """Derivative of the classical energy at ``rho``.

    ``U_phi - rho(U_phi) + sum_atoms w sum_m (U_m - rho(U_m)) prod_{j != m} rho(U_j) / |L|``.
    """
    U_phi, per_atom = _energies(m, box)
    vol = box.n_sites
    eye = np.eye(box.fock_dim)
    out = U_phi.matrix - expect(rho, U_phi) * eye
    for a, ops in zip(m.atoms, per_atom):
        scal = [expect(rho, U) / vol for U in ops]
        for k, U in enumerate(ops):
            coef = a.weight * np.prod([s for j, s in enumerate(scal) if j != k])
            out = out + coef * (U.matrix - expect(rho, U) * eye)
    return FockOperator(out, box)
