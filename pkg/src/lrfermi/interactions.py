"""Decay functions, interaction norms, local energies and long-range models."""

from __future__ import annotations

import functools
import itertools
import math
import numbers
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError
from .fock import (
    FockOperator,
    LatticeBox,
    LocalPolynomial,
    _as_site,
    _sparse_matrix,
    instantiate,
    operator_norm,
    random_polynomial,
    translate,
)

# ---------------------------------------------------------------------------
# Decay functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFunction:
    """Decay kernel ``F(x, y) = exp(-varsigma r) (1 + r)^-(d + epsilon)``.

    ``r`` is the Euclidean distance between ``x`` and ``y``.  ``varsigma = 0``
    gives the purely polynomial kernel.

    Parameters
    ----------
    epsilon : float
        Extra polynomial decay beyond the dimension, must be positive.
    varsigma : float
        Exponential rate, non-negative.
    dimension : int
        Lattice dimension ``d``.
    """

    epsilon: float = 1.0
    varsigma: float = 0.0
    dimension: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("decay exponent epsilon must be positive")
        if self.varsigma < 0:
            raise DomainError("decay rate varsigma must be non-negative")
        if self.dimension < 1:
            raise DomainError("dimension must be positive")

    @classmethod
    def from_config(cls, kind: str = "polynomial", epsilon: float = 1.0, varsigma: float = 0.0,
                    dimension: int = 1) -> "DecayFunction":
        if kind == "polynomial":
            if varsigma:
                raise DomainError("a polynomial decay function has varsigma = 0")
        elif kind != "exponential-polynomial":
            raise DomainError(f"unknown decay kind {kind!r}")
        return cls(float(epsilon), float(varsigma), int(dimension))

    @property
    def kind(self) -> str:
        return "polynomial" if self.varsigma == 0 else "exponential-polynomial"

    def of_distance(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-self.varsigma * r) * (1.0 + r) ** (-(self.dimension + self.epsilon))

    def __call__(self, x, y) -> float:
        r = math.dist(_as_site(x), _as_site(y))
        return float(self.of_distance(r))

    def matrix(self, sites_x: Sequence, sites_y: Sequence | None = None) -> np.ndarray:
        """Kernel matrix ``F(x_i, y_j)``."""
        X = np.asarray(sites_x, dtype=float).reshape(len(sites_x), -1)
        Y = X if sites_y is None else np.asarray(sites_y, dtype=float).reshape(len(sites_y), -1)
        r = np.sqrt(((X[:, None, :] - Y[None, :, :]) ** 2).sum(axis=-1))
        return self.of_distance(r)


def _box_sites(lattice) -> list:
    if isinstance(lattice, LatticeBox):
        return list(lattice.sites)
    return [_as_site(s) for s in lattice]


def decay_norm_one(F: DecayFunction, lattice) -> float:
    """Return ``sup_y sum_x F(x, y)`` over a box or the truncated lattice.

    Parameters
    ----------
    F : DecayFunction
    lattice : LatticeBox, sequence of sites, or int
        An integer ``R`` stands for Z^d truncated to ``|x_i| <= R`` (with the
        sum taken around ``y = 0``, which is exact for the translation
        invariant lattice).
    """
    if isinstance(lattice, numbers.Integral):
        return _lattice_norm_one(F, int(lattice))
    sites = _box_sites(lattice)
    if len(sites) > 4000:
        raise DomainError("box too large for exhaustive enumeration")
    return float(F.matrix(sites).sum(axis=0).max())


@functools.lru_cache(maxsize=32)
def _lattice_norm_one(F: DecayFunction, radius: int) -> float:
    if radius < 1:
        raise DomainError("truncation radius must be at least 1")
    d = F.dimension
    if d == 1:
        n = np.arange(1, radius + 1, dtype=float)
        # sum smallest terms first for accuracy
        return float(1.0 + 2.0 * np.sum(F.of_distance(n)[::-1]))
    # sum over shells of the Chebyshev ball, grouped by integer vectors
    axis = np.arange(-radius, radius + 1, dtype=float)
    total = 0.0
    for x0 in axis:
        rest = np.stack(np.meshgrid(*([axis] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
        r = np.sqrt(x0 ** 2 + (rest ** 2).sum(axis=1))
        total += float(np.sum(F.of_distance(r)))
    return total


def lattice_norm_one(F: DecayFunction) -> float:
    """``||F||_1`` on the infinite lattice Z^d.

    In one dimension the truncated series at radius 10**6 is completed by the
    integral bound of its tail, which makes the value an upper bound accurate
    to about 1e-6.  In higher dimension a truncated sum is returned (radius
    chosen so that about 4e6 points are summed).
    """
    d = F.dimension
    if d == 1:
        R = 10 ** 6
        tail = 2.0 * (1.0 + R) ** (-F.epsilon) / F.epsilon
        return _lattice_norm_one(F, R) + tail
    R = max(1, int((4e6) ** (1.0 / d) / 2))
    return _lattice_norm_one(F, R)


def convolution_constant(F: DecayFunction, lattice) -> float:
    """Return ``max_{x,y} sum_z F(x,z) F(z,y) / F(x,y)`` over a finite box."""
    sites = _box_sites(lattice)
    M = F.matrix(sites)
    return float(np.max((M @ M) / M))


def lattice_convolution_constant(F: DecayFunction, radius: int = 400) -> float:
    """Approximate convolution constant of Z (d = 1) by truncation.

    The intermediate site ``z`` runs over ``|z| <= radius`` and the separation
    ``|x - y|`` over ``0..radius // 4``.  Reported as a diagnostic only.
    """
    if F.dimension != 1:
        raise DomainError("lattice convolution constant only implemented for d = 1")
    z = np.arange(-radius, radius + 1, dtype=float)
    best = 0.0
    for y in range(0, radius // 4 + 1):
        val = np.sum(F.of_distance(np.abs(z)) * F.of_distance(np.abs(z - y))) / F.of_distance(y)
        best = max(best, float(val))
    return best


# ---------------------------------------------------------------------------
# Interactions
# ---------------------------------------------------------------------------


def _shift(site, v):
    return tuple(a + b for a, b in zip(site, v))


def _neg(v):
    return tuple(-a for a in v)


class Interaction:
    """Assignment of even local polynomials to finite site sets.

    Parameters
    ----------
    terms : mapping or iterable of (site set, LocalPolynomial)
        Each site set ``Z`` must contain the support of its polynomial.  For a
        translation invariant interaction every term is stored through its
        canonical representative (lexicographically smallest site moved to the
        origin) and stands for all its translates.
    translation_invariant : bool
    name : str, optional
    spins : sequence, optional
        Spin labels used when a term must be realized on its own; defaults to
        the labels appearing in the polynomials.

    Notes
    -----
    Instances are immutable; local energies are memoized per box.
    """

    def __init__(self, terms=(), translation_invariant: bool = True, name: str | None = None,
                 spins: Sequence | None = None):
        items = terms.items() if isinstance(terms, Mapping) else terms
        canon: dict = {}
        dims = set()
        for Z, poly in items:
            Z = tuple(sorted({_as_site(s) for s in Z}))
            if not Z:
                raise DomainError("interaction terms need a non-empty site set")
            if not isinstance(poly, LocalPolynomial):
                raise DomainError("interaction terms must be LocalPolynomial instances")
            if poly.is_zero():
                continue
            dims.add(len(Z[0]))
            if not poly.is_even():
                raise DomainError(f"term on {Z} is not even")
            if not poly.support <= set(Z):
                raise DomainError(f"term on {Z} has support {sorted(poly.support)} outside its site set")
            if translation_invariant:
                v = _neg(Z[0])
                Z = tuple(_shift(s, v) for s in Z)
                poly = translate(poly, v)
            canon[Z] = canon[Z] + poly if Z in canon else poly
        if len(dims) > 1:
            raise DomainError("mixed lattice dimensions in one interaction")
        self._terms = {Z: p for Z, p in canon.items() if not p.is_zero()}
        self.translation_invariant = bool(translation_invariant)
        self.name = name
        labels = set()
        for p in self._terms.values():
            labels |= p.spins
        self._spins = tuple(spins) if spins is not None else tuple(sorted(labels, key=str)) or (0,)
        self._norm_cache: dict = {}
        self._energy_cache: dict = {}

    # inspection ----------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def spins(self) -> tuple:
        return self._spins

    @property
    def dimension(self) -> int | None:
        for Z in self._terms:
            return len(Z[0])
        return None

    def is_zero(self) -> bool:
        return not self._terms

    def is_self_adjoint(self, atol: float = 1e-12) -> bool:
        return all(p.isclose(p.adjoint(), atol) for p in self._terms.values())

    @property
    def self_adjoint(self) -> bool:
        return self.is_self_adjoint()

    def sites(self) -> frozenset:
        """Union of all canonical site sets."""
        out = set()
        for Z in self._terms:
            out.update(Z)
        return frozenset(out)

    def term_norm(self, Z) -> float:
        """Operator norm of the term on (canonical) set ``Z``."""
        Z = tuple(Z)
        if Z not in self._norm_cache:
            poly = self._terms.get(Z)
            if poly is None:
                return 0.0
            box = LatticeBox(Z, self._local_spins(poly))
            self._norm_cache[Z] = operator_norm(instantiate(poly, box))
        return self._norm_cache[Z]

    def _local_spins(self, poly):
        labels = tuple(s for s in self._spins if s in poly.spins)
        extra = tuple(sorted(poly.spins - set(labels), key=str))
        return labels + extra or (0,)

    def translates_in(self, box: LatticeBox):
        """Yield ``(Z, polynomial)`` for every term whose site set lies in ``box``."""
        sites = box.site_set()
        for Z, poly in self._terms.items():
            if not self.translation_invariant:
                if set(Z) <= sites:
                    yield Z, poly
                continue
            for x in box.sites:
                Zx = tuple(_shift(z, x) for z in Z)
                if set(Zx) <= sites:
                    yield Zx, translate(poly, x)

    def fits(self, box: LatticeBox) -> bool:
        """Whether every canonical term has at least one translate in ``box``."""
        if not self.translation_invariant:
            return True
        sites = box.site_set()
        return all(
            any(set(_shift(z, x) for z in Z) <= sites for x in box.sites) for Z in self._terms
        )

    # algebra -------------------------------------------------------------
    def _combine(self, other: "Interaction", sign: complex) -> "Interaction":
        if not isinstance(other, Interaction):
            return NotImplemented
        if other.translation_invariant != self.translation_invariant:
            raise DomainError("cannot combine translation invariant and general interactions")
        terms = dict(self._terms)
        for Z, p in other._terms.items():
            terms[Z] = terms[Z] + sign * p if Z in terms else sign * p
        spins = self._spins + tuple(s for s in other._spins if s not in self._spins)
        return Interaction(terms.items(), self.translation_invariant, spins=spins)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        return Interaction(((Z, p * scalar) for Z, p in self._terms.items()),
                           self.translation_invariant, name=self.name, spins=self._spins)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def adjoint(self) -> "Interaction":
        name = None
        if self.name:
            name = self.name[:-1] if self.name.endswith("*") else self.name + "*"
        return Interaction(((Z, p.adjoint()) for Z, p in self._terms.items()),
                           self.translation_invariant, name=name, spins=self._spins)

    def real_part(self) -> "Interaction":
        return (self + self.adjoint()) * 0.5

    def imag_part(self) -> "Interaction":
        return (self - self.adjoint()) * (-0.5j)

    def isclose(self, other: "Interaction", atol: float = 1e-12) -> bool:
        if other.translation_invariant != self.translation_invariant:
            return False
        keys = set(self._terms) | set(other._terms)
        zero = LocalPolynomial()
        return all(self._terms.get(k, zero).isclose(other._terms.get(k, zero), atol) for k in keys)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        kind = "TI" if self.translation_invariant else "general"
        return f"<Interaction{label} {kind}, {len(self._terms)} terms>"


def single_site_interaction(poly: LocalPolynomial, name: str | None = None, spins=None) -> Interaction:
    """Translation invariant interaction with the on-site term ``poly`` at the origin."""
    dim = len(next(iter(poly.support))) if poly.support else 1
    return Interaction([((tuple([0] * dim),), poly)], True, name=name, spins=spins)


def number_interaction(spins: Sequence = (0,), dimension: int = 1) -> Interaction:
    """On-site interaction ``sum_s n_{x,s}``."""
    o = tuple([0] * dimension)
    poly = sum((LocalPolynomial.number(o, s) for s in spins), LocalPolynomial())
    return Interaction([((o,), poly)], True, name="number", spins=spins)


def hopping_interaction(amplitude: complex = 1.0, spins: Sequence = (0,)) -> Interaction:
    """Nearest-neighbour chain hopping ``t a*_0 a_1 + conj(t) a*_1 a_0`` per spin."""
    poly = sum((LocalPolynomial.hopping((0,), (1,), s, amplitude) for s in spins), LocalPolynomial())
    return Interaction([(((0,), (1,)), poly)], True, name="hopping", spins=spins)


# ---------------------------------------------------------------------------
# Norms and local energies
# ---------------------------------------------------------------------------


def w_norm(phi: Interaction, F: DecayFunction, box: LatticeBox | None = None) -> float:
    """Decay-weighted interaction norm.

    ``sup_{x,y} sum_{Z contains x,y} ||phi_Z|| / F(x, y)``, taken over all
    translates inside ``box``, or over the whole lattice Z^d when ``box`` is
    None.
    """
    if phi.is_zero():
        return 0.0
    acc: dict = {}
    if box is None and phi.translation_invariant:
        # fix x = 0 and run over every translate of every term containing 0
        for Z in phi._terms:
            nz = phi.term_norm(Z)
            for z in Z:
                v = _neg(z)
                for y in Z:
                    key = _shift(y, v)
                    acc[key] = acc.get(key, 0.0) + nz
        origin = tuple([0] * phi.dimension)
        return max(val / F(origin, y) for y, val in acc.items())
    if box is None:
        pairs = ((Z, phi.term_norm(Z)) for Z in phi._terms)
    else:
        pairs = _translate_norms(phi, box)
    for Z, nz in pairs:
        for x in Z:
            for y in Z:
                acc[(x, y)] = acc.get((x, y), 0.0) + nz
    if not acc:
        return 0.0
    return max(val / F(x, y) for (x, y), val in acc.items())


def _translate_norms(phi: Interaction, box: LatticeBox):
    sites = box.site_set()
    for Z in phi._terms:
        nz = phi.term_norm(Z)
        if not phi.translation_invariant:
            if set(Z) <= sites:
                yield Z, nz
            continue
        for x in box.sites:
            Zx = tuple(_shift(z, x) for z in Z)
            if set(Zx) <= sites:
                yield Zx, nz


def _region_box(box: LatticeBox, region) -> LatticeBox:
    if region is None:
        return box
    sites = region.sites if isinstance(region, LatticeBox) else region
    sub = LatticeBox(tuple(sites), box.spins)
    if not sub.site_set() <= box.site_set():
        raise DomainError("region must be contained in the box")
    return sub


def _energy_sparse(phi: Interaction, box: LatticeBox, region=None) -> sp.csr_matrix:
    sub = _region_box(box, region)
    key = (box, sub.sites)
    cached = phi._energy_cache.get(key)
    if cached is not None:
        return cached
    if not phi.fits(sub):
        raise DomainError(f"box is too small for a term of {phi!r}")
    dim = box.fock_dim
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for Z, poly in phi.translates_in(sub):
        total = total + _sparse_matrix(poly, box)
    phi._energy_cache[key] = total
    return total


def local_energy(phi: Interaction, box: LatticeBox, region=None) -> FockOperator:
    """Boxed energy ``U^phi = sum_{Z in box} phi_Z``.

    Parameters
    ----------
    region : LatticeBox or sequence of sites, optional
        Only terms inside ``region`` are summed; the matrix still acts on the
        Fock space of ``box``.

    Raises
    ------
    DomainError
        If some canonical term has no translate inside the box.
    """
    sub = _region_box(box, region)
    return FockOperator(_energy_sparse(phi, box, region).toarray(), box, sub.site_set())


def _default_anchor(support: frozenset, box: LatticeBox, ell: tuple):
    """Site of ``box`` on the period sublattice, nearest to the origin, at
    which ``support`` fits."""
    candidates = [x for x in box.sites if all(c % l == 0 for c, l in zip(x, ell))]
    candidates.sort(key=lambda x: (sum(c * c for c in x), x))
    for x in candidates:
        if all(box.contains(_shift(s, x)) for s in support):
            return x
    raise DomainError("box is too small for the support of the energy-per-site observable")


def energy_per_site_poly(phi: Interaction, ell=1) -> LocalPolynomial:
    """Symbolic energy per site ``(prod ell)^-1 sum_{x in cell} sum_{Z ∋ x} phi_Z / |Z|``."""
    if not phi.translation_invariant:
        raise DomainError("energy per site needs a translation invariant interaction")
    dim = phi.dimension or (len(ell) if not isinstance(ell, numbers.Integral) else 1)
    ell = _as_period(ell, dim)
    total = LocalPolynomial()
    for x in itertools.product(*(range(l) for l in ell)):
        for Z, poly in phi._terms.items():
            for z in Z:
                v = tuple(a - b for a, b in zip(x, z))
                total = total + translate(poly, v) * (1.0 / len(Z))
    return total * (1.0 / math.prod(ell))


def _as_period(ell, dim) -> tuple:
    if isinstance(ell, numbers.Integral):
        ell = (int(ell),) * dim
    ell = tuple(int(v) for v in ell)
    if len(ell) != dim or any(v < 1 for v in ell):
        raise DomainError(f"period {ell} must be a positive {dim}-vector")
    return ell


def energy_per_site(phi: Interaction, ell, box: LatticeBox, anchor=None) -> FockOperator:
    """Energy-per-site observable realized on ``box``.

    Parameters
    ----------
    anchor : site, optional
        Position of the period cell origin.  Defaults to the sublattice site
        nearest the origin where the observable fits.
    """
    poly = energy_per_site_poly(phi, ell)
    ell_t = _as_period(ell, box.dimension)
    if anchor is None:
        anchor = _default_anchor(poly.support, box, ell_t)
    return instantiate(poly, box, anchor)


# ---------------------------------------------------------------------------
# Long-range models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """Point mass of weight ``weight`` at a tuple of interactions."""

    weight: float
    interactions: tuple

    def __post_init__(self):
        w = complex(self.weight)
        if abs(w.imag) > 1e-14:
            raise DomainError("atom weights must be real")
        object.__setattr__(self, "weight", float(w.real))
        object.__setattr__(self, "interactions", tuple(self.interactions))
        if not self.interactions:
            raise DomainError("an atom needs at least one interaction")

    @property
    def order(self) -> int:
        return len(self.interactions)

    def reversal_adjoint(self) -> tuple:
        return tuple(psi.adjoint() for psi in reversed(self.interactions))

    def same_tuple(self, other: tuple, atol: float = 1e-12) -> bool:
        return len(other) == self.order and all(
            a.isclose(b, atol) for a, b in zip(self.interactions, other)
        )


class LongRangeModel:
    """Short-range interaction plus weighted atoms on tuples of interactions.

    Parameters
    ----------
    phi : Interaction
        Self-adjoint short-range part.
    atoms : iterable of Atom or (weight, tuple of Interaction)
    decay : DecayFunction
        Kernel defining the unit sphere of interactions.
    normalize : bool
        Rescale tuple entries to unit norm, folding the norms into weights.
    symmetrize : bool
        Make the atom list closed under reversal-adjoint by splitting weights.
    """

    def __init__(self, phi: Interaction, atoms: Iterable = (), decay: DecayFunction | None = None,
                 normalize: bool = True, symmetrize: bool = True, name: str | None = None):
        self.decay = decay or DecayFunction()
        if not phi.is_self_adjoint(1e-10):
            raise DomainError("the short-range part of a model must be self-adjoint")
        self.phi = phi
        self.name = name
        parsed = []
        for a in atoms:
            if not isinstance(a, Atom):
                a = Atom(a[0], tuple(a[1]))
            if normalize:
                w = a.weight
                entries = []
                for psi in a.interactions:
                    nrm = w_norm(psi, self.decay)
                    if nrm == 0:
                        raise DomainError("atom tuples cannot contain the zero interaction")
                    w *= nrm
                    entries.append(psi / nrm)
                a = Atom(w, tuple(entries))
            else:
                for psi in a.interactions:
                    if abs(w_norm(psi, self.decay) - 1.0) > 1e-10:
                        raise DomainError("atom tuple entries must have unit norm")
            if a.weight != 0:
                parsed.append(a)
        self.atoms = tuple(_symmetrize(parsed) if symmetrize else parsed)

    @property
    def orders(self) -> list:
        return sorted({a.order for a in self.atoms})

    def is_symmetric(self, atol: float = 1e-12) -> bool:
        """Whether the atom list is closed under reversal-adjoint with equal weights."""
        for a in self.atoms:
            partner = a.reversal_adjoint()
            same = sum(b.weight for b in self.atoms if b.same_tuple(partner, atol))
            own = sum(b.weight for b in self.atoms if b.same_tuple(a.interactions, atol))
            if abs(same - own) > atol:
                return False
        return True

    def with_phi(self, phi: Interaction) -> "LongRangeModel":
        m = LongRangeModel.__new__(LongRangeModel)
        m.__dict__.update(self.__dict__)
        m.phi = phi
        return m

    def with_weights(self, weights: Sequence[float]) -> "LongRangeModel":
        m = LongRangeModel.__new__(LongRangeModel)
        m.__dict__.update(self.__dict__)
        m.atoms = tuple(Atom(w, a.interactions) for w, a in zip(weights, self.atoms))
        return m

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<LongRangeModel{label}: {len(self.atoms)} atoms, orders {self.orders}>"


def _symmetrize(atoms: list) -> list:
    out = []
    used = [False] * len(atoms)
    for i, a in enumerate(atoms):
        if used[i]:
            continue
        partner = a.reversal_adjoint()
        if a.same_tuple(partner):
            out.append(a)
            used[i] = True
            continue
        match = None
        for j in range(i + 1, len(atoms)):
            if not used[j] and atoms[j].same_tuple(partner) and abs(atoms[j].weight - a.weight) <= 1e-14:
                match = j
                break
        used[i] = True
        if match is not None:
            used[match] = True
            out.extend([a, atoms[match]])
        else:
            out.extend([Atom(a.weight / 2, a.interactions), Atom(a.weight / 2, partner)])
    return out


def model_norm(m: LongRangeModel, F: DecayFunction | None = None) -> float:
    """``||phi||_W + sum_n n^2 ||F||_1^(n-1) sum |weights of order n|`` on Z^d."""
    F = F or m.decay
    f1 = lattice_norm_one(F)
    total = w_norm(m.phi, F)
    for a in m.atoms:
        total += a.order ** 2 * f1 ** (a.order - 1) * abs(a.weight)
    return total


def local_hamiltonian(m: LongRangeModel, box: LatticeBox, region=None) -> FockOperator:
    """``U^phi + sum_atoms w |box|^-(n-1) U^{psi_1} ... U^{psi_n}`` on ``box``.

    With ``region`` given, every energy is restricted to the region (and the
    volume is that of the region) while the matrix acts on ``box``.
    """
    sub = _region_box(box, region)
    if m.phi.is_zero():
        H = np.zeros((box.fock_dim,) * 2, complex)
    else:
        H = _energy_sparse(m.phi, box, region).toarray()
    vol = float(sub.n_sites)
    for a in m.atoms:
        prod = None
        for psi in a.interactions:
            u = _energy_sparse(psi, box, region)
            prod = u.toarray() if prod is None else np.asarray(prod @ u)
        H = H + a.weight * vol ** (-(a.order - 1)) * prod
    return FockOperator(H, box, sub.site_set())


def sesquilinear_to_order2(gamma: float, psi: Interaction, F: DecayFunction | None = None) -> list:
    """Atoms realizing ``gamma |box|^-1 (U^psi)* U^psi`` as an order-2 term.

    The atom sits at ``(psi*/||psi||, psi/||psi||)`` with weight
    ``gamma ||psi||^2``; it is its own reversal-adjoint.
    """
    F = F or DecayFunction(dimension=psi.dimension or 1)
    nrm = w_norm(psi, F)
    if nrm == 0:
        raise DomainError("cannot build a quadratic term from the zero interaction")
    unit = psi / nrm
    return [Atom(gamma * nrm ** 2, (unit.adjoint(), unit))]


def random_interaction(rng: np.random.Generator, spins: Sequence = (0,), dimension: int = 1, max_range: int = 2,
                       n_terms: int = 2, self_adjoint: bool = True, scale: float = 1.0) -> Interaction:
    """Random finite-range translation invariant interaction.

    Each term lives on the origin plus a random subset of sites at distance
    at most ``max_range`` along the first axis; its polynomial is even and
    contains the origin.
    """
    terms = []
    for _ in range(n_terms):
        others = [r for r in range(1, max_range + 1) if rng.random() < 0.5]
        Z = [tuple([0] * dimension)] + [tuple([r] + [0] * (dimension - 1)) for r in others]
        poly = random_polynomial(rng, Z, spins, n_terms=2, max_degree=4, even=True, self_adjoint=self_adjoint)
        poly = poly - LocalPolynomial.constant(poly.terms.get((), 0.0))
        if not poly.is_zero():
            terms.append((tuple(Z), poly * scale))
    return Interaction(terms, True, name="random", spins=spins)
