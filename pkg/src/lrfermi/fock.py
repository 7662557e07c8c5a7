"""Exact matrix representation of the CAR algebra on finite boxes.

Modes are ordered lexicographically by (site, spin index), site-major, and the
Jordan-Wigner string runs over all modes that precede the acted-on mode.  In
the occupation basis the integer label ``b`` stores the occupation of mode
``j`` in bit ``N - 1 - j``, so mode 0 is the most significant qubit and the
basis ordering coincides with ``numpy.kron`` ordering of single-mode factors.

Symbolic operators (:class:`LocalPolynomial`) are kept in a normal form and are
only turned into matrices by :func:`instantiate`, which builds every matrix of
a box from one shared set of sparse generators.
"""

from __future__ import annotations

import functools
import itertools
import numbers
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError

#: Largest number of modes for which dense matrices are built.
MAX_DENSE_MODES = 14

#: Default tolerance for algebraic identities.
ATOL = 1e-12

Site = tuple


def _as_site(site, dimension=None) -> tuple:
    if isinstance(site, numbers.Integral):
        site = (int(site),)
    site = tuple(int(v) for v in site)
    if dimension is not None and len(site) != dimension:
        raise DomainError(f"site {site} does not have dimension {dimension}")
    return site


# ---------------------------------------------------------------------------
# Boxes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeBox:
    """Finite set of lattice sites carrying a fixed list of spin labels.

    Parameters
    ----------
    sites : tuple of tuple of int
        Sites as integer d-vectors.  Stored sorted lexicographically.
    spins : tuple
        Ordered spin labels.  A spinless system uses a single label.
    radius : int or None
        Set when the box is the cube ``{x : |x_i| <= radius}``.
    """

    sites: tuple
    spins: tuple = (0,)
    radius: int | None = field(default=None, compare=False)

    def __post_init__(self):
        sites = tuple(sorted({_as_site(s) for s in self.sites}))
        if not sites:
            raise DomainError("a box needs at least one site")
        dims = {len(s) for s in sites}
        if len(dims) != 1:
            raise DomainError("all sites of a box must share one dimension")
        spins = tuple(self.spins)
        if not spins or len(set(spins)) != len(spins):
            raise DomainError("spin labels must be a non-empty list without repeats")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "spins", spins)

    @classmethod
    def cube(cls, dimension: int, radius: int, spins: Sequence = (0,)) -> "LatticeBox":
        """Return the cube ``{x in Z^d : |x_i| <= radius}``."""
        if dimension < 1 or radius < 0:
            raise DomainError("need dimension >= 1 and radius >= 0")
        axis = range(-radius, radius + 1)
        sites = tuple(itertools.product(axis, repeat=dimension))
        return cls(sites, tuple(spins), radius)

    @classmethod
    def chain(cls, n_sites: int, spins: Sequence = (0,), start: int | None = None) -> "LatticeBox":
        """Return ``n_sites`` consecutive sites of Z.

        By default the chain is centred so that it contains the origin:
        ``{-(n-1)//2, ..., n//2}``.
        """
        if n_sites < 1:
            raise DomainError("a chain needs at least one site")
        if start is None:
            start = -((n_sites - 1) // 2)
        sites = tuple((start + k,) for k in range(n_sites))
        return cls(sites, tuple(spins))

    @property
    def dimension(self) -> int:
        return len(self.sites[0])

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def __len__(self) -> int:
        return len(self.sites)

    @property
    def n_modes(self) -> int:
        return len(self.sites) * len(self.spins)

    @property
    def fock_dim(self) -> int:
        return 2 ** self.n_modes

    @functools.cached_property
    def _site_index(self) -> dict:
        return {s: i for i, s in enumerate(self.sites)}

    @functools.cached_property
    def _spin_index(self) -> dict:
        return {s: i for i, s in enumerate(self.spins)}

    def contains(self, site) -> bool:
        return _as_site(site) in self._site_index

    def site_index(self, site) -> int:
        try:
            return self._site_index[_as_site(site)]
        except KeyError:
            raise DomainError(f"site {site} is not in the box") from None

    def mode_index(self, site, spin) -> int:
        """Position of mode ``(site, spin)`` in the global mode order."""
        if spin not in self._spin_index:
            raise DomainError(f"spin {spin!r} is not in the box spin set {self.spins}")
        return self.site_index(site) * len(self.spins) + self._spin_index[spin]

    def modes(self) -> list:
        """All modes ``(site, spin)`` in mode order."""
        return [(s, sp_) for s in self.sites for sp_ in self.spins]

    def site_set(self) -> frozenset:
        return frozenset(self.sites)


# ---------------------------------------------------------------------------
# Symbolic operators
# ---------------------------------------------------------------------------


def _factor_key(factor):
    site, spin, dagger = factor
    return (0 if dagger else 1, site, str(spin))


def _normal_order(factors: tuple, coef: complex) -> dict:
    """Rewrite a word of creation/annihilation factors into normal form.

    Returns a mapping from sorted factor tuples to coefficients, using the
    anticommutation relations.  Daggered factors come first; each group is
    sorted by mode.  A repeated factor annihilates the word.
    """
    out: dict = {}
    stack = [(factors, coef)]
    while stack:
        word, c = stack.pop()
        for i in range(len(word) - 1):
            f, g = word[i], word[i + 1]
            kf, kg = _factor_key(f), _factor_key(g)
            if kf < kg:
                continue
            if f == g:
                break  # a^2 = 0 and (a^*)^2 = 0
            head, tail = word[:i], word[i + 2:]
            if f[0] == g[0] and f[1] == g[1]:
                # a a^* = 1 - a^* a
                stack.append((head + tail, c))
            stack.append((head + (g, f) + tail, -c))
            break
        else:
            out[word] = out.get(word, 0) + c
    return out


@dataclass(frozen=True)
class FermionMonomial:
    """A coefficient times an ordered product of creation/annihilation factors.

    Parameters
    ----------
    coefficient : complex
    factors : tuple of (site, spin, dagger)
        ``dagger`` is True for a creation operator.  Sites are offsets.
    """

    coefficient: complex
    factors: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(
            self, "factors", tuple((_as_site(s), sp_, bool(d)) for s, sp_, d in self.factors)
        )

    def normal_form(self) -> "LocalPolynomial":
        return LocalPolynomial._from_raw(_normal_order(self.factors, self.coefficient))


class LocalPolynomial:
    """Finite linear combination of normal-ordered fermionic monomials.

    Instances are treated as immutable.  Arithmetic keeps the normal form, so
    two polynomials representing the same algebra element compare equal.

    Parameters
    ----------
    monomials : iterable of FermionMonomial, optional
        Monomials in any order; they are normal ordered on construction.
    """

    __slots__ = ("_terms",)
    __hash__ = None

    def __init__(self, monomials: Iterable[FermionMonomial] = ()):
        terms: dict = {}
        for m in monomials:
            for word, c in _normal_order(m.factors, m.coefficient).items():
                terms[word] = terms.get(word, 0) + c
        self._terms = _prune(terms)

    @classmethod
    def _from_raw(cls, terms: Mapping) -> "LocalPolynomial":
        obj = cls.__new__(cls)
        obj._terms = _prune(dict(terms))
        return obj

    # constructors --------------------------------------------------------
    @classmethod
    def constant(cls, value: complex) -> "LocalPolynomial":
        return cls._from_raw({(): complex(value)})

    @classmethod
    def creator(cls, site, spin=0) -> "LocalPolynomial":
        return cls._from_raw({((_as_site(site), spin, True),): 1.0})

    @classmethod
    def annihilator(cls, site, spin=0) -> "LocalPolynomial":
        return cls._from_raw({((_as_site(site), spin, False),): 1.0})

    @classmethod
    def number(cls, site, spin=0) -> "LocalPolynomial":
        s = _as_site(site)
        return cls._from_raw({((s, spin, True), (s, spin, False)): 1.0})

    @classmethod
    def hopping(cls, x, y, spin=0, amplitude: complex = 1.0) -> "LocalPolynomial":
        """Return ``t a*_x a_y + conj(t) a*_y a_x``."""
        t = complex(amplitude)
        return cls.monomial(t, [(x, spin, True), (y, spin, False)]) + cls.monomial(
            np.conj(t), [(y, spin, True), (x, spin, False)]
        )

    @classmethod
    def monomial(cls, coefficient, factors) -> "LocalPolynomial":
        return FermionMonomial(coefficient, tuple(factors)).normal_form()

    # inspection ----------------------------------------------------------
    @property
    def terms(self) -> dict:
        """Copy of the normal-form mapping ``factors -> coefficient``."""
        return dict(self._terms)

    def monomials(self) -> list:
        return [FermionMonomial(c, w) for w, c in self._terms.items()]

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def support(self) -> frozenset:
        return frozenset(f[0] for w in self._terms for f in w)

    @property
    def spins(self) -> frozenset:
        return frozenset(f[1] for w in self._terms for f in w)

    @property
    def parity(self) -> int | None:
        """0 for even, 1 for odd, None when parities are mixed (zero is even)."""
        parities = {len(w) % 2 for w in self._terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def is_even(self) -> bool:
        return self.parity == 0

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    # algebra -------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, numbers.Number):
            other = LocalPolynomial.constant(other)
        if not isinstance(other, LocalPolynomial):
            return NotImplemented
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms.get(w, 0) + c
        return LocalPolynomial._from_raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return LocalPolynomial._from_raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return LocalPolynomial._from_raw({w: c * other for w, c in self._terms.items()})
        if not isinstance(other, LocalPolynomial):
            return NotImplemented
        terms: dict = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                for w, c in _normal_order(w1 + w2, c1 * c2).items():
                    terms[w] = terms.get(w, 0) + c
        return LocalPolynomial._from_raw(terms)

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return self * other
        return NotImplemented

    __matmul__ = __mul__

    def adjoint(self) -> "LocalPolynomial":
        terms: dict = {}
        for w, c in self._terms.items():
            word = tuple((s, sp_, not d) for s, sp_, d in reversed(w))
            for w2, c2 in _normal_order(word, np.conj(c)).items():
                terms[w2] = terms.get(w2, 0) + c2
        return LocalPolynomial._from_raw(terms)

    @property
    def dag(self) -> "LocalPolynomial":
        return self.adjoint()

    def translate(self, shift) -> "LocalPolynomial":
        return translate(self, shift)

    def isclose(self, other: "LocalPolynomial", atol: float = ATOL) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0) - other._terms.get(k, 0)) <= atol for k in keys)

    def __eq__(self, other):
        if not isinstance(other, LocalPolynomial):
            return NotImplemented
        return self.isclose(other)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __repr__(self):
        if not self._terms:
            return "LocalPolynomial(0)"
        parts = []
        for w, c in sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0].__repr__())):
            ops = " ".join(("c+" if d else "c-") + f"{list(s)}{sp_}" for s, sp_, d in w)
            parts.append(f"({c:.6g}) {ops}".strip())
        return "LocalPolynomial(" + " + ".join(parts) + ")"


def _prune(terms: dict) -> dict:
    return {w: complex(c) for w, c in terms.items() if c != 0 and abs(c) > 1e-15}


def translate(poly: LocalPolynomial, shift) -> LocalPolynomial:
    """Shift every site offset of ``poly`` by ``shift``.

    Translations only relabel sites, so the normal form is reused unless the
    shift changes the relative order of sites (it never does).
    """
    shift = _as_site(shift)
    if not any(shift):
        return poly
    terms = {}
    for w, c in poly._terms.items():
        terms[tuple((tuple(a + b for a, b in zip(s, shift)), sp_, d) for s, sp_, d in w)] = c
    return LocalPolynomial._from_raw(terms)


# ---------------------------------------------------------------------------
# Literal parsing
# ---------------------------------------------------------------------------


def _parse_spin(token: str):
    try:
        return int(token)
    except ValueError:
        return token


def parse_factor(token: str, default_spin=0) -> tuple:
    """Parse ``"c+ x s"`` or ``"c- x s"`` into a ``(site, spin, dagger)`` factor.

    The offset ``x`` is an integer or a comma separated integer vector such as
    ``1,0``.  The spin may be omitted for spinless systems.
    """
    parts = token.split()
    if len(parts) not in (2, 3) or parts[0] not in ("c+", "c-"):
        raise DomainError(f"cannot parse operator token {token!r}")
    site = tuple(int(v) for v in parts[1].strip("()[]").split(",") if v != "")
    spin = _parse_spin(parts[2]) if len(parts) == 3 else default_spin
    return (site, spin, parts[0] == "c+")


def parse_monomial(ops: Sequence[str], coef=(1.0, 0.0), default_spin=0) -> FermionMonomial:
    """Build a monomial from operator tokens and an ``(re, im)`` coefficient."""
    if isinstance(coef, numbers.Number):
        c = complex(coef)
    else:
        re, im = coef
        c = complex(float(re), float(im))
    return FermionMonomial(c, tuple(parse_factor(t, default_spin) for t in ops))


def parse_polynomial(items: Sequence[Mapping], default_spin=0) -> LocalPolynomial:
    """Build a polynomial from a list of ``{coef: [re, im], ops: [...]}`` records."""
    monos = []
    for item in items:
        monos.append(parse_monomial(item.get("ops", []), item.get("coef", (1.0, 0.0)), default_spin))
    return LocalPolynomial(monos)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def _generators(box: LatticeBox) -> tuple:
    """Sparse Jordan-Wigner annihilators for every mode of ``box``."""
    n = box.n_modes
    if n > MAX_DENSE_MODES:
        raise DomainError(f"box has {n} modes; dense matrices are capped at {MAX_DENSE_MODES}")
    dim = 2 ** n
    basis = np.arange(dim, dtype=np.int64)
    gens = []
    for j in range(n):
        bit = 1 << (n - 1 - j)
        occupied = basis[(basis & bit) != 0]
        string = np.bitwise_count(occupied >> (n - j)) if j > 0 else np.zeros_like(occupied)
        signs = np.where(string % 2 == 0, 1.0, -1.0)
        mat = sp.csr_matrix((signs, (occupied ^ bit, occupied)), shape=(dim, dim))
        gens.append(mat)
    return tuple(gens)


@functools.lru_cache(maxsize=64)
def parity_diagonal(box: LatticeBox) -> np.ndarray:
    """Diagonal of the parity unitary ``prod_j (1 - 2 n_j)``."""
    basis = np.arange(box.fock_dim, dtype=np.int64)
    return np.where(np.bitwise_count(basis) % 2 == 0, 1.0, -1.0)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Dense operator on the Fock space of a box.

    Parameters
    ----------
    matrix : ndarray of complex, shape (2**N, 2**N)
    box : LatticeBox
    support : frozenset of sites
        Sites outside of which the operator acts as the identity.  Defaults
        to the whole box.
    """

    matrix: np.ndarray
    box: LatticeBox
    support: frozenset = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.box.fock_dim
        if m.shape != (d, d):
            raise DomainError(f"matrix shape {m.shape} does not match Fock dimension {d}")
        object.__setattr__(self, "matrix", m)
        sup = self.box.site_set() if self.support is None else frozenset(_as_site(s) for s in self.support)
        object.__setattr__(self, "support", sup)

    def _check(self, other: "FockOperator"):
        if other.box != self.box:
            raise DomainError("operators live on different boxes")

    def __add__(self, other):
        if isinstance(other, numbers.Number):
            return FockOperator(self.matrix + other * np.eye(self.box.fock_dim), self.box, self.support)
        self._check(other)
        return FockOperator(self.matrix + other.matrix, self.box, self.support | other.support)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FockOperator(-self.matrix, self.box, self.support)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return FockOperator(self.matrix * other, self.box, self.support)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FockOperator(self.matrix / other, self.box, self.support)

    def __matmul__(self, other):
        self._check(other)
        return FockOperator(self.matrix @ other.matrix, self.box, self.support | other.support)

    @property
    def dag(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T, self.box, self.support)

    def commutator(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        m = self.matrix @ other.matrix - other.matrix @ self.matrix
        return FockOperator(m, self.box, self.support | other.support)

    def norm(self) -> float:
        return operator_norm(self)

    def is_hermitian(self, atol: float = ATOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= atol)

    def is_even(self, atol: float = ATOL) -> bool:
        p = parity_diagonal(self.box)
        return bool(np.max(np.abs(self.matrix * (1 - np.outer(p, p)) / 2), initial=0.0) <= atol)


def identity(box: LatticeBox) -> FockOperator:
    return FockOperator(np.eye(box.fock_dim, dtype=complex), box, frozenset())


def zero_operator(box: LatticeBox) -> FockOperator:
    return FockOperator(np.zeros((box.fock_dim,) * 2, dtype=complex), box, frozenset())


def annihilator(box: LatticeBox, site, spin=None) -> FockOperator:
    """Jordan-Wigner matrix of ``a_{site, spin}`` on ``box``.

    ``spin`` defaults to the only label of a spinless box.
    """
    if spin is None:
        if len(box.spins) != 1:
            raise DomainError("spin must be given for a box with several spin labels")
        spin = box.spins[0]
    j = box.mode_index(site, spin)
    return FockOperator(_generators(box)[j].toarray(), box, frozenset([_as_site(site)]))


def creator(box: LatticeBox, site, spin=None) -> FockOperator:
    return annihilator(box, site, spin).dag


def instantiate(poly: LocalPolynomial, box: LatticeBox, anchor=None) -> FockOperator:
    """Realize a symbolic polynomial as a matrix on ``box``.

    Parameters
    ----------
    poly : LocalPolynomial
    box : LatticeBox
    anchor : site, optional
        Offsets of ``poly`` are shifted by ``anchor``.  Defaults to the origin.

    Raises
    ------
    DomainError
        If a shifted site or a spin label is not part of the box.
    """
    return FockOperator(_sparse_matrix(poly, box, anchor).toarray(), box, _shifted_support(poly, box, anchor))


def _shifted_support(poly, box, anchor):
    if anchor is None:
        return poly.support
    a = _as_site(anchor, box.dimension)
    return frozenset(tuple(x + y for x, y in zip(s, a)) for s in poly.support)


def _sparse_matrix(poly: LocalPolynomial, box: LatticeBox, anchor=None) -> sp.csr_matrix:
    gens = _generators(box)
    dim = box.fock_dim
    shift = None if anchor is None else _as_site(anchor, box.dimension)
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for word, c in poly._terms.items():
        if not word:
            total = total + c * sp.identity(dim, dtype=complex, format="csr")
            continue
        mat = None
        for site, spin, dagger in word:
            if shift is not None:
                site = tuple(a + b for a, b in zip(site, shift))
            if len(site) != box.dimension or not box.contains(site):
                raise DomainError(f"site {site} of the polynomial lies outside the box")
            g = gens[box.mode_index(site, spin)]
            g = g.T.tocsr() if dagger else g
            mat = g if mat is None else mat @ g
        total = total + c * mat
    return total


def parity_map(A: FockOperator) -> FockOperator:
    """Apply the parity automorphism, ``sigma(a) = -a``."""
    p = parity_diagonal(A.box)
    return FockOperator(A.matrix * np.outer(p, p), A.box, A.support)


def even_part(A: FockOperator) -> FockOperator:
    return (A + parity_map(A)) * 0.5


def odd_part(A: FockOperator) -> FockOperator:
    return (A - parity_map(A)) * 0.5


def trace_state(A: FockOperator) -> complex:
    """Normalized trace ``tr(A) / 2**N``."""
    return complex(np.trace(A.matrix) / A.box.fock_dim)


def operator_norm(A) -> float:
    """Largest singular value; Hermitian inputs use the eigenvalue solver."""
    m = A.matrix if isinstance(A, FockOperator) else np.asarray(A)
    if m.size == 0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) <= ATOL * scale:
        w = np.linalg.eigvalsh((m + m.conj().T) / 2)
        return float(np.max(np.abs(w)))
    return float(np.linalg.norm(m, 2))


def random_polynomial(rng: np.random.Generator, sites: Sequence, spins: Sequence = (0,), n_terms: int = 3,
                      max_degree: int = 4, even: bool = True, self_adjoint: bool = False) -> LocalPolynomial:
    """Random polynomial in the generators attached to ``sites``.

    Each monomial has a random number of factors (even when ``even``) drawn
    uniformly from the modes of ``sites``, with complex normal coefficients.
    """
    modes = [(_as_site(x), s) for x in sites for s in spins]
    out = LocalPolynomial()
    for _ in range(n_terms):
        degrees = range(0, max_degree + 1, 2) if even else range(0, max_degree + 1)
        k = int(rng.choice(list(degrees)))
        factors = []
        for _ in range(k):
            x, s = modes[int(rng.integers(len(modes)))]
            factors.append((x, s, bool(rng.integers(2))))
        coef = complex(rng.normal(), rng.normal())
        out = out + LocalPolynomial.monomial(coef, factors)
    if self_adjoint:
        out = (out + out.adjoint()) * 0.5
    return out
