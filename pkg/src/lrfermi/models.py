"""Ready-made long-range models: BCS and the number-squared model."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError
from .fock import LocalPolynomial, _as_site
from .interactions import (
    DecayFunction,
    Interaction,
    LongRangeModel,
    number_interaction,
    sesquilinear_to_order2,
    single_site_interaction,
)

SPINFUL = ("up", "down")


def pairing_interaction(spins: Sequence = SPINFUL, dimension: int = 1) -> Interaction:
    """On-site pair annihilation ``a_{x,down} a_{x,up}``."""
    up, down = spins
    o = tuple([0] * dimension)
    poly = LocalPolynomial.monomial(1.0, [(o, down, False), (o, up, False)])
    return single_site_interaction(poly, name="pairing", spins=spins)


def _kernel_table(h: Mapping, dimension: int) -> dict:
    table = {}
    for k, v in h.items():
        if isinstance(k, str):
            k = tuple(int(p) for p in k.strip("()[]").split(",") if p.strip())
        table[_as_site(k, dimension)] = complex(v)
    return table


def hopping_from_kernel(h: Mapping, mu: float = 0.0, spins: Sequence = SPINFUL, dimension: int = 1,
                        F: DecayFunction | None = None) -> Interaction:
    """Translation invariant interaction of ``sum h(x-y) a*_x a_y - mu N``.

    Parameters
    ----------
    h : mapping offset -> complex
        Kernel; must satisfy ``h(-x) = conj(h(x))`` and ``h(0)`` real.
    mu : float
        Chemical potential.
    F : DecayFunction, optional
        When given, ``sup |h(x)| / F(0, x)`` must be finite.

    Raises
    ------
    DomainError
        Naming the offending offset when the kernel is not Hermitian or
        violates the decay condition.
    """
    table = _kernel_table(h, dimension)
    origin = tuple([0] * dimension)
    for x, v in table.items():
        partner = table.get(tuple(-c for c in x), 0.0)
        if abs(partner - np.conj(v)) > 1e-12:
            raise DomainError(f"kernel is not Hermitian at offset {x}: h(-x) != conj(h(x))")
        if F is not None and v != 0:
            ratio = abs(v) / F(origin, x)
            if not math.isfinite(ratio):
                raise DomainError(f"kernel violates the decay condition at offset {x}")
    terms = []
    onsite = table.get(origin, 0.0).real - mu
    if onsite != 0:
        poly = sum((LocalPolynomial.number(origin, s) for s in spins), LocalPolynomial()) * onsite
        terms.append(((origin,), poly))
    for r, v in table.items():
        if r <= origin or v == 0:
            continue
        # h(-r) a*_0 a_r + h(r) a*_r a_0 is the pair term on {0, r}
        poly = LocalPolynomial()
        for s in spins:
            poly = poly + LocalPolynomial.hopping(origin, r, s, np.conj(v))
        terms.append(((origin, r), poly))
    return Interaction(terms, True, name="kinetic", spins=spins)


def build_bcs(h: Mapping | None = None, mu: float = 0.0, gamma: float = 1.0, F: DecayFunction | None = None,
              spins: Sequence = SPINFUL, dimension: int = 1) -> LongRangeModel:
    """Reduced BCS model with hopping kernel ``h``.

    The local Hamiltonian on a box ``Lambda`` is

        sum_{x,y,s} h(x-y) a*_{x,s} a_{y,s} - mu N - (gamma/|Lambda|) sum_{x,y} a*_{x,up} a*_{x,down} a_{y,down} a_{y,up}.

    The pairing term is a single order-2 atom at ``(P*, P)`` with ``P`` the
    on-site pair annihilator, of weight ``-gamma`` times ``||P||^2``.
    """
    if gamma < 0:
        raise DomainError("the BCS coupling must be non-negative")
    F = F or DecayFunction(dimension=dimension)
    phi = hopping_from_kernel(h or {}, mu, spins, dimension, F)
    atoms = []
    if gamma != 0:
        atoms = sesquilinear_to_order2(-gamma, pairing_interaction(spins, dimension), F)
    return LongRangeModel(phi, atoms, F, name="bcs")


def build_number_squared(spins: Sequence = (0,), dimension: int = 1, F: DecayFunction | None = None) -> LongRangeModel:
    """Model whose local Hamiltonian is ``N^2 / (2 |Lambda|)``."""
    F = F or DecayFunction(dimension=dimension)
    atoms = sesquilinear_to_order2(0.5, number_interaction(spins, dimension), F)
    return LongRangeModel(Interaction(), atoms, F, name="number-squared")
