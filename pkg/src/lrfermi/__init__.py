"""Exact-diagonalization toolkit for lattice fermions with long-range mean-field interactions.

Submodules
----------
fock
    Lattice boxes, polynomials in creation/annihilation operators and their
    Jordan-Wigner matrices.
interactions
    Decay functions, short-range interactions, their norms and local
    energies, long-range models.
dynamics
    Autonomous and non-autonomous Heisenberg dynamics and numerical checks
    of Lieb-Robinson type estimates.
statespace
    Density matrices, periodic product states, polynomial state functions
    and their Poisson bracket.
meanfield
    Self-consistency solver and classical mean-field flow.
models
    BCS and number-squared models.
harness
    Scenario configuration, verification suites and command line interface.
"""

from .errors import ConfigError, ConvergenceError, DomainError, IntegrationError
from .fock import FockOperator, LatticeBox, LocalPolynomial, annihilator, creator, instantiate
from .interactions import DecayFunction, Interaction, LongRangeModel, local_hamiltonian, model_norm, w_norm
from .dynamics import Schedule, TimeDependentInteraction, heisenberg, heisenberg_nonautonomous
from .statespace import DensityState, StateFunction, expect, poisson_bracket, product_state
from .meanfield import SolverConfig, Trajectory, flow_apply, solve_selfconsistency
from .models import build_bcs, build_number_squared

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DecayFunction",
    "DensityState",
    "DomainError",
    "FockOperator",
    "IntegrationError",
    "Interaction",
    "LatticeBox",
    "LocalPolynomial",
    "LongRangeModel",
    "Schedule",
    "SolverConfig",
    "StateFunction",
    "TimeDependentInteraction",
    "Trajectory",
    "annihilator",
    "build_bcs",
    "build_number_squared",
    "creator",
    "expect",
    "flow_apply",
    "heisenberg",
    "heisenberg_nonautonomous",
    "instantiate",
    "local_hamiltonian",
    "model_norm",
    "poisson_bracket",
    "product_state",
    "solve_selfconsistency",
    "w_norm",
]

__version__ = "0.1.0"
