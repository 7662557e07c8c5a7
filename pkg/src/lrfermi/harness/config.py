"""Scenario configuration: YAML schema, validation and builders.

A scenario document looks like::

    name: bcs-ladder
    seed: 0
    model:
      kind: bcs                 # bcs | number-squared | custom
      spins: [up, down]
      dimension: 1
      decay: {epsilon: 1.0, varsigma: 0.0}
      hopping: {"1": [-0.5, -0.15], "-1": [-0.5, 0.15]}   # offset -> [re, im]
      mu: 0.0
      gamma: 1.0
    ladder: [2, 3, 4]           # chain site counts in d = 1, cube radii otherwise
    state:
      kind: product             # trace | vacuum | filled | product | pure-product | random
      factors: [[...]]          # flattened (re, im) pairs of on-site matrices
      period: [1]
    time: {start: 0.0, stop: 1.0, steps: 11}     # or {grid: [...]}
    solver: {tolerance: 1.0e-10, max_iterations: 50, integrator_tolerance: 1.0e-12}
    variants: [e-density]
    methods: [picard, ode]      # picard | ode | exact
    outputs: [order_parameters, energy]

Custom models give ``phi`` and ``atoms`` as interaction literals::

    phi:
      - sites: [[0], [1]]
        terms: [{coef: [-1, 0], ops: ["c+ 0", "c- 1"]}, {coef: [-1, 0], ops: ["c+ 1", "c- 0"]}]
    atoms:
      - weight: 0.5
        interactions:
          - [{sites: [[0]], terms: [{coef: [1, 0], ops: ["c+ 0", "c- 0"]}]}]
          - [{sites: [[0]], terms: [{coef: [1, 0], ops: ["c+ 0", "c- 0"]}]}]

Extra outputs are polynomial literals ``{name: n0, terms: [{coef, ops}]}``.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from ..errors import ConfigError, DomainError
from ..fock import LatticeBox, parse_polynomial
from ..interactions import Atom, DecayFunction, Interaction, LongRangeModel
from ..meanfield import VARIANTS, SolverConfig
from ..models import build_bcs, build_number_squared
from ..statespace import (
    DensityState,
    filled_density,
    product_state,
    product_vector,
    pure_state,
    random_density,
    trace_density,
    vacuum_density,
)

MODEL_KINDS = ("bcs", "number-squared", "custom")
STATE_KINDS = ("trace", "vacuum", "filled", "product", "pure-product", "random")
METHODS = ("picard", "ode", "exact")
SOLVER_KEYS = {"tolerance", "max_iterations", "window", "integrator_tolerance", "period", "window_samples",
               "max_window", "convolution_constant"}


@dataclass
class Scenario:
    """Validated scenario.

    Attributes
    ----------
    name : str
    model : dict
        Raw model section; built lazily by :func:`build_model`.
    ladder : list of int
    state : dict
    times : ndarray
    solver : dict
    variants, methods : list of str
    outputs : list
    seed : int
    raw : dict
        The document the scenario was built from.
    """

    name: str
    model: dict
    ladder: list
    state: dict
    times: np.ndarray
    solver: dict = field(default_factory=dict)
    variants: list = field(default_factory=lambda: ["e-density"])
    methods: list = field(default_factory=lambda: ["picard"])
    outputs: list = field(default_factory=lambda: ["order_parameters"])
    seed: int = 0
    raw: dict = field(default_factory=dict)

    @property
    def spins(self) -> tuple:
        return tuple(self.model.get("spins", [0]))

    @property
    def dimension(self) -> int:
        return int(self.model.get("dimension", 1))

    def box(self, L: int) -> LatticeBox:
        """Box of rung ``L``: a centred chain of ``L`` sites in one dimension, a cube of radius ``L`` otherwise."""
        if self.dimension == 1:
            return LatticeBox.chain(L, self.spins)
        return LatticeBox.cube(self.dimension, L, self.spins)

    def solver_config(self, variant: str) -> SolverConfig:
        kw = dict(self.solver)
        if "period" in kw and isinstance(kw["period"], list):
            kw["period"] = tuple(kw["period"])
        return SolverConfig(variant=variant, **kw)


def _require(doc: Mapping, key: str, path: str, kind=None):
    if key not in doc:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required key")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"{path}.{key}" if path else key, f"expected {kind.__name__ if isinstance(kind, type) else kind}")
    return value


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "expected a number")
    return float(value)


def _complex(value, path: str) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(path, "complex numbers are written as [re, im]")
        return complex(_number(value[0], path), _number(value[1], path))
    return complex(_number(value, path))


def parse_scenario(doc: Mapping[str, Any]) -> Scenario:
    """Validate a scenario document.

    Raises
    ------
    ConfigError
        With the dotted path of the offending entry.
    """
    if not isinstance(doc, Mapping):
        raise ConfigError("", "scenario document must be a mapping")
    name = _require(doc, "name", "", str)
    model = _require(doc, "model", "", dict)
    kind = _require(model, "kind", "model", str)
    if kind not in MODEL_KINDS:
        raise ConfigError("model.kind", f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    ladder = _require(doc, "ladder", "", list)
    if not ladder or not all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in ladder):
        raise ConfigError("ladder", "expected a non-empty list of positive integers")
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError("ladder", "ladder must be strictly increasing")
    state = _require(doc, "state", "", dict)
    skind = _require(state, "kind", "state", str)
    if skind not in STATE_KINDS:
        raise ConfigError("state.kind", f"unknown state kind {skind!r}; expected one of {STATE_KINDS}")
    tsec = _require(doc, "time", "", dict)
    if "grid" in tsec:
        grid = [_number(v, f"time.grid[{i}]") for i, v in enumerate(tsec["grid"])]
    else:
        start = _number(tsec.get("start", 0.0), "time.start")
        stop = _number(_require(tsec, "stop", "time"), "time.stop")
        steps = tsec.get("steps", 11)
        if not isinstance(steps, int) or steps < 1:
            raise ConfigError("time.steps", "expected a positive integer")
        grid = list(np.linspace(start, stop, steps)) if steps > 1 else [stop]
    times = np.asarray(grid, dtype=float)
    if len(times) == 0:
        raise ConfigError("time", "time grid is empty")
    d = np.diff(times)
    if len(d) and not (np.all(d > 0) or np.all(d < 0)):
        raise ConfigError("time", "time grid must be strictly monotone")
    solver = dict(doc.get("solver", {}) or {})
    for key in solver:
        if key not in SOLVER_KEYS:
            raise ConfigError(f"solver.{key}", f"unknown solver option; expected one of {sorted(SOLVER_KEYS)}")
    variants = list(doc.get("variants", ["e-density"]))
    for i, v in enumerate(variants):
        if v not in VARIANTS:
            raise ConfigError(f"variants[{i}]", f"unknown variant {v!r}")
    methods = list(doc.get("methods", ["picard"]))
    for i, m in enumerate(methods):
        if m not in METHODS:
            raise ConfigError(f"methods[{i}]", f"unknown method {m!r}")
    outputs = list(doc.get("outputs", ["order_parameters"]))
    for i, o in enumerate(outputs):
        if isinstance(o, str):
            if o not in ("order_parameters", "energy", "purity", "particle_number"):
                raise ConfigError(f"outputs[{i}]", f"unknown output {o!r}")
        elif isinstance(o, Mapping):
            _require(o, "name", f"outputs[{i}]", str)
            _require(o, "terms", f"outputs[{i}]", list)
        else:
            raise ConfigError(f"outputs[{i}]", "expected a name or a polynomial literal")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed", "expected an integer")
    sc = Scenario(name, dict(model), list(ladder), dict(state), times, solver, variants, methods, outputs, seed,
                  copy.deepcopy(dict(doc)))
    # build once to surface semantic errors with their paths
    try:
        SolverConfig(**{k: v for k, v in solver.items() if k != "period"})
    except (DomainError, TypeError) as exc:
        raise ConfigError("solver", str(exc)) from exc
    build_model(sc)
    return sc


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a YAML scenario file."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"invalid YAML: {exc}") from exc
    return parse_scenario(doc)


def set_path(doc: dict, dotted: str, value) -> dict:
    """Copy of ``doc`` with the entry at ``dotted`` (e.g. ``model.gamma``) replaced."""
    out = copy.deepcopy(doc)
    node = out
    keys = dotted.split(".")
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            raise ConfigError(dotted, f"no mapping at {k!r}")
        node = node[k]
    node[keys[-1]] = value
    return out


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _decay(model: Mapping, dimension: int) -> DecayFunction:
    dec = model.get("decay", {}) or {}
    try:
        return DecayFunction(float(dec.get("epsilon", 1.0)), float(dec.get("varsigma", 0.0)), dimension)
    except DomainError as exc:
        raise ConfigError("model.decay", str(exc)) from exc


def _interaction(items, path: str, spins, default_spin) -> Interaction:
    if not isinstance(items, list):
        raise ConfigError(path, "expected a list of terms")
    terms = []
    for i, term in enumerate(items):
        p = f"{path}[{i}]"
        if not isinstance(term, Mapping):
            raise ConfigError(p, "expected a mapping with sites and terms")
        sites = [tuple(s) if isinstance(s, list) else (s,) for s in _require(term, "sites", p, list)]
        try:
            poly = parse_polynomial(_require(term, "terms", p, list), default_spin)
        except DomainError as exc:
            raise ConfigError(f"{p}.terms", str(exc)) from exc
        terms.append((sites, poly))
    try:
        return Interaction(terms, True, spins=spins)
    except DomainError as exc:
        raise ConfigError(path, str(exc)) from exc


def build_model(sc: Scenario) -> LongRangeModel:
    """Long-range model described by the scenario."""
    model = sc.model
    d = sc.dimension
    spins = sc.spins
    F = _decay(model, d)
    kind = model["kind"]
    try:
        if kind == "bcs":
            if len(spins) != 2:
                raise ConfigError("model.spins", "the BCS model needs two spin labels")
            h = {}
            for k, v in (model.get("hopping", {}) or {}).items():
                h[str(k)] = _complex(v, f"model.hopping.{k}")
            gamma = _number(model.get("gamma", 1.0), "model.gamma")
            mu = _number(model.get("mu", 0.0), "model.mu")
            return build_bcs(h, mu, gamma, F, spins, d)
        if kind == "number-squared":
            return build_number_squared(spins, d, F)
        default_spin = spins[0]
        phi = _interaction(model.get("phi", []) or [], "model.phi", spins, default_spin)
        atoms = []
        for i, a in enumerate(model.get("atoms", []) or []):
            p = f"model.atoms[{i}]"
            w = _number(_require(a, "weight", p), f"{p}.weight")
            inters = [_interaction(x, f"{p}.interactions[{j}]", spins, default_spin)
                      for j, x in enumerate(_require(a, "interactions", p, list))]
            atoms.append(Atom(w, tuple(inters)))
        return LongRangeModel(phi, atoms, F, name=sc.name)
    except DomainError as exc:
        raise ConfigError("model", str(exc)) from exc


def _matrix(flat, n: int, path: str) -> np.ndarray:
    vals = [_number(v, path) for v in flat]
    if len(vals) != 2 * n * n:
        raise ConfigError(path, f"expected {2 * n * n} numbers (re, im pairs of a {n}x{n} matrix)")
    arr = np.asarray(vals).reshape(n * n, 2)
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n)


def _vector(flat, n: int, path: str) -> np.ndarray:
    vals = [_number(v, path) for v in flat]
    if len(vals) != 2 * n:
        raise ConfigError(path, f"expected {2 * n} numbers (re, im pairs of a length {n} vector)")
    arr = np.asarray(vals).reshape(n, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def build_state(sc: Scenario, box: LatticeBox) -> DensityState:
    """Initial state of the scenario on ``box``."""
    st = sc.state
    kind = st["kind"]
    site_dim = 2 ** len(box.spins)
    try:
        if kind == "trace":
            return trace_density(box)
        if kind == "vacuum":
            return vacuum_density(box)
        if kind == "filled":
            return filled_density(box)
        if kind == "random":
            rng = np.random.default_rng([sc.seed, box.n_sites])
            return random_density(box, rng, even=True)
        if kind == "product":
            factors = _require(st, "factors", "state", list)
            period = st.get("period")
            mats = []
            for i, f in enumerate(factors):
                n = int(round(np.sqrt(len(f) / 2)))
                mats.append(_matrix(f, n, f"state.factors[{i}]"))
            if mats and mats[0].shape[0] != site_dim and len(mats) > 1:
                raise ConfigError("state.factors", "multi-site cell factors must be given alone")
            return product_state(box, mats, tuple(period) if isinstance(period, list) else period)
        # pure-product: one site vector per period cell position, repeated along the box
        vecs = [_vector(v, site_dim, f"state.vectors[{i}]")
                for i, v in enumerate(_require(st, "vectors", "state", list))]
        vecs = [v / np.linalg.norm(v) for v in vecs]
        per_site = [vecs[sum(x) % len(vecs)] for x in box.sites]
        return pure_state(box, product_vector(box, per_site))
    except DomainError as exc:
        raise ConfigError("state", str(exc)) from exc


def build_outputs(sc: Scenario):
    """Polynomial outputs as ``(name, LocalPolynomial)`` pairs."""
    out = []
    for i, o in enumerate(sc.outputs):
        if isinstance(o, Mapping):
            try:
                out.append((o["name"], parse_polynomial(o["terms"], sc.spins[0])))
            except DomainError as exc:
                raise ConfigError(f"outputs[{i}]", str(exc)) from exc
    return out
