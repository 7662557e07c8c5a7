"""Run scenarios and sweeps, writing trajectory CSV files and JSON diagnostics.

CSV rows have the fixed columns ``scenario, L, variant, method, t,
observable, re, im``; floats are written with 17 significant digits
(``%.17g``) so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from ..errors import ConfigError, ConvergenceError, DomainError, IntegrationError, ScenarioError
from ..fock import instantiate
from ..interactions import local_hamiltonian, number_interaction, local_energy
from ..meanfield import MeanFieldSystem, solve_selfconsistency
from ..statespace import DensityState, classical_energy, expect
from .config import Scenario, build_model, build_outputs, build_state, parse_scenario, set_path

log = logging.getLogger(__name__)

COLUMNS = ("scenario", "L", "variant", "method", "t", "observable", "re", "im")
OUT_ENV = "LRFERMI_OUT"


def default_out_dir() -> Path:
    """Output directory: ``$LRFERMI_OUT`` when set, ``./out`` otherwise."""
    return Path(os.environ.get(OUT_ENV, "out"))


def fmt(x: float) -> str:
    return "%.17g" % float(x)


@dataclass
class RunResult:
    """Rows and diagnostics of one scenario."""

    scenario: str
    rows: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def csv_text(self) -> str:
        return rows_to_csv(self.rows)

    def json_text(self) -> str:
        return json.dumps({"scenario": self.scenario, "runs": self.diagnostics}, indent=2, sort_keys=True)


def rows_to_csv(rows: Sequence[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r[0], r[1], r[2], r[3], fmt(r[4]), r[5], fmt(r[6]), fmt(r[7])])
    return buf.getvalue()


def _exact_states(model, rho0: DensityState, times, s: float) -> list:
    box = rho0.box
    H = local_hamiltonian(model, box).matrix
    E, V = np.linalg.eigh((H + H.conj().T) / 2)
    X, w = rho0.ensemble()
    Y = V.conj().T @ X
    out = []
    for t in times:
        Xt = V @ (np.exp(-1j * (t - s) * E)[:, None] * Y)
        out.append(DensityState(box, ensemble=(Xt, w), validate=False))
    return out


def _observables(sc: Scenario, model, box, system: MeanFieldSystem):
    """Named state functionals requested by the scenario."""
    obs = []
    for o in sc.outputs:
        if o == "order_parameters":
            for k, label in enumerate(system.labels):
                O = system.observables[k]
                obs.append((label, lambda r, O=O: _expect_sparse(r, O)))
        elif o == "energy":
            h = classical_energy(model, box)
            obs.append(("energy", h))
        elif o == "purity":
            obs.append(("purity", lambda r: r.purity()))
        elif o == "particle_number":
            N = local_energy(number_interaction(box.spins, box.dimension), box)
            obs.append(("particle_number", lambda r, N=N: expect(r, N)))
    for name, poly in build_outputs(sc):
        A = instantiate(poly, box)
        obs.append((name, lambda r, A=A: expect(r, A)))
    return obs


def _expect_sparse(rho: DensityState, O) -> complex:
    X, w = rho.ensemble()
    return complex(((X.conj() * (O @ X)).sum(axis=0)) @ w)


def run_scenario(sc: Scenario) -> RunResult:
    """Solve every rung, variant and method of a scenario.

    Raises
    ------
    ScenarioError
        Wrapping numerical failures with the scenario context.
    """
    model = build_model(sc)
    s = float(sc.times[0])
    result = RunResult(sc.name)
    for L in sc.ladder:
        box = sc.box(L)
        try:
            rho0 = build_state(sc, box)
        except DomainError as exc:
            raise ConfigError("state", f"rung {L}: {exc}") from exc
        jobs = [(v, m) for v in sc.variants for m in sc.methods if m != "exact"]
        if "exact" in sc.methods:
            jobs.append(("exact", "exact"))
        for variant, method in jobs:
            ctx = {"scenario": sc.name, "L": L, "variant": variant, "method": method}
            try:
                obs_variant = "e-density" if variant == "exact" else variant
                system = MeanFieldSystem(model, box, obs_variant, sc.solver.get("period", 1))
                obs = _observables(sc, model, box, system)
                if method == "exact":
                    states = _exact_states(model, rho0, sc.times, s)
                    diag = {"method": "exact"}
                else:
                    traj = solve_selfconsistency(model, rho0, s, sc.times, sc.solver_config(variant), method)
                    states = traj.states
                    d = traj.diagnostics
                    diag = {
                        "method": method,
                        "windows": len(d["windows"]),
                        "iterations": {"max": int(max(d["iterations"], default=0)),
                                       "total": int(sum(d["iterations"]))},
                        "max_final_residual": float(max(d["final_residuals"], default=0.0)),
                        "certificate": float(d["certificate"]),
                        "window_length": float(d["window_length"]),
                        "normalization_error": float(d["normalization_error"]),
                    }
            except (IntegrationError, ConvergenceError, DomainError) as exc:
                raise ScenarioError(f"scenario {sc.name!r}, L={L}, {variant}/{method}: {exc}", ctx) from exc
            h = classical_energy(model, box)
            energies = [h(r) for r in states]
            diag.update(L=L, variant=variant,
                        energy_drift=float(max(abs(e - energies[0]) for e in energies)))
            result.diagnostics.append(diag)
            for t, r in zip(sc.times, states):
                for name, f in obs:
                    v = complex(f(r))
                    result.rows.append((sc.name, L, variant, method, float(t), name, v.real, v.imag))
    return result


def write_result(result: RunResult, out_dir: Path, stem: str | None = None) -> tuple:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or result.scenario
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    csv_path.write_text(result.csv_text())
    json_path.write_text(result.json_text())
    return csv_path, json_path


def run(sc: Scenario, out_dir: Path | None = None) -> tuple:
    """Run a scenario and write ``<name>.csv`` and ``<name>.json``."""
    result = run_scenario(sc)
    return write_result(result, out_dir or default_out_dir())


def parse_axis(spec: str) -> tuple:
    """``KEY=V1,V2,...`` into the dotted key and YAML-parsed values."""
    if "=" not in spec:
        raise ConfigError("axis", "expected KEY=V1,V2,...")
    key, values = spec.split("=", 1)
    items = [v for v in values.split(",") if v.strip()]
    if not key or not items:
        raise ConfigError("axis", "expected KEY=V1,V2,...")
    return key.strip(), [yaml.safe_load(v) for v in items]


def sweep_scenarios(doc: dict, key: str, values: Sequence) -> list:
    """One validated scenario per axis value, named ``<name>[key=value]``."""
    out = []
    for v in values:
        d = set_path(doc, key, v)
        d["name"] = f"{doc['name']}[{key}={v}]"
        out.append(parse_scenario(d))
    return out


def sweep(doc: dict, key: str, values: Sequence, out_dir: Path | None = None, threads: int = 1) -> Path:
    """Run one scenario per axis value on a bounded thread pool.

    Results are merged in axis order, so the aggregated CSV does not depend
    on ``threads``.  Each point also gets its JSON diagnostics sidecar.
    """
    scenarios = sweep_scenarios(doc, key, values)
    out_dir = Path(out_dir or default_out_dir())
    if threads <= 1:
        results = [run_scenario(sc) for sc in scenarios]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_scenario, scenarios))
    rows = []
    for k, res in enumerate(results):
        rows.extend(res.rows)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{doc['name']}-sweep-{k}.json").write_text(res.json_text())
    path = out_dir / f"{doc['name']}-sweep.csv"
    path.write_text(rows_to_csv(rows))
    return path
