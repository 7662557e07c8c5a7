"""Acceptance criteria, each run at its stated size and tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary
under "acceptance criteria" and to stdout.
"""

import time

import numpy as np
import pytest

from lrfermi.harness import suites

from conftest import ACCEPTANCE

START = time.perf_counter()


def _report(name, records, elapsed, limit=None):
    failed = [r for r in records if not r.passed]
    passed = not failed and (limit is None or elapsed < limit)
    detail = f"{len(records) - len(failed)}/{len(records)} checks passed in {elapsed:.1f} s"
    if limit is not None:
        detail += f" (limit {limit:.0f} s)"
    if len(records) <= 3:
        detail += "; " + "; ".join(r.statement for r in records)
    for r in failed[:5]:
        detail += f"; failed {r.check} lhs={r.lhs:.3g} rhs={r.rhs:.3g}"
    ACCEPTANCE[name] = (passed, detail)
    print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return passed, failed


def _run(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return (out if isinstance(out, list) else [out]), time.perf_counter() - t0


def test_1_algebra():
    records, dt = _run(suites.algebra_suite, 0, n_pairs=200, max_modes=6)
    passed, failed = _report("1 algebra", records, dt, limit=10)
    assert not failed, failed[:3]
    assert dt < 10


@pytest.mark.slow
def test_2_bounds():
    records, dt = _run(suites.bounds_suite, 0, n_instances=100, max_sites=8, horizon=1.0)
    passed, failed = _report("2 bounds", records, dt, limit=300)
    assert not failed, failed[:3]
    assert dt < 300


def test_3_dynamics():
    records, dt = _run(suites.dynamics_suite, 0)
    checks = {r.check for r in records}
    assert {"group-law", "multiplicative", "star", "commuting-family", "integrator-order"} <= checks
    passed, failed = _report("3 dynamics", records, dt)
    assert not failed, failed[:3]


def test_4_selfconsistency():
    records, dt = _run(suites.selfconsistency_suite, 0, n_sites=3, horizon=1.0)
    passed, failed = _report("4 self-consistency", records, dt)
    assert not failed, failed[:3]


def test_5_conservation():
    records, dt = _run(suites.conservation_suite, 0, n_sites=3, horizon=1.0)
    passed, failed = _report("5 conservation", records, dt)
    assert not failed, failed[:3]


def test_6_classical():
    records, dt = _run(suites.classical_suite, 0, n_triples=100)
    passed, failed = _report("6 classical structure", records, dt)
    assert not failed, failed[:3]


def test_7a_energy_density_trend():
    records, dt = _run(suites.energy_density_trend, 0, radii=(2, 4, 8))
    passed, failed = _report("7a energy-density gap", records, dt)
    assert not failed, records[0].statement


def test_7b_liouville_trend():
    records, dt = _run(suites.liouville_trend, 0, sizes=(2, 3, 4))
    passed, failed = _report("7b Liouville residual", records, dt)
    assert not failed, records[0].statement


def test_7c_meanfield_trend():
    records, dt = _run(suites.meanfield_trend, 0, sizes=(2, 3, 4, 5), t=0.5)
    passed, failed = _report("7c mean-field vs exact", records, dt)
    assert not failed, records[0].statement


def test_7d_nonconvergence_probe():
    records, dt = _run(suites.probe_trend, 0, t=0.5)
    passed, failed = _report("7d non-convergence probe", records, dt)
    assert not failed, [r.statement for r in failed]


def test_total_runtime():
    # ordered last in the module; covers every criterion above
    elapsed = time.perf_counter() - START
    ok = elapsed < 1800
    ACCEPTANCE["8 total runtime"] = (ok, f"{elapsed:.1f} s (limit 1800 s)")
    assert ok
    assert np.isfinite(elapsed)
