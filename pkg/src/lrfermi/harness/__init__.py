"""Scenario configuration, verification suites, runner and command line interface."""

from .config import Scenario, build_model, build_state, load_scenario, parse_scenario
from .runner import RunResult, run, run_scenario, sweep
from .suites import SUITES, CheckRecord, VerificationReport, verify

__all__ = [
    "CheckRecord",
    "RunResult",
    "SUITES",
    "Scenario",
    "VerificationReport",
    "build_model",
    "build_state",
    "load_scenario",
    "parse_scenario",
    "run",
    "run_scenario",
    "sweep",
    "verify",
]
