"""Scenario runs, trace emission, figure reports, and the control service."""

from .headless import run_headless
from .runner import RunError, ScenarioRunner
from .scenario import Scenario, ScenarioError, load_scenario, scenario_from_dict

__all__ = [
    "RunError",
    "Scenario",
    "ScenarioError",
    "ScenarioRunner",
    "load_scenario",
    "run_headless",
    "scenario_from_dict",
]
