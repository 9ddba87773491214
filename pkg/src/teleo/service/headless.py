"""Headless scenario runs: one JSONL trace record per tick.

Exit status 0 on completion, 1 on file/schema problems, 2 on a runtime
error (the error is recorded as the trace's final line).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional, Union

from .runner import RunError, ScenarioRunner
from .scenario import ScenarioError, load_scenario

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_RUNTIME = 2


def run_headless(
    scenario_path: Union[str, Path],
    trace_path: Union[str, Path],
    seed: Optional[int] = None,
    ticks: Optional[int] = None,
    err=sys.stderr,
) -> int:
    try:
        scenario = load_scenario(scenario_path, seed=seed, ticks=ticks)
    except ScenarioError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_SCHEMA
    runner = ScenarioRunner(scenario)
    status = EXIT_OK
    with open(trace_path, "w") as out:
        try:
            for record in runner.run():
                out.write(json.dumps(record) + "\n")
        except RunError as exc:
            out.write(json.dumps(exc.to_json()) + "\n")
            print(f"error: {exc}", file=err)
            status = EXIT_RUNTIME
    return status
