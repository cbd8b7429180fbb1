"""
Plan command - choose Smart-EM nodes for candidate sites at minimum cost.
"""

from pathlib import Path
from typing import Annotated, Literal, Optional

import cyclopts

from smartem.commands import app, console
from smartem.commands.common import (
    BandwidthOption,
    BitsOption,
    DebugOption,
    NoProgressOption,
    OutOption,
    ReportOption,
    ScenarioOption,
    SeedOption,
    ThreadsOption,
    ThresholdOption,
    execute,
)


@app.command(name="plan")
def plan_cmd(
    *,
    scenario: ScenarioOption = None,
    candidates: Annotated[
        Optional[Path],
        cyclopts.Parameter(("--candidates", "-c"), help="Candidate sites JSON file."),
    ] = None,
    method: Annotated[
        Literal["greedy", "exhaustive"],
        cyclopts.Parameter(
            ("--method", "-m"),
            help="greedy (with local search) or exhaustive enumeration.",
        ),
    ] = "greedy",
    target: Annotated[
        Optional[float],
        cyclopts.Parameter(
            ("--target", "-t"),
            help="Coverage fraction to reach (overrides the candidate file).",
        ),
    ] = None,
    max_moves: Annotated[
        int,
        cyclopts.Parameter(("--max-moves",), help="Local search move budget."),
    ] = 100,
    out: OutOption = Path("out"),
    seed: SeedOption = None,
    threshold_dbm: ThresholdOption = None,
    bandwidth_hz: BandwidthOption = None,
    bits: BitsOption = None,
    threads: ThreadsOption = None,
    report: ReportOption = "stdout",
    no_progress: NoProgressOption = False,
    debug: DebugOption = False,
):
    """Plan a deployment and write plan.json and coverage.csv.

    Exits with status 1 when the coverage target cannot be reached; the
    best-effort plan is still written.

    Parameters
    ----------
    scenario
        Baseline scenario JSON file.
    candidates
        Candidate sites, class templates and cost model.
    method
        Search method.
    target
        Coverage target in [0, 1].
    max_moves
        Local search move budget (0 keeps the greedy result).
    out
        Output directory.
    seed
        Seed echoed to the manifest (planning is deterministic).
    threshold_dbm
        Coverage threshold override.
    bandwidth_hz
        Bandwidth override.
    bits
        RIS phase resolution override for nodes already in the scenario.
    threads
        Worker threads.
    report
        Console output format.
    no_progress
        Disable progress bar.
    debug
        Enable verbose debug logging.
    """
    execute(
        console,
        "plan",
        report=report,
        no_progress=no_progress,
        debug=debug,
        scenario=scenario,
        candidates=candidates,
        method=method,
        target=target,
        max_moves=max_moves,
        out=out,
        seed=seed,
        threshold_dbm=threshold_dbm,
        bandwidth_hz=bandwidth_hz,
        bits=bits,
        workers=threads,
    )
