"""
CDF command - received power and capacity distributions, optionally against a baseline.
"""

from pathlib import Path
from typing import Annotated, Optional

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
    ThreadsOption,
    ThresholdOption,
    execute,
)


@app.command(name="cdf")
def cdf_cmd(
    *,
    scenario: ScenarioOption = None,
    baseline: Annotated[
        Optional[Path],
        cyclopts.Parameter(
            ("--baseline", "-b"),
            help="Scenario to compare against; writes delta.json.",
        ),
    ] = None,
    out: OutOption = Path("out"),
    threshold_dbm: ThresholdOption = None,
    bandwidth_hz: BandwidthOption = None,
    bits: BitsOption = None,
    threads: ThreadsOption = None,
    report: ReportOption = "stdout",
    no_progress: NoProgressOption = False,
    debug: DebugOption = False,
):
    """Write cdf_power.csv and cdf_capacity.csv for a scenario.

    Parameters
    ----------
    scenario
        Scenario JSON file.
    baseline
        Baseline scenario over the same grid (for example gNB only).
    out
        Output directory.
    threshold_dbm
        Coverage threshold override, applied to both scenarios.
    bandwidth_hz
        Bandwidth override, applied to both scenarios.
    bits
        RIS phase resolution override.
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
        "cdf",
        report=report,
        no_progress=no_progress,
        debug=debug,
        scenario=scenario,
        baseline=baseline,
        out=out,
        threshold_dbm=threshold_dbm,
        bandwidth_hz=bandwidth_hz,
        bits=bits,
        workers=threads,
    )
