"""
Coverage command - evaluate the UE grid and write the coverage map.
"""

from pathlib import Path

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


@app.command(name="coverage")
def coverage_cmd(
    *,
    scenario: ScenarioOption = None,
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
    """Evaluate every grid point and write coverage.csv and summary.json.

    Parameters
    ----------
    scenario
        Scenario JSON file.
    out
        Output directory.
    seed
        Seed echoed to the manifest (coverage itself is not random).
    threshold_dbm
        Coverage threshold override.
    bandwidth_hz
        Bandwidth override.
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
        "coverage",
        report=report,
        no_progress=no_progress,
        debug=debug,
        scenario=scenario,
        out=out,
        seed=seed,
        threshold_dbm=threshold_dbm,
        bandwidth_hz=bandwidth_hz,
        bits=bits,
        workers=threads,
    )
