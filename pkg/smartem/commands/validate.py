"""
Validate command - check a scenario against every rule.
"""

from pathlib import Path

from smartem.commands import app, console
from smartem.commands.common import (
    DebugOption,
    OutOption,
    ReportOption,
    ScenarioOption,
    execute,
)


@app.command(name="validate")
def validate_cmd(
    *,
    scenario: ScenarioOption = None,
    out: OutOption = Path("out"),
    report: ReportOption = "stdout",
    debug: DebugOption = False,
):
    """Check a scenario file and list every violated rule.

    Parameters
    ----------
    scenario
        Scenario JSON file.
    out
        Directory for summary.json and manifest.json.
    report
        Console output format.
    debug
        Enable verbose debug logging.
    """
    execute(
        console,
        "validate",
        report=report,
        no_progress=True,
        debug=debug,
        scenario=scenario,
        out=out,
    )
