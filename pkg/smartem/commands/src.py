"""
SRC command - Monte Carlo outage of a smart radio connection versus angular separation.
"""

from pathlib import Path
from typing import Annotated, Optional

import cyclopts

from smartem.commands import app, console
from smartem.commands.common import (
    DebugOption,
    NoProgressOption,
    OutOption,
    ReportOption,
    SeedOption,
    ThreadsOption,
    execute,
    parse_float_list,
)


@app.command(name="src")
def src_cmd(
    *,
    seed: SeedOption = None,
    separations: Annotated[
        Optional[str],
        cyclopts.Parameter(
            ("--separations",),
            help="Comma separated angular separations in degrees.",
        ),
    ] = None,
    lengths: Annotated[
        Optional[str],
        cyclopts.Parameter(
            ("--lengths",),
            help="Comma separated link lengths in meters; writes link_length.csv.",
        ),
    ] = None,
    trials: Annotated[
        int,
        cyclopts.Parameter(("--trials", "-n"), help="Monte Carlo trials per point."),
    ] = 10_000,
    density: Annotated[
        float,
        cyclopts.Parameter(("--density",), help="Obstacle density per square meter."),
    ] = 0.01,
    radius: Annotated[
        float,
        cyclopts.Parameter(("--radius",), help="Obstacle radius in meters."),
    ] = 0.3,
    self_blockage: Annotated[
        float,
        cyclopts.Parameter(("--self-blockage",), help="Body blockage sector width in degrees."),
    ] = 60.0,
    out: OutOption = Path("out"),
    threads: ThreadsOption = None,
    report: ReportOption = "stdout",
    no_progress: NoProgressOption = False,
    debug: DebugOption = False,
):
    """Estimate SRC outage and write src_outage.csv.

    Parameters
    ----------
    seed
        Random seed; required.
    separations
        Angular separations between primary and reflected links.
    lengths
        Link lengths for the blocking-versus-length table.
    trials
        Trials per separation.
    density
        Poisson obstacle density.
    radius
        Obstacle radius.
    self_blockage
        Self-blockage sector width.
    out
        Output directory.
    threads
        Worker threads.
    report
        Console output format.
    no_progress
        Unused, Monte Carlo runs are short.
    debug
        Enable verbose debug logging.
    """
    execute(
        console,
        "src",
        report=report,
        no_progress=no_progress,
        debug=debug,
        seed=seed,
        separations_deg=parse_float_list(separations, "--separations", console),
        lengths_m=parse_float_list(lengths, "--lengths", console),
        trials=trials,
        density_per_m2=density,
        radius_m=radius,
        self_blockage_deg=self_blockage,
        out=out,
        workers=threads,
    )
