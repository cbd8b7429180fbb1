"""
Envelope command - optimized scan-loss envelopes of a phase-quantized array.
"""

from pathlib import Path
from typing import Annotated

import cyclopts

from smartem.commands import app, console
from smartem.commands.common import (
    DebugOption,
    NoProgressOption,
    OutOption,
    ReportOption,
    ThreadsOption,
    execute,
)


@app.command(name="envelope")
def envelope_cmd(
    *,
    elements: Annotated[
        int,
        cyclopts.Parameter(("--elements", "-e"), help="Number of array elements."),
    ] = 8,
    spacing: Annotated[
        float,
        cyclopts.Parameter(("--spacing",), help="Element spacing in wavelengths."),
    ] = 1.5,
    bits: Annotated[
        str,
        cyclopts.Parameter(
            ("--bits",),
            help="Comma separated bit assignments: 1..4, hybrid, continuous.",
        ),
    ] = "1,2,hybrid",
    max_scan: Annotated[
        float,
        cyclopts.Parameter(("--max-scan",), help="Largest scan angle in degrees."),
    ] = 60.0,
    step: Annotated[
        float,
        cyclopts.Parameter(("--step",), help="Scan angle step in degrees."),
    ] = 1.0,
    no_cache: Annotated[
        bool,
        cyclopts.Parameter(negative=(), help="Recompute envelopes even when cached."),
    ] = False,
    out: OutOption = Path("out"),
    threads: ThreadsOption = None,
    report: ReportOption = "stdout",
    no_progress: NoProgressOption = False,
    debug: DebugOption = False,
):
    """Write envelope.csv with one directivity column per bit assignment.

    The continuous envelope is always included as the reference column.

    Parameters
    ----------
    elements
        Array size.
    spacing
        Element spacing in wavelengths.
    bits
        Bit assignments to compare.
    max_scan
        Scan range is [-max_scan, max_scan].
    step
        Scan angle step.
    no_cache
        Skip the on-disk envelope cache.
    out
        Output directory.
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
        "envelope",
        report=report,
        no_progress=no_progress,
        debug=debug,
        elements=elements,
        spacing=spacing,
        bits=bits,
        max_scan_deg=max_scan,
        step_deg=step,
        use_cache=not no_cache,
        out=out,
        workers=threads,
    )
