"""
Option types and the run wrapper shared by the simulation commands.
"""

from pathlib import Path
from typing import Annotated, Any, Optional

import cyclopts
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from smartem.cache import CACHE_DIR
from smartem.debug import get_log_file, log, setup_logger
from smartem.errors import DomainError
from smartem.progress import ProgressTracker
from smartem.reporters import get_available_formats, get_reporter
from smartem.runner import EXIT_USAGE, RunConfig, run

ScenarioOption = Annotated[
    Optional[Path],
    cyclopts.Parameter(("--scenario", "-s"), help="Scenario JSON file."),
]
OutOption = Annotated[
    Path,
    cyclopts.Parameter(("--out", "-o"), help="Output directory for the artifacts."),
]
SeedOption = Annotated[
    Optional[int],
    cyclopts.Parameter(("--seed",), help="Random seed (unsigned 64-bit)."),
]
ThresholdOption = Annotated[
    Optional[float],
    cyclopts.Parameter(("--threshold-dbm",), help="Coverage threshold in dBm (overrides the file)."),
]
BandwidthOption = Annotated[
    Optional[float],
    cyclopts.Parameter(("--bandwidth-hz",), help="Channel bandwidth in Hz (overrides the file)."),
]
BitsOption = Annotated[
    Optional[str],
    cyclopts.Parameter(("--bits",), help="RIS phase resolution: 1..4 or continuous."),
]
ThreadsOption = Annotated[
    Optional[int],
    cyclopts.Parameter(
        ("--threads",),
        help="Worker threads (0 = auto). Defaults to SMARTEM_THREADS.",
    ),
]
ReportOption = Annotated[
    str,
    cyclopts.Parameter(("--report", "-r"), help="Console output: stdout or json."),
]
NoProgressOption = Annotated[
    bool,
    cyclopts.Parameter(negative=(), help="Disable progress bar."),
]
DebugOption = Annotated[
    bool,
    cyclopts.Parameter(
        negative=(),
        help="Enable verbose debug logging (planner scores, cache traffic).",
    ),
]


def parse_float_list(text: Optional[str], flag: str, console: Console) -> Optional[list[float]]:
    """Comma separated floats, or None when the flag was not given."""
    if text is None:
        return None
    try:
        return [float(token) for token in text.split(",") if token.strip()]
    except ValueError:
        console.print(f"[red]{flag} expects comma separated numbers, got {text!r}[/red]")
        raise SystemExit(EXIT_USAGE) from None


def execute(
    console: Console,
    command: str,
    *,
    report: str = "stdout",
    no_progress: bool = False,
    debug: bool = False,
    **fields: Any,
) -> None:
    """
    Build the run configuration, run it and print the report.

    Raises:
        SystemExit: With the run's exit status when it is not 0.
    """
    reporter = get_reporter(report, console=console)
    if reporter is None:
        console.print(f"[red]Unknown report format: {report}[/red]")
        console.print(f"Available formats: {', '.join(get_available_formats())}")
        raise SystemExit(EXIT_USAGE)

    given = {name: value for name, value in fields.items() if value is not None}
    try:
        config = RunConfig(command=command, **given)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        message = first["msg"].removeprefix("Value error, ")
        console.print(f"[red]{f'{where}: ' if where else ''}{message}[/red]")
        raise SystemExit(EXIT_USAGE) from None

    setup_logger(debug=debug)
    log("Run started", command=command, debug=debug, **given)

    header = Text()
    header.append(command, style="bold cyan")
    if config.scenario is not None:
        header.append(f" {config.scenario}", style="cyan")
    header.append("\n")
    header.append(f"Output:    {config.out}\n", style="dim")
    header.append(f"Cache:     {CACHE_DIR}", style="dim")
    if config.seed is not None:
        header.append(f"\nSeed:      {config.seed}", style="dim")
    for name, value in config.overrides().items():
        header.append(f"\nOverride:  {name}={value}", style="yellow")

    console.print()
    console.print(
        Panel(header, title="[bold]smartem[/bold]", border_style="blue", padding=(0, 1))
    )

    tracker = None if no_progress else ProgressTracker(console)
    try:
        result = run(config, tracker)
    except DomainError as e:
        console.print(f"[red]{e}[/red]")
        raise SystemExit(EXIT_USAGE) from None
    console.print()

    if result.error:
        console.print(f"[red]Error: {result.error}[/red]")
    if result.report is not None:
        if reporter.writes_to_file:
            console.print_json(reporter.generate(result.report))
        else:
            reporter.generate(result.report)
        console.print(f"[green]Artifacts saved to: {result.out_dir}[/green]")

    log_file = get_log_file()
    if log_file:
        console.print(f"[dim]Log saved to: {log_file}[/dim]\n")

    if result.exit_code != 0:
        raise SystemExit(result.exit_code)
