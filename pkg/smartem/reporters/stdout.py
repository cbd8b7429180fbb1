"""
Standard output reporter using Rich.

This is the default reporter: a summary panel with the headline metrics,
one panel per table, then violations, warnings and the written artifacts.
"""

from typing import Any

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from smartem.reporters.base import ReportData, Reporter, ReportTable

_STATUS_STYLE = {
    "ok": "green",
    "violations": "red",
    "infeasible": "yellow",
    "error": "red",
}


def format_value(value: Any) -> str:
    """Render a metric or cell value for the console."""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4g}"
    if value is None:
        return "-"
    return str(value)


class StdoutReporter(Reporter):
    """Reporter that outputs to stdout using Rich formatting."""

    name = "stdout"
    description = "Rich console output (default)"
    file_extension = None
    writes_to_file = False

    def __init__(self, console: Console | None = None):
        self.console = console or Console()

    def _build_summary_panel(self, data: ReportData) -> Panel:
        table = Table(box=box.SIMPLE_HEAVY, expand=True, show_header=True)
        table.add_column("Metric", style="bold")
        table.add_column("Value", justify="right")
        table.add_column("Unit", style="dim")

        for metric in data.metrics:
            table.add_row(metric.name, format_value(metric.value), metric.unit or "")

        style = _STATUS_STYLE[data.status]
        title = (
            f"[bold]{data.command} [cyan]{data.subject}[/cyan] "
            f"[{style}]({data.status})[/{style}][/bold]"
        )
        return Panel(table, title=title, border_style=style, padding=(0, 1))

    def _build_table_panel(self, report_table: ReportTable) -> Panel:
        table = Table(box=box.SIMPLE, expand=True, show_header=True)
        for index, column in enumerate(report_table.columns):
            table.add_column(column, style="bold" if index == 0 else None, justify="right")
        for row in report_table.rows:
            table.add_row(*(format_value(cell) for cell in row))
        return Panel(
            table,
            title=f"[bold]{report_table.title}[/bold]",
            border_style="blue",
            padding=(0, 1),
        )

    def _build_list_panel(self, items: list[str], title: str, style: str) -> Panel:
        table = Table(box=box.SIMPLE, expand=True, show_header=False)
        table.add_column("", style=style)
        for item in items:
            table.add_row(item)
        return Panel(table, title=title, border_style=style, padding=(0, 1))

    def generate(self, data: ReportData) -> str:
        """Generate and print the report to stdout."""
        self.console.print(self._build_summary_panel(data))

        for report_table in data.tables:
            self.console.print(self._build_table_panel(report_table))

        if data.violations:
            self.console.print(
                self._build_list_panel(data.violations, "[bold red]Violations[/bold red]", "red")
            )
        if data.warnings:
            self.console.print(
                self._build_list_panel(
                    data.warnings, "[bold yellow]Warnings[/bold yellow]", "yellow"
                )
            )
        if data.artifacts:
            self.console.print(
                self._build_list_panel(data.artifacts, "[bold]Artifacts[/bold]", "dim")
            )

        return ""  # Output is printed directly
