"""
Console report formats.

``summary.json`` is always written by the run itself; the format chosen with
``--report`` only decides what the terminal shows. New formats subclass
``Reporter`` and are added to ``REPORTERS``.
"""

from typing import Optional

from pydantic import BaseModel, Field
from rich.console import Console

from smartem.reporters.base import Metric, ReportData, Reporter, ReportTable, RunStatus
from smartem.reporters.json import JsonReporter
from smartem.reporters.stdout import StdoutReporter


class ReporterInfo(BaseModel):
    """A console format as listed to the user."""

    format_id: str
    description: str
    aliases: list[str] = Field(default_factory=list)


REPORTERS: dict[str, type[Reporter]] = {
    "stdout": StdoutReporter,
    "json": JsonReporter,
}

ALIASES: dict[str, str] = {
    "console": "stdout",
    "terminal": "stdout",
}


def resolve_format(format_name: str) -> Optional[str]:
    """Canonical format id for a name or alias, None when unknown."""
    key = format_name.strip().lower()
    key = ALIASES.get(key, key)
    return key if key in REPORTERS else None


def get_reporter(format_name: str, console: Optional[Console] = None) -> Optional[Reporter]:
    """
    Instantiate the reporter for ``format_name``.

    Args:
        format_name: Format id or alias, case-insensitive.
        console: Console the stdout reporter prints to.

    Returns:
        The reporter, or None for an unknown format.
    """
    format_id = resolve_format(format_name)
    if format_id is None:
        return None
    if format_id == "stdout":
        return StdoutReporter(console=console)
    return REPORTERS[format_id]()


def list_reporters() -> list[ReporterInfo]:
    return [
        ReporterInfo(
            format_id=format_id,
            description=cls.description,
            aliases=sorted(alias for alias, target in ALIASES.items() if target == format_id),
        )
        for format_id, cls in REPORTERS.items()
    ]


def get_available_formats() -> list[str]:
    return list(REPORTERS)


__all__ = [
    "JsonReporter",
    "Metric",
    "ReportData",
    "ReportTable",
    "Reporter",
    "ReporterInfo",
    "RunStatus",
    "StdoutReporter",
    "get_available_formats",
    "get_reporter",
    "list_reporters",
    "resolve_format",
]
