"""
Base abstract class defining the contract for run reporters.

Every command produces one ``ReportData``: headline metrics, optional tables,
the violations that blocked the run and the artifacts it wrote. Reporters
render that structure; they never compute anything themselves.

Example:
    class CsvReporter(Reporter):
        name = "csv"
        description = "Metrics as a two-column CSV"
        file_extension = "csv"
        writes_to_file = True

        def generate(self, data: ReportData) -> str:
            ...
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

RunStatus = Literal["ok", "violations", "infeasible", "error"]


class Metric(BaseModel):
    """A named headline number."""

    name: str
    value: Any
    unit: Optional[str] = None


class ReportTable(BaseModel):
    """A small table shown alongside the metrics (percentiles, deltas, ...)."""

    title: str
    columns: list[str]
    rows: list[list[Any]] = Field(default_factory=list)


class ReportData(BaseModel):
    """All data needed to render a run report. Contains no wall-clock fields."""

    command: str
    subject: str
    version: Optional[str] = None
    status: RunStatus = "ok"
    metrics: list[Metric] = Field(default_factory=list)
    tables: list[ReportTable] = Field(default_factory=list)
    violations: list[str] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    artifacts: list[str] = Field(default_factory=list)

    def metric(self, name: str) -> Any:
        """Value of the metric called ``name``."""
        for metric in self.metrics:
            if metric.name == name:
                return metric.value
        raise KeyError(name)


class Reporter(ABC):
    """
    A way of rendering ``ReportData``.

    Attributes:
        name: Format id used with ``--report``.
        description: One-line summary shown in help.
        file_extension: Extension of ``summary.<ext>``, None for console-only formats.
        writes_to_file: True when ``generate`` returns text meant for a file.
    """

    name: str
    description: str
    file_extension: Optional[str] = None
    writes_to_file: bool = False

    @abstractmethod
    def generate(self, data: ReportData) -> str:
        """Render ``data``; console reporters print and return an empty string."""

    def get_output_filename(self, data: ReportData) -> str:
        """Fixed name, so reruns overwrite the same artifact."""
        return f"summary.{self.file_extension}"

    def write_report(self, data: ReportData, output_dir: Optional[Path] = None) -> Optional[Path]:
        """
        Write ``summary.<ext>`` into ``output_dir`` (the working directory by default).

        Returns:
            The written path, or None when the reporter has no file form.
        """
        if not self.writes_to_file:
            return None
        path = (output_dir or Path.cwd()) / self.get_output_filename(data)
        path.write_text(self.generate(data) + "\n")
        return path
