"""
JSON report generator.

Writes ``summary.json`` next to the other run artifacts. Metrics become a flat
mapping so scripts can read them without walking a list.
"""

from typing import Any, Optional

from pydantic import BaseModel, Field

from smartem.reporters.base import ReportData, Reporter, ReportTable, RunStatus


class ReportMetadata(BaseModel):
    """Metadata for the JSON report."""

    tool: str = "smartem"
    version: Optional[str] = None
    command: str
    subject: str
    status: RunStatus


class JsonReport(BaseModel):
    """Complete JSON report structure."""

    metadata: ReportMetadata
    metrics: dict[str, Any]
    units: dict[str, str] = Field(default_factory=dict)
    tables: list[ReportTable] = Field(default_factory=list)
    violations: list[str] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    artifacts: list[str] = Field(default_factory=list)


class JsonReporter(Reporter):
    """Reporter that generates a JSON file."""

    name = "json"
    description = "JSON summary file (machine-readable)"
    file_extension = "json"
    writes_to_file = True

    def generate(self, data: ReportData) -> str:
        """Generate JSON report content."""
        report = JsonReport(
            metadata=ReportMetadata(
                version=data.version,
                command=data.command,
                subject=data.subject,
                status=data.status,
            ),
            metrics={m.name: m.value for m in data.metrics},
            units={m.name: m.unit for m in data.metrics if m.unit},
            tables=data.tables,
            violations=data.violations,
            warnings=data.warnings,
            artifacts=data.artifacts,
        )
        return report.model_dump_json(indent=2)
