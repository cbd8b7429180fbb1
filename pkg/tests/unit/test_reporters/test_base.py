"""
Unit tests for smartem.reporters.base module.

Tests cover:
- Good path: ReportData creation, Reporter base class
- Critical path: file output generation, fixed summary name
- Bad path: unknown metric lookup
"""

import pytest

from smartem.reporters.base import Metric, ReportData, Reporter


class TestReportData:
    """Tests for ReportData model."""

    @pytest.mark.unit
    def test_required_fields(self):
        """Good path: ReportData with required fields."""
        data = ReportData(command="validate", subject="s.json")

        assert data.status == "ok"
        assert data.metrics == []
        assert data.violations == []

    @pytest.mark.unit
    def test_metric_lookup(self, sample_report_data):
        """Good path: metrics are found by name."""
        assert sample_report_data.metric("coverage_fraction") == 0.5

    @pytest.mark.unit
    def test_metric_missing(self, sample_report_data):
        """Bad path: unknown metric names raise KeyError."""
        with pytest.raises(KeyError):
            sample_report_data.metric("nope")

    @pytest.mark.unit
    def test_no_wall_clock_fields(self, sample_report_data):
        """Critical path: reports carry nothing that changes between reruns."""
        dumped = sample_report_data.model_dump()

        assert not any("time" in key or "date" in key for key in dumped)


class TestReporterBase:
    """Tests for Reporter abstract base class."""

    @pytest.mark.unit
    def test_cannot_instantiate_abstract(self):
        """Bad path: cannot instantiate abstract Reporter."""
        with pytest.raises(TypeError):
            Reporter()

    @pytest.mark.unit
    def test_write_report_file(self, tmp_path):
        """Good path: file reporters write summary.<ext>."""

        class TextReporter(Reporter):
            name = "text"
            description = "Plain text"
            file_extension = "txt"
            writes_to_file = True

            def generate(self, data):
                return f"{data.command} {data.metric('points')}"

        data = ReportData(command="coverage", subject="s", metrics=[Metric(name="points", value=3)])

        path = TextReporter().write_report(data, tmp_path)

        assert path == tmp_path / "summary.txt"
        assert path.read_text() == "coverage 3\n"

    @pytest.mark.unit
    def test_write_report_console_only(self, tmp_path):
        """Critical path: console reporters write nothing."""

        class ConsoleReporter(Reporter):
            name = "console"
            description = "Console"

            def generate(self, data):
                return ""

        result = ConsoleReporter().write_report(ReportData(command="c", subject="s"), tmp_path)

        assert result is None
        assert list(tmp_path.iterdir()) == []
