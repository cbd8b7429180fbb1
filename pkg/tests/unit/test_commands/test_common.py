"""
Unit tests for smartem.commands.common (the shared run wrapper).

Tests cover:
- Good path: a validate run prints its report and the log location
- Critical path: exit status is passed through as SystemExit
- Bad path: unknown report format, missing required flags, bad number lists
"""

import json
from unittest.mock import MagicMock

import pytest

from smartem.commands.common import execute, parse_float_list

NO_DONOR = {
    "nodes": [],
    "grid": {"origin": {"x": 0, "y": 0, "z": 0}, "nx": 2, "ny": 2},
}


def printed(console) -> str:
    return str(console.print.call_args_list)


class TestParseFloatList:
    """Tests for parse_float_list function."""

    @pytest.mark.unit
    def test_not_given(self):
        """Good path: an absent flag stays None."""
        assert parse_float_list(None, "--lengths", MagicMock()) is None

    @pytest.mark.unit
    def test_values(self):
        """Good path: comma separated numbers, blanks ignored."""
        assert parse_float_list("10, 20.5,", "--lengths", MagicMock()) == [10.0, 20.5]

    @pytest.mark.unit
    def test_invalid(self):
        """Bad path: non-numeric input exits with status 2."""
        console = MagicMock()

        with pytest.raises(SystemExit) as exc:
            parse_float_list("10,abc", "--separations", console)

        assert exc.value.code == 2
        assert "--separations" in printed(console)


class TestExecute:
    """Tests for execute function."""

    @pytest.mark.unit
    def test_unknown_report(self, tmp_path):
        """Bad path: unknown report formats are usage errors."""
        console = MagicMock()

        with pytest.raises(SystemExit) as exc:
            execute(console, "validate", report="markdown", out=tmp_path)

        assert exc.value.code == 2
        assert "Unknown report format" in printed(console)

    @pytest.mark.unit
    def test_src_without_seed(self, tmp_path):
        """Bad path: src refuses to run without a seed."""
        console = MagicMock()

        with pytest.raises(SystemExit) as exc:
            execute(console, "src", out=tmp_path)

        assert exc.value.code == 2
        assert "src needs --seed" in printed(console)

    @pytest.mark.unit
    def test_missing_scenario(self, tmp_path):
        """Bad path: scenario commands need --scenario."""
        console = MagicMock()

        with pytest.raises(SystemExit) as exc:
            execute(console, "coverage", out=tmp_path)

        assert exc.value.code == 2
        assert "coverage needs --scenario" in printed(console)

    @pytest.mark.unit
    def test_validate_ok(self, scenarios_dir, tmp_path):
        """Good path: a clean scenario returns normally and writes the manifest."""
        console = MagicMock()
        out = tmp_path / "out"

        execute(
            console,
            "validate",
            no_progress=True,
            scenario=scenarios_dir / "cross_street.json",
            out=out,
        )

        assert "Artifacts saved to" in printed(console)
        assert "Log saved to" in printed(console)
        assert json.loads((out / "manifest.json").read_text())["exit_code"] == 0

    @pytest.mark.unit
    def test_violations_exit_one(self, tmp_path):
        """Critical path: scenario violations exit with status 1."""
        console = MagicMock()
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(NO_DONOR))

        with pytest.raises(SystemExit) as exc:
            execute(console, "validate", no_progress=True, scenario=path, out=tmp_path / "out")

        assert exc.value.code == 1

    @pytest.mark.unit
    def test_parse_error_exit_two(self, tmp_path):
        """Bad path: malformed scenario files exit with status 2."""
        console = MagicMock()
        path = tmp_path / "broken.json"
        path.write_text("{\n  \"nodes\": [\n")

        with pytest.raises(SystemExit) as exc:
            execute(console, "validate", no_progress=True, scenario=path, out=tmp_path / "out")

        assert exc.value.code == 2
        assert "broken.json" in printed(console)

    @pytest.mark.unit
    def test_json_report_printed(self, scenarios_dir, tmp_path):
        """Good path: --report json prints the summary as JSON."""
        console = MagicMock()

        execute(
            console,
            "validate",
            report="json",
            no_progress=True,
            scenario=scenarios_dir / "cross_street.json",
            out=tmp_path / "out",
        )

        console.print_json.assert_called_once()
