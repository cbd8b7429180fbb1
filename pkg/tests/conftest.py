"""
Shared pytest fixtures for smartem tests.
"""

from pathlib import Path
from unittest.mock import MagicMock

import pytest
from rich.console import Console

from smartem.geometry import Building, Point3
from smartem.nodes.gnb import GnbSpec
from smartem.reporters.base import Metric, ReportData, ReportTable
from smartem.scenario import PlacedNode, RadioParams, Scenario, UeGrid

SCENARIOS_DIR = Path(__file__).resolve().parent.parent / "scenarios"


# ============================================================================
# Path and directory fixtures
# ============================================================================


@pytest.fixture
def temp_cache_dir(tmp_path, monkeypatch):
    """Create a temporary cache directory and patch CACHE_DIR."""
    cache_dir = tmp_path / "cache"
    cache_dir.mkdir()
    monkeypatch.setattr("smartem.cache.CACHE_DIR", cache_dir)
    # Reset the ensured-namespaces set so that the new CACHE_DIR is used
    import smartem.cache as _cache_mod

    _cache_mod._ensured_namespaces.clear()
    return cache_dir


@pytest.fixture(autouse=True)
def temp_log_dir(tmp_path, monkeypatch):
    """Keep run logs out of the home directory."""
    log_dir = tmp_path / "logs"
    log_dir.mkdir()
    monkeypatch.setattr("smartem.debug.LOG_DIR", log_dir)
    return log_dir


@pytest.fixture
def scenarios_dir():
    return SCENARIOS_DIR


# ============================================================================
# Scenario fixtures
# ============================================================================


@pytest.fixture
def radio():
    """Default radio parameters (28 GHz, 400 MHz)."""
    return RadioParams()


def make_gnb(x: float = 0.0, y: float = 0.0, z: float = 10.0, node_id: str = "gnb0") -> PlacedNode:
    return PlacedNode(id=node_id, position=Point3(x=x, y=y, z=z), spec=GnbSpec(height_m=z))


def make_box(x0: float, y0: float, x1: float, y1: float, height: float = 20.0) -> Building:
    return Building(footprint=[(x0, y0), (x1, y0), (x1, y1), (x0, y1)], height=height)


@pytest.fixture
def gnb_factory():
    return make_gnb


@pytest.fixture
def box_factory():
    return make_box


@pytest.fixture
def open_field():
    """A single gNB over a small empty grid."""
    return Scenario(
        nodes=[make_gnb(0.0, 0.0, 10.0)],
        grid=UeGrid(origin=Point3(x=10.0, y=-10.0, z=0.0), nx=5, ny=5, spacing=5.0),
    )


@pytest.fixture
def single_building():
    """A gNB, one 20 m building east of it and a grid around the building."""
    return Scenario(
        buildings=[make_box(20.0, -10.0, 40.0, 10.0)],
        nodes=[make_gnb(0.0, 0.0, 10.0)],
        grid=UeGrid(origin=Point3(x=10.0, y=-20.0, z=0.0), nx=9, ny=9, spacing=5.0),
    )


@pytest.fixture
def cross_street():
    """The shipped gNB-only cross-street scenario."""
    return Scenario.model_validate_json((SCENARIOS_DIR / "cross_street.json").read_text())


@pytest.fixture
def cross_street_ris():
    """The shipped cross-street scenario with three corner RIS."""
    return Scenario.model_validate_json((SCENARIOS_DIR / "cross_street_ris.json").read_text())


@pytest.fixture
def cross_street_coarse():
    """The cross-street scenario over a 4 m grid, used for planning."""
    return Scenario.model_validate_json((SCENARIOS_DIR / "cross_street_coarse.json").read_text())


# ============================================================================
# Reporter fixtures
# ============================================================================


@pytest.fixture
def mock_console():
    """Create a mock Rich console."""
    console = MagicMock(spec=Console)
    console.width = 120
    return console


@pytest.fixture
def sample_report_data():
    """Create a sample ReportData for testing."""
    return ReportData(
        command="coverage",
        subject="cross_street.json",
        version="0.1.0",
        metrics=[
            Metric(name="points", value=2824),
            Metric(name="coverage_fraction", value=0.5),
            Metric(name="cell_edge_power", value=-120.5, unit="dBm"),
        ],
        tables=[
            ReportTable(
                title="Percentiles",
                columns=["percentile", "rx_power_dbm", "capacity_bps"],
                rows=[[10, -120.5, 1.0e5], [50, -60.0, 2.0e9]],
            )
        ],
        artifacts=["coverage.csv"],
    )


# ============================================================================
# Logger fixtures
# ============================================================================


@pytest.fixture(autouse=True)
def reset_logger():
    """Reset the global logger state before each test."""
    import smartem.debug as debug_module

    debug_module._logger = None
    debug_module._log_file = None
    debug_module._debug_enabled = False
    yield
    debug_module._logger = None
    debug_module._log_file = None
    debug_module._debug_enabled = False


# ============================================================================
# CLI testing fixtures
# ============================================================================


@pytest.fixture
def cli_runner(tmp_path):
    """Run the CLI in a subprocess with logs and cache under ``tmp_path``."""
    import os
    import subprocess
    import sys

    home = tmp_path / "home"
    home.mkdir()
    env = {**os.environ, "HOME": str(home), "SMARTEM_THREADS": "2", "COLUMNS": "160"}

    def run_smartem(*args):
        """Run smartem CLI command with given arguments."""
        cmd = [sys.executable, "-m", "smartem"] + [str(a) for a in args]
        return subprocess.run(cmd, capture_output=True, text=True, check=False, env=env)

    return run_smartem
