"""
CLI commands for smartem.

This module defines the cyclopts app and registers all commands.
"""

import cyclopts
from rich.console import Console

# Shared console instance for all commands
console = Console()

# Main application
app = cyclopts.App(
    name="smartem",
    help="Simulate and plan mmWave deployments with IAB nodes, smart repeaters, RIS and smart skins.",
    version_flags=(),
)

# Import and register commands
# These imports must come after app is defined to avoid circular imports
from smartem.commands.cdf import cdf_cmd  # noqa: E402, F401
from smartem.commands.clear_cache import clear_cache_cmd  # noqa: E402, F401
from smartem.commands.coverage import coverage_cmd  # noqa: E402, F401
from smartem.commands.envelope import envelope_cmd  # noqa: E402, F401
from smartem.commands.list_nodes import list_nodes_cmd  # noqa: E402, F401
from smartem.commands.plan import plan_cmd  # noqa: E402, F401
from smartem.commands.src import src_cmd  # noqa: E402, F401
from smartem.commands.validate import validate_cmd  # noqa: E402, F401

__all__ = ["app", "console"]
