"""
List nodes command - display the supported node classes.
"""

from rich import box
from rich.table import Table

from smartem.commands import app, console
from smartem.nodes import list_node_models


@app.command(name="list-nodes")
def list_nodes_cmd():
    """List supported node classes with their default planning cost."""
    table = Table(title="Supported Node Classes", box=box.ROUNDED)
    table.add_column("Kind", style="bold")
    table.add_column("Name")
    table.add_column("Cost", justify="right")
    table.add_column("Description")
    table.add_column("Aliases", style="dim")

    for info in list_node_models():
        alias_str = ", ".join(info.aliases) if info.aliases else "-"
        table.add_row(
            info.kind, info.display_name, f"{info.default_cost:g}", info.description, alias_str
        )

    console.print(table)
