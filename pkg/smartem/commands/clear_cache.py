"""
Clear cache command - remove cached scan-loss envelopes.
"""

from smartem.cache import clear_cache
from smartem.commands import app, console


@app.command(name="clear-cache")
def clear_cache_cmd():
    """Clear cached data."""
    cleared = clear_cache()
    if cleared:
        console.print(f"[yellow]Cleared caches: {', '.join(cleared)}[/yellow]")
    else:
        console.print("[yellow]No cache to clear[/yellow]")
