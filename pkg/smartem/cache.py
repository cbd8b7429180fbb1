"""
Disk cache for expensive, deterministic results (optimized scan-loss envelopes).

Entries never expire by age. They are tagged with the tool version instead and
ignored after an upgrade, since a new release may change the optimizer.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ValidationError

from smartem import __version__

CACHE_DIR = Path.home() / ".cache" / "smartem"

ENVELOPE_NAMESPACE = "envelope"

# Namespaces whose directory exists already in this process
_ensured_namespaces: set[str] = set()


class CacheEntry(BaseModel):
    """A cached value with the version that produced it."""

    version: str = __version__
    value: Any


def ensure_cache_dir() -> None:
    CACHE_DIR.mkdir(parents=True, exist_ok=True)


def cache_key(*parts: Any) -> str:
    """Stable key from JSON-serializable parts (models are dumped first)."""
    normalized = [p.model_dump(mode="json") if isinstance(p, BaseModel) else p for p in parts]
    return json.dumps(normalized, sort_keys=True, separators=(",", ":"))


def get_cache_path(namespace: str, key: str) -> Path:
    """File holding ``key`` in ``namespace``; the namespace directory is created on first use."""
    ns_dir = CACHE_DIR / namespace
    if namespace not in _ensured_namespaces:
        ensure_cache_dir()
        ns_dir.mkdir(exist_ok=True)
        _ensured_namespaces.add(namespace)
    return ns_dir / f"{hashlib.md5(key.encode()).hexdigest()}.json"


def read_cache(namespace: str, key: str) -> Optional[Any]:
    """Cached value, or None on a miss, a corrupt entry or a version mismatch."""
    path = get_cache_path(namespace, key)
    if not path.exists():
        return None
    try:
        entry = CacheEntry.model_validate_json(path.read_text())
    except ValidationError:
        return None
    return entry.value if entry.version == __version__ else None


def write_cache(namespace: str, key: str, value: Any) -> None:
    get_cache_path(namespace, key).write_text(CacheEntry(value=value).model_dump_json())


def clear_cache(namespace: Optional[str] = None) -> list[str]:
    """
    Delete cached entries.

    Args:
        namespace: Namespace to clear, or None for every namespace.

    Returns:
        Names of the namespaces that existed and were emptied, sorted.
    """
    if not CACHE_DIR.exists():
        return []
    if namespace is None:
        targets = sorted(p for p in CACHE_DIR.iterdir() if p.is_dir())
    else:
        targets = [p for p in (CACHE_DIR / namespace,) if p.is_dir()]

    for ns_dir in targets:
        for entry in ns_dir.glob("*.json"):
            entry.unlink()
    return [p.name for p in targets]
