"""
Unit tests for smartem.cache module.

Tests cover:
- Good path: normal cache operations (read, write, clear)
- Critical path: version tagging, namespace isolation, stable keys
- Bad path: corrupted cache, missing directories
"""

import pytest

from smartem import __version__
from smartem.arrays import ArraySpec
from smartem.cache import (
    CacheEntry,
    cache_key,
    clear_cache,
    ensure_cache_dir,
    get_cache_path,
    read_cache,
    write_cache,
)


class TestEnsureCacheDir:
    """Tests for ensure_cache_dir function."""

    @pytest.mark.unit
    def test_creates_cache_directory(self, temp_cache_dir):
        """Good path: cache directory is created when it doesn't exist."""
        temp_cache_dir.rmdir()

        ensure_cache_dir()

        assert temp_cache_dir.exists()


class TestCacheKey:
    """Tests for cache_key function."""

    @pytest.mark.unit
    def test_models_are_dumped(self):
        """Good path: equal models give equal keys."""
        assert cache_key(ArraySpec(), "2") == cache_key(ArraySpec(), "2")
        assert cache_key(ArraySpec(), "2") != cache_key(ArraySpec(n_elements=4), "2")

    @pytest.mark.unit
    def test_dict_order_irrelevant(self):
        """Critical path: mapping order does not change the key."""
        assert cache_key({"a": 1, "b": 2}) == cache_key({"b": 2, "a": 1})


class TestGetCachePath:
    """Tests for get_cache_path function."""

    @pytest.mark.unit
    def test_returns_path_in_namespace(self, temp_cache_dir):
        """Good path: returns correct path structure."""
        path = get_cache_path("envelope", "key")

        assert path.parent == temp_cache_dir / "envelope"
        assert path.suffix == ".json"
        assert path.parent.exists()

    @pytest.mark.unit
    def test_key_is_hashed(self, temp_cache_dir):
        """Good path: keys with path separators are safe."""
        path = get_cache_path("envelope", "a/b:c")

        assert "/" not in path.stem
        assert len(path.stem) == 32


class TestReadWriteCache:
    """Tests for read_cache and write_cache functions."""

    @pytest.mark.unit
    def test_round_trip(self, temp_cache_dir):
        """Good path: written values are read back."""
        write_cache("envelope", "k", {"angles": [0.0, 1.0]})

        assert read_cache("envelope", "k") == {"angles": [0.0, 1.0]}

    @pytest.mark.unit
    def test_miss(self, temp_cache_dir):
        """Good path: an absent entry is a miss."""
        assert read_cache("envelope", "absent") is None

    @pytest.mark.unit
    def test_other_version_is_miss(self, temp_cache_dir):
        """Critical path: entries written by another version are ignored."""
        path = get_cache_path("envelope", "k")
        path.write_text(CacheEntry(version="0.0.0-old", value=[1]).model_dump_json())

        assert read_cache("envelope", "k") is None

    @pytest.mark.unit
    def test_entry_tagged_with_version(self, temp_cache_dir):
        """Good path: entries record the writing version."""
        write_cache("envelope", "k", 1)

        entry = CacheEntry.model_validate_json(get_cache_path("envelope", "k").read_text())
        assert entry.version == __version__

    @pytest.mark.unit
    def test_corrupted_entry(self, temp_cache_dir):
        """Bad path: unreadable entries are misses."""
        get_cache_path("envelope", "k").write_text("{not json")

        assert read_cache("envelope", "k") is None

    @pytest.mark.unit
    def test_namespaces_isolated(self, temp_cache_dir):
        """Critical path: the same key in two namespaces holds two values."""
        write_cache("a", "k", 1)
        write_cache("b", "k", 2)

        assert (read_cache("a", "k"), read_cache("b", "k")) == (1, 2)


class TestClearCache:
    """Tests for clear_cache function."""

    @pytest.mark.unit
    def test_clear_all(self, temp_cache_dir):
        """Good path: every namespace is emptied and listed."""
        write_cache("envelope", "k", 1)
        write_cache("other", "k", 2)

        cleared = clear_cache()

        assert cleared == ["envelope", "other"]
        assert read_cache("envelope", "k") is None

    @pytest.mark.unit
    def test_clear_namespace(self, temp_cache_dir):
        """Good path: other namespaces survive."""
        write_cache("envelope", "k", 1)
        write_cache("other", "k", 2)

        assert clear_cache("envelope") == ["envelope"]
        assert read_cache("other", "k") == 2

    @pytest.mark.unit
    def test_missing_cache_dir(self, temp_cache_dir):
        """Bad path: clearing a cache that never existed clears nothing."""
        temp_cache_dir.rmdir()

        assert clear_cache() == []
        assert clear_cache("envelope") == []
