"""Unit tests: single modules, console and I/O mocked."""
