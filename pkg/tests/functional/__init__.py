"""Functional tests: the CLI and acceptance checks, run end to end."""
