"""smartem test suite."""
