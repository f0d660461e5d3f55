"""Command-line interface: JSON model files, the subcommand surface, and
the built-in model zoo."""
