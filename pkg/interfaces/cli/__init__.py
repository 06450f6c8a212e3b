"""Command-line surface: config files, dispatch and CSV/JSON outputs."""
