"""Interface entrypoints."""
