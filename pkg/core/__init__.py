"""Core modules for the random free-boundary logistic solver suite."""
