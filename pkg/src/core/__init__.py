"""Core modules for configuration, errors and logging."""
