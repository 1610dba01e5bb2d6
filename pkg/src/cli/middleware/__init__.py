"""Error reporting for command-line runs."""
