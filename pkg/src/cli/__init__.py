"""Command-line front end: argument parsing, run configuration and error reporting."""
