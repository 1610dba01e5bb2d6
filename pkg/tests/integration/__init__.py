"""Integration tests for complete user flows."""
