"""Contract tests for API endpoints."""
