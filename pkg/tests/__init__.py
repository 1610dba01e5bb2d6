"""Test suite for 健身计划管理 API."""
