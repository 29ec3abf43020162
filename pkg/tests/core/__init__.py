# tests/core/__init__.py
"""Tests for core module."""
