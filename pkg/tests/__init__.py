"""Tests for the cutlocus package."""
