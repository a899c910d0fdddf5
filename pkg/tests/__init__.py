"""Tests for energy-econometrics."""
