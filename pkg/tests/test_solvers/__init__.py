"""Tests for the solid, fluid and coupling solvers."""
