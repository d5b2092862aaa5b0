"""Tests for uro-fsi."""
