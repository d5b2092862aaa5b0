"""Tests for result export and clinical comparison."""
