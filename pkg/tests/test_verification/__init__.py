"""Tests for the analytic oracle suite."""
