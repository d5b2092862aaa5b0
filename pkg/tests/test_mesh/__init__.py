"""Tests for the solid mesh and the Eulerian grid."""
