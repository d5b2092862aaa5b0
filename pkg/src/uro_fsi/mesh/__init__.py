"""Geometry profile, solid mesh and Eulerian grid."""
