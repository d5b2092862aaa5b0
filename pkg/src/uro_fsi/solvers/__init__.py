"""Solid, fluid and coupling kernels."""
