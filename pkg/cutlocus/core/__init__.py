"""Meshes, distances and constrained solvers."""
