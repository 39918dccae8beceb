"""Translating solitons of curvature-driven planar flows as critical curves of curvature energies."""
