"""Constraint-based generation of diverse assembly variants and JOP gadget analysis."""

__version__ = "0.1.0"
