"""Numerical toolkit for symmetric-gradient Sobolev inequalities on planar polygons."""

__version__ = "0.1.0"
