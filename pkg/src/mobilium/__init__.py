"""Generating functions of mobiles: exact series and determinant formulas."""

__version__ = "0.1.0"
