"""Exact symbolic verification of Lie, transversal-Lie and Courant algebroids over foliated polynomial charts."""

__version__ = "0.1.0"
