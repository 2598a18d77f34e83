"""Exact verification toolkit for character varieties and torsion divisors of
the Whitehead link and the odd twisted Whitehead links."""

__version__ = "0.1.0"
