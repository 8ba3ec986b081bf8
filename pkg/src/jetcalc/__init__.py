"""Exact computation of differential operators, derivations and jet modules
over finite-dimensional associative algebras."""

__version__ = "0.1.0"
