"""Nilpotent extensions of Q via squarefree tuples: groups, parametrization, counts."""

__version__ = "0.1.0"
