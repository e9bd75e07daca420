"""Quench interferometry toolkit for transverse Ising and XY chains."""

from . import analysis, closedform, correlators, edoracle, evolver, lattice, protocol, quadrature, specfun

__all__ = [
    "analysis",
    "closedform",
    "correlators",
    "edoracle",
    "evolver",
    "lattice",
    "protocol",
    "quadrature",
    "specfun",
]

__version__ = "0.1.0"
