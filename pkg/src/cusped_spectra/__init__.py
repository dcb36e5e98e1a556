"""Numerical toolkit for cusped hyperbolic metrics and their spectral invariants.

Modules
-------
constants   universal torsion constants (C_k, c_k, B, E, E_k)
hyperbolic  SL(2,R) elements, free-group words, certified length spectra
zeta        truncated Selberg zeta and Mellin-split spectral zeta
torsion     torsion and log-Quillen assembly
geometry    model cusp/cylinder/grafted chart metrics, curvature, Chern densities
quadrature  singular quadrature, regularized integrals, node identities
cli         command-line interface emitting JSON reports
"""

from . import constants, geometry, hyperbolic, quadrature, torsion, zeta

__all__ = ["constants", "geometry", "hyperbolic", "quadrature", "torsion", "zeta"]

__version__ = "0.1.0"
