"""Exact stability presentations over exceptional collections.

The package models presentations of stability data by phase tokens,
mutates exceptional collections with their hom tables, acts by the
lifted positive linear group, and checks every chart level claim
against an exact quiver representation oracle.
"""

from __future__ import annotations

from .klattice import (
    CentralCharge,
    EulerMatrix,
    GaussianRational,
    OracleBoundError,
    PhaseToken,
    Quiver,
    euler_matrix,
    euler_pair,
    gauss,
    kronecker_quiver,
    phase_compare,
)

__version__ = "0.1.0"

__all__ = [
    "CentralCharge",
    "EulerMatrix",
    "GaussianRational",
    "OracleBoundError",
    "PhaseToken",
    "Quiver",
    "euler_matrix",
    "euler_pair",
    "gauss",
    "kronecker_quiver",
    "phase_compare",
    "__version__",
]
