"""Wigner functions for continuous-variable, qubit and hybrid quantum states.

Quick start::

    from hybridwigner import states, wigner
    rho = states.bell_cat(3.0).proj()
    field = wigner.evaluate_hybrid(rho)
    wigner.integrate(field)   # ~1.0
"""

from . import dynamics, fieldio, grids, kernels, operators, render, states, verify, wigner
from .errors import (
    HybridWignerError,
    InvalidInputError,
    NumericError,
    TruncationError,
    TruncationWarning,
)
from .grids import CvGrid, SphereGrid
from .operators import Ket, Operator
from .wigner import HybridField

__version__ = "0.1.0"

__all__ = [
    "dynamics",
    "fieldio",
    "grids",
    "kernels",
    "operators",
    "render",
    "states",
    "verify",
    "wigner",
    "CvGrid",
    "SphereGrid",
    "Ket",
    "Operator",
    "HybridField",
    "HybridWignerError",
    "InvalidInputError",
    "NumericError",
    "TruncationError",
    "TruncationWarning",
]
