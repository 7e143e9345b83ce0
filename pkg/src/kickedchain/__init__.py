"""Symbolic and exact numerics for kicked dipolar spin chains."""

__version__ = "0.1.0"

from .ladder import (
    LadderString,
    LengthMismatchError,
    OperatorSum,
    SiteSymbol,
    adjoint,
    coherence_decompose,
    coherence_sector,
    commutator,
    frobenius_norm,
    inner,
    multiply,
    rotate_z,
)

__all__ = [
    "LadderString",
    "LengthMismatchError",
    "OperatorSum",
    "SiteSymbol",
    "adjoint",
    "coherence_decompose",
    "coherence_sector",
    "commutator",
    "frobenius_norm",
    "inner",
    "multiply",
    "rotate_z",
    "__version__",
]
