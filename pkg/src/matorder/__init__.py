"""Quasi matrix means, matrix orderings and counterexample search."""

from .errors import (
    DegenerateBase,
    InvalidInput,
    MatOrderError,
    NonConvergence,
    NumericalDomain,
    OracleUnstable,
    SupportViolation,
)
from .linalg import PsdMat, Projection, eigh, func_calc, gpower, proj_join, proj_meet, support
from .means import MeanKind, MeanResult, MeanSpec, evaluate

__all__ = [
    "DegenerateBase",
    "InvalidInput",
    "MatOrderError",
    "MeanKind",
    "MeanResult",
    "MeanSpec",
    "NonConvergence",
    "NumericalDomain",
    "OracleUnstable",
    "Projection",
    "PsdMat",
    "SupportViolation",
    "eigh",
    "evaluate",
    "func_calc",
    "gpower",
    "proj_join",
    "proj_meet",
    "support",
]

__version__ = "0.1.0"
