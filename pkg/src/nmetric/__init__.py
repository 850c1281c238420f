"""Pseudo n-metrics: constructions, axiom checkers and reproducible counterexamples."""

from .errors import (
    CapacityError,
    ConstructionBug,
    DegenerateInput,
    DisconnectedHypergraph,
    InvalidGram,
    NumericalFailure,
    UsageError,
)
from .linalg import Rng

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConstructionBug",
    "DegenerateInput",
    "DisconnectedHypergraph",
    "InvalidGram",
    "NumericalFailure",
    "UsageError",
    "Rng",
]
