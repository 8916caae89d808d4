"""Exception types shared across the package.

Grouped by how the CLI maps them to exit codes: configuration problems
(usage), bad input data, and numerical degeneracies.
"""

from __future__ import annotations

__all__ = [
    "MarkovPIError",
    "OrderTooLarge",
    "NonFiniteInput",
    "DimensionMismatch",
    "DegenerateWeights",
    "InvalidIndex",
    "InvalidProbability",
    "DegenerateData",
    "EmptyAcceptedSet",
    "WarmupTooShort",
    "ParseError",
    "EmptyFile",
]


class MarkovPIError(Exception):
    """Base class for every error raised by this package."""


# --- input data problems ---

class OrderTooLarge(MarkovPIError):
    """Series too short for the requested Markov order."""


class NonFiniteInput(MarkovPIError):
    """NaN or infinity where a finite real is required."""


class DimensionMismatch(MarkovPIError):
    """Predictor vectors of unequal dimension."""


class DegenerateData(MarkovPIError):
    """Data carries no usable signal (e.g. all responses identical)."""


class ParseError(MarkovPIError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class EmptyFile(MarkovPIError):
    """Input file contains no observations."""


# --- configuration problems ---

class InvalidIndex(MarkovPIError):
    """Pair index outside the valid range."""


class InvalidProbability(MarkovPIError):
    """Probability argument outside its domain."""


class WarmupTooShort(MarkovPIError):
    """Bootstrap warm-up shorter than the Markov order."""


# --- numerical degeneracies ---

class DegenerateWeights(MarkovPIError):
    """Kernel weight denominator underflowed to zero even in log space."""


class EmptyAcceptedSet(MarkovPIError):
    """No trial-grid candidate had p-value above alpha."""
