"""Core data types and the Markov embedding.

A series Y_1..Y_n is viewed as regression pairs (X_{t-1}, Y_t) where
X_{t-1} = (Y_{t-1}, ..., Y_{t-p}) stacks the last p observations,
most recent first.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonFiniteInput, OrderTooLarge

__all__ = [
    "TimeSeriesSample",
    "EmbeddedPairs",
    "NominalLevel",
    "Method",
    "PredictionInterval",
    "embed",
    "last_predictor",
]


def _as_finite_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput(f"{name} contains NaN or infinite entries")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeriesSample:
    """An ordered sample Y_1..Y_n of real observations."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_finite_array(self.values, "series", ndim=1)
        if arr.size < 1:
            raise ValueError("series must contain at least one observation")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class EmbeddedPairs:
    """Regression pairs (X_{t-1}, Y_t) for t = p+1..n.

    predictors has shape (count, p) with row t holding
    (Y_{t-1}, ..., Y_{t-p}); responses has shape (count,).
    """

    p: int
    predictors: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("order p must be >= 1")
        preds = _as_finite_array(self.predictors, "predictors", ndim=2)
        resps = _as_finite_array(self.responses, "responses", ndim=1)
        if preds.shape[0] != resps.size:
            raise ValueError("predictors and responses disagree on pair count")
        if preds.shape[1] != self.p:
            raise ValueError("predictor dimension differs from order p")
        if resps.size < 2:
            raise OrderTooLarge("need at least 2 pairs (n >= p + 2)")
        object.__setattr__(self, "predictors", preds)
        object.__setattr__(self, "responses", resps)

    @property
    def count(self) -> int:
        return int(self.responses.size)


@dataclass(frozen=True)
class NominalLevel:
    """Miscoverage probability alpha of a 1-alpha prediction interval."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or not 0.0 < a < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "alpha", a)


class Method(str, Enum):
    MF = "MF"
    PMF = "PMF"
    MDCP = "MDCP"
    PMDCP = "PMDCP"


@dataclass(frozen=True)
class PredictionInterval:
    """A closed interval [lower, upper] at nominal level 1 - alpha."""

    lower: float
    upper: float
    alpha: NominalLevel
    method: Method = Method.MDCP

    def __post_init__(self):
        lo = float(self.lower)
        hi = float(self.upper)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise NonFiniteInput("interval endpoints must be finite")
        if lo > hi:
            raise ValueError(f"lower {lo} exceeds upper {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def length(self) -> float:
        return self.upper - self.lower


def embed(series: TimeSeriesSample, p: int) -> EmbeddedPairs:
    """Build the regression pairs of a Markov(p) view of the series.

    Parameters
    ----------
    series : TimeSeriesSample
        Observations Y_1..Y_n in time order.
    p : int
        Markov order; requires n >= p + 2 so at least two pairs exist.

    Returns
    -------
    EmbeddedPairs
        Pair t has predictor (Y_{t-1}, ..., Y_{t-p}) and response Y_t,
        for t = p+1..n, ordered by t.
    """
    if p < 1:
        raise ValueError("order p must be >= 1")
    y = series.values
    n = series.n
    if n < p + 2:
        raise OrderTooLarge(f"series length {n} < p + 2 = {p + 2}")
    count = n - p
    # column s holds Y_{t-1-s}: most recent lag first
    predictors = np.column_stack([y[p - 1 - s : n - 1 - s] for s in range(p)])
    responses = y[p:]
    return EmbeddedPairs(p=p, predictors=predictors, responses=responses)


def last_predictor(series: TimeSeriesSample, p: int) -> np.ndarray:
    """Return X_n = (Y_n, Y_{n-1}, ..., Y_{n-p+1}), the newest p-vector."""
    if p < 1:
        raise ValueError("order p must be >= 1")
    if series.n < p:
        raise OrderTooLarge(f"series length {series.n} < p = {p}")
    return series.values[-p:][::-1].copy()
