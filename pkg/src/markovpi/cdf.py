"""Kernel-smoothed conditional CDF estimation and numerical inversion.

The estimator at query (x, y) is a weighted average of smoothed response
indicators:

    F_hat(y | x) = sum_i W_h(X_i, x) K((y - Y_i) / h0) / sum_i W_h(X_i, x)

summed over the stored pairs (plus an optional augmented pair). The
leave-one-out variant excludes one pair from both sums. Weights are
normalized per query by their log-space maximum before exponentiating,
so the ratio survives queries far from the data; if every log weight is
-inf the denominator is genuinely degenerate and DegenerateWeights is
raised instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateWeights,
    DimensionMismatch,
    InvalidIndex,
    InvalidProbability,
    NonFiniteInput,
)
from .kernels import Bandwidths, log_weight_matrix, smooth_cdf_kernel
from .series import EmbeddedPairs

__all__ = [
    "ConditionalCdfModel",
    "estimate",
    "estimate_loo",
    "transform_ranks",
    "invert",
]

_BISECT_TOL = 1e-8
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class ConditionalCdfModel:
    """Immutable bundle of pairs, bandwidths, and an optional extra pair.

    The augmented pair participates in the sums exactly as if it were
    appended to the dataset, which is how the conformal engine forms its
    candidate-augmented estimators.
    """

    pairs: EmbeddedPairs
    bw: Bandwidths
    augment_pair: tuple | None = None

    def __post_init__(self):
        preds = self.pairs.predictors
        resps = self.pairs.responses
        if self.augment_pair is not None:
            ax, ay = self.augment_pair
            ax = np.atleast_1d(np.asarray(ax, dtype=np.float64))
            ay = float(ay)
            if ax.shape != (self.pairs.p,):
                raise DimensionMismatch(
                    f"augment predictor has shape {ax.shape}, expected ({self.pairs.p},)"
                )
            if not (np.all(np.isfinite(ax)) and np.isfinite(ay)):
                raise NonFiniteInput("augment pair must be finite")
            preds = np.vstack([preds, ax[None, :]])
            resps = np.append(resps, ay)
        object.__setattr__(self, "_predictors", preds)
        object.__setattr__(self, "_responses", resps)

    @property
    def predictors(self) -> np.ndarray:
        return self._predictors

    @property
    def responses(self) -> np.ndarray:
        return self._responses


def _query_vector(x, p: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != (p,):
        raise DimensionMismatch(f"query predictor has shape {x.shape}, expected ({p},)")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("query predictor must be finite")
    return x


def normalized_weight_columns(
    predictors: np.ndarray, queries: np.ndarray, h: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-query normalized kernel weights.

    Returns (omega, denom) where omega[i, q] = exp(logW[i, q] - max_i logW[i, q])
    and denom[q] = sum_i omega[i, q]. The normalization cancels in the
    estimator ratio and guarantees denom >= 1 whenever any weight is
    representable.

    Raises DegenerateWeights if some query column has no finite log weight.
    """
    logw = log_weight_matrix(predictors, queries, h)
    single = logw.ndim == 1
    if single:
        logw = logw[:, None]
    colmax = logw.max(axis=0)
    if not np.all(np.isfinite(colmax)):
        raise DegenerateWeights(
            "all kernel weights underflowed for at least one query point"
        )
    omega = np.exp(logw - colmax[None, :])
    denom = omega.sum(axis=0)
    if single:
        return omega[:, 0], float(denom[0])
    return omega, denom


def estimate(model: ConditionalCdfModel, x, y: float) -> float:
    """Evaluate the smoothed conditional CDF at (x, y).

    Parameters
    ----------
    model : ConditionalCdfModel
    x : array-like of shape (p,)
        Conditioning predictor.
    y : float
        Response threshold.

    Returns
    -------
    float in [0, 1], nondecreasing in y.
    """
    x = _query_vector(x, model.pairs.p)
    y = float(y)
    if not np.isfinite(y):
        raise NonFiniteInput("query response must be finite")
    omega, denom = normalized_weight_columns(model.predictors, x, model.bw.h)
    k = smooth_cdf_kernel((y - model.responses) / model.bw.h0)
    val = float(omega @ k) / denom
    return min(max(val, 0.0), 1.0)


def estimate_batch(model: ConditionalCdfModel, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized estimate over paired queries (xs[q], ys[q])."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    omega, denom = normalized_weight_columns(model.predictors, xs, model.bw.h)
    z = (ys[None, :] - model.responses[:, None]) / model.bw.h0
    vals = np.einsum("iq,iq->q", omega, smooth_cdf_kernel(z)) / denom
    return np.clip(vals, 0.0, 1.0)


def estimate_loo(pairs: EmbeddedPairs, bw: Bandwidths, t: int, x, y: float) -> float:
    """Leave-one-out estimate: pair t is excluded from both sums.

    Numerically this masks pair t inside the full-dataset accumulation
    rather than physically deleting it; agreement with estimate() on the
    deleted dataset is a tested equivalence, not a shared code path.
    """
    n = pairs.count
    if not isinstance(t, (int, np.integer)) or not 0 <= t < n:
        raise InvalidIndex(f"pair index {t} outside [0, {n})")
    x = _query_vector(x, pairs.p)
    y = float(y)
    if not np.isfinite(y):
        raise NonFiniteInput("query response must be finite")
    logw = log_weight_matrix(pairs.predictors, x, bw.h)
    logw[t] = -np.inf
    m = logw.max()
    if not np.isfinite(m):
        raise DegenerateWeights("all leave-one-out kernel weights underflowed")
    omega = np.exp(logw - m)
    k = smooth_cdf_kernel((y - pairs.responses) / bw.h0)
    val = float(omega @ k) / float(omega.sum())
    return min(max(val, 0.0), 1.0)


def transform_ranks(pairs: EmbeddedPairs, bw: Bandwidths, loo: bool = False) -> np.ndarray:
    """Conditional ranks of every pair at its own (predictor, response).

    With loo=False, rank t is estimate() at pair t; with loo=True the
    t-th pair is excluded from its own rank (the predictive transform).
    Under the true conditional law these are approximately i.i.d.
    Uniform(0, 1).
    """
    logw = log_weight_matrix(pairs.predictors, pairs.predictors, bw.h)
    if loo:
        np.fill_diagonal(logw, -np.inf)
    colmax = logw.max(axis=0)
    if not np.all(np.isfinite(colmax)):
        raise DegenerateWeights("kernel weights underflowed for some pair")
    omega = np.exp(logw - colmax[None, :])
    resp = pairs.responses
    z = (resp[None, :] - resp[:, None]) / bw.h0  # (i, t): K((Y_t - Y_i)/h0)
    numer = np.einsum("it,it->t", omega, smooth_cdf_kernel(z))
    return np.clip(numer / omega.sum(axis=0), 0.0, 1.0)


def invert_weighted(
    omega: np.ndarray,
    responses: np.ndarray,
    h0: float,
    targets: np.ndarray,
    tol: float = _BISECT_TOL,
    max_iter: int = _BISECT_MAX_ITER,
) -> np.ndarray:
    """Vectorized bisection inverse of weighted mixture CDFs.

    Solves, per target v, for the smallest y with
    sum_i omega_i K((y - Y_i)/h0) / sum_i omega_i >= v on the exact
    kernel support [min Y - 2 h0, max Y + 2 h0].

    omega and responses must broadcast against (N,) + targets.shape;
    pass shape (N,) entries for a shared mixture, or pre-expanded
    arrays for per-target mixtures.
    """
    targets = np.asarray(targets, dtype=np.float64)
    b_ndim = targets.ndim
    if responses.ndim == 1 and b_ndim > 0:
        resp = responses.reshape((-1,) + (1,) * b_ndim)
    else:
        resp = responses
    if omega.ndim == 1 and b_ndim > 0:
        om = omega.reshape((-1,) + (1,) * b_ndim)
    else:
        om = omega
    denom = om.sum(axis=0)
    lo = np.broadcast_to(resp.min(axis=0) - 2.0 * h0, targets.shape).copy()
    hi = np.broadcast_to(resp.max(axis=0) + 2.0 * h0, targets.shape).copy()
    for _ in range(max_iter):
        if float(np.max(hi - lo)) <= tol:
            break
        mid = 0.5 * (lo + hi)
        k = smooth_cdf_kernel((mid[None, ...] - resp) / h0)
        f = (om * k).sum(axis=0) / denom
        ge = f >= targets
        hi = np.where(ge, mid, hi)
        lo = np.where(ge, lo, mid)
    return hi


def invert(model: ConditionalCdfModel, x, v: float) -> float:
    """Smallest y with estimate(model, x, y) >= v, by bisection.

    The bracket is the exact truncated-kernel support; the estimate is
    identically 0 left of it and 1 right of it.
    """
    v = float(v)
    if not np.isfinite(v) or not 0.0 <= v <= 1.0:
        raise InvalidProbability(f"v must lie in [0, 1], got {v}")
    x = _query_vector(x, model.pairs.p)
    omega, _ = normalized_weight_columns(model.predictors, x, model.bw.h)
    out = invert_weighted(omega, model.responses, model.bw.h0, np.float64(v))
    return float(out)
