"""Distributional conformal prediction intervals for Markov series.

For each candidate future value y on a trial grid, the observed pairs
are augmented with (x_n, y), every pair's conditional rank is computed
on the augmented dataset, and the conformity score |rank - 1/2| of the
candidate is compared against all scores to form a p-value. The interval
is the convex hull of {y : p(y) > alpha}.

The scan is evaluated for the whole grid at once: predictor weights do
not depend on the candidate response, so only the kernel terms against
the candidate vary along the grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeights, EmptyAcceptedSet
from .kernels import Bandwidths, log_weight_matrix, smooth_cdf_kernel
from .series import EmbeddedPairs, Method, NominalLevel, PredictionInterval, TimeSeriesSample

__all__ = [
    "TrialGrid",
    "ConformalTrace",
    "build_trial_grid",
    "mdcp_pvalue",
    "conformal_interval",
]

_DEGENERATE_GRID_EPS = 1e-8
_K_AT_ZERO = float(smooth_cdf_kernel(0.0))  # self kernel term of an augmented pair


@dataclass(frozen=True)
class TrialGrid:
    """Strictly increasing candidate values scanned by the conformal engine."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("trial grid needs at least 2 points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("trial grid points must be finite")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("trial grid points must be strictly increasing")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return int(self.points.size)


@dataclass(frozen=True)
class ConformalTrace:
    """Per-candidate diagnostics of one conformal scan.

    pvalues are multiples of 1/n_augmented and never smaller than
    1/n_augmented (the candidate always matches itself).
    """

    ys: np.ndarray
    pvalues: np.ndarray
    accepted: np.ndarray
    n_augmented: int


def build_trial_grid(series: TimeSeriesSample, G: int) -> TrialGrid:
    """G equally spaced candidates spanning [-m, m], m = max |Y_t|.

    A constant-zero series has m = 0; the grid degenerates to the
    two-point set {-eps, +eps} with eps = 1e-8.
    """
    if G < 2:
        raise ValueError("G must be >= 2")
    m = float(np.max(np.abs(series.values)))
    if m == 0.0:
        return TrialGrid(points=np.array([-_DEGENERATE_GRID_EPS, _DEGENERATE_GRID_EPS]))
    return TrialGrid(points=np.linspace(-m, m, G))


def _grid_pvalues(
    pairs: EmbeddedPairs,
    bw: Bandwidths,
    x_n: np.ndarray,
    ys: np.ndarray,
    predictive: bool,
) -> np.ndarray:
    """Conformal p-values for every candidate in ys (shape (G,))."""
    x_n = np.atleast_1d(np.asarray(x_n, dtype=np.float64))
    n0 = pairs.count
    resp = pairs.responses
    aug_predictors = np.vstack([pairs.predictors, x_n[None, :]])

    logw = log_weight_matrix(aug_predictors, aug_predictors, bw.h)
    colmax = logw.max(axis=0)
    if not np.all(np.isfinite(colmax)):
        raise DegenerateWeights("kernel weights underflowed in the augmented dataset")
    omega = np.exp(logw - colmax[None, :])

    h0 = bw.h0
    # kernel of each real response against every other real response
    k_real = smooth_cdf_kernel((resp[None, :] - resp[:, None]) / h0)
    base_numer = np.einsum("it,it->t", omega[:n0, :n0], k_real)
    # denominators reuse the numerators' exact summation structure so
    # that all-equal responses yield ranks of exactly 0.5 (score ties
    # must survive floating point; the p-value is a tie-sensitive count)
    base_den = np.einsum("it,it->t", omega[:n0, :n0], np.ones_like(k_real))
    cand_row = omega[n0, :n0]        # candidate's weight in each real pair's rank
    cand_col = omega[:n0, n0]        # each real pair's weight in the candidate's rank
    cand_self = omega[n0, n0]

    # kernel terms that vary along the grid
    k_resp_vs_y = smooth_cdf_kernel((resp[:, None] - ys[None, :]) / h0)  # (n0, G)
    k_y_vs_resp = smooth_cdf_kernel((ys[None, :] - resp[:, None]) / h0)  # (n0, G)
    ones_grid = np.ones_like(k_y_vs_resp)

    diag = np.diagonal(omega)[:n0]
    if predictive:
        numer = (base_numer - _K_AT_ZERO * diag)[:, None] \
            + cand_row[:, None] * k_resp_vs_y
        den = (base_den - diag) + cand_row
        cand_numer = cand_col @ k_y_vs_resp
        cand_den = cand_col @ ones_grid
    else:
        numer = base_numer[:, None] + cand_row[:, None] * k_resp_vs_y
        den = base_den + cand_row
        cand_numer = cand_col @ k_y_vs_resp + _K_AT_ZERO * cand_self
        cand_den = cand_col @ ones_grid + cand_self
    if np.any(den <= 0.0) or np.any(cand_den <= 0.0):
        raise DegenerateWeights("leave-one-out denominator underflowed")

    ranks = numer / den[:, None]                     # (n0, G)
    cand_rank = cand_numer / cand_den                # (G,)
    scores = np.abs(ranks - 0.5)
    cand_score = np.abs(cand_rank - 0.5)
    n_aug = n0 + 1
    counts = (scores >= cand_score[None, :]).sum(axis=0) + 1  # candidate matches itself
    return counts / float(n_aug)


def mdcp_pvalue(
    pairs: EmbeddedPairs,
    bw: Bandwidths,
    x_n,
    y_cand: float,
    predictive: bool = False,
) -> float:
    """Conformal p-value of a single candidate future value."""
    ys = np.asarray([float(y_cand)])
    return float(_grid_pvalues(pairs, bw, np.asarray(x_n), ys, predictive)[0])


def conformal_interval(
    pairs: EmbeddedPairs,
    bw: Bandwidths,
    x_n,
    grid: TrialGrid,
    alpha: NominalLevel,
    predictive: bool = False,
) -> tuple[PredictionInterval, ConformalTrace]:
    """Grid-scan conformal interval plus its full per-candidate trace.

    Returns the convex hull [min A, max A] of the accepted set
    A = {y : p(y) > alpha}; the trace preserves any interior rejection.

    Raises
    ------
    EmptyAcceptedSet
        If no candidate is accepted (alpha at or above the largest
        achievable p-value for this augmented sample size or grid).
    """
    ys = grid.points
    pvalues = _grid_pvalues(pairs, bw, np.asarray(x_n), ys, predictive)
    accepted = pvalues > alpha.alpha
    trace = ConformalTrace(
        ys=ys, pvalues=pvalues, accepted=accepted, n_augmented=pairs.count + 1
    )
    if not bool(np.any(accepted)):
        raise EmptyAcceptedSet(
            f"no trial candidate reached p > {alpha.alpha}; "
            f"max p = {float(pvalues.max()):.6g}"
        )
    hull = ys[accepted]
    method = Method.PMDCP if predictive else Method.MDCP
    interval = PredictionInterval(
        lower=float(hull.min()), upper=float(hull.max()), alpha=alpha, method=method
    )
    return interval, trace
