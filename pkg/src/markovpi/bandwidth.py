"""Data-driven bandwidth selection for the conditional CDF estimator.

cv_select minimizes the leave-one-out least-squares criterion

    CV(h, h0) = sum_t sum_s [ 1{Y_t <= Y_s} - F_loo(Y_s | X_{t-1}) ]^2

over a candidate grid, where F_loo excludes pair t. The double sum is
evaluated in closed matrix form: one weight matrix per h, one response
kernel matrix per h0, and a GEMM per (h, h0) combination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, DegenerateWeights
from .kernels import Bandwidths, log_weight_matrix, smooth_cdf_kernel
from .series import EmbeddedPairs

__all__ = [
    "BandwidthGrid",
    "rule_of_thumb",
    "default_grid",
    "cv_select",
    "select_bandwidths",
]

# Log-spaced multipliers applied to the rule-of-thumb pair; spans a 16x range.
GRID_MULTIPLIERS = (0.25, 0.5, 2.0 ** -0.5, 1.0, 2.0 ** 0.5, 2.0, 4.0)

# Evaluation points Y_s are subsampled beyond this count to bound CV cost.
CV_SUBSAMPLE_LIMIT = 2000
_CV_SUBSAMPLE_SEED = 20


@dataclass(frozen=True)
class BandwidthGrid:
    """Candidate h and h0 values, each strictly increasing and positive."""

    h_candidates: tuple
    h0_candidates: tuple

    def __post_init__(self):
        for name in ("h_candidates", "h0_candidates"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) == 0:
                raise ValueError(f"{name} must be nonempty")
            arr = np.asarray(vals)
            if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
                raise ValueError(f"{name} must be positive finite reals")
            if not np.all(np.diff(arr) > 0):
                raise ValueError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, vals)


def rule_of_thumb(n: int, p: int, sigma_hat: float) -> Bandwidths:
    """Rate-based defaults h = sigma_hat * n^(-1/(4+p)), h0 = sigma_hat * n^(-2/(4+p))."""
    if p < 1:
        raise ValueError("order p must be >= 1")
    if n < p + 2:
        raise ValueError(f"n must be >= p + 2, got n={n}, p={p}")
    if not (np.isfinite(sigma_hat) and sigma_hat > 0):
        raise ValueError(f"sigma_hat must be positive, got {sigma_hat}")
    rate = float(n) ** (-1.0 / (4 + p))
    return Bandwidths(h=sigma_hat * rate, h0=sigma_hat * rate * rate)


def default_grid(n: int, p: int, sigma_hat: float) -> BandwidthGrid:
    """Multiplier grid centered on the rule-of-thumb values (7 x 7 combinations)."""
    rot = rule_of_thumb(n, p, sigma_hat)
    return BandwidthGrid(
        h_candidates=tuple(m * rot.h for m in GRID_MULTIPLIERS),
        h0_candidates=tuple(m * rot.h0 for m in GRID_MULTIPLIERS),
    )


def _cv_criteria(pairs: EmbeddedPairs, grid: BandwidthGrid) -> np.ndarray:
    """CV criterion for every (h, h0) combination; shape (len(h), len(h0))."""
    resp = pairs.responses
    n_pairs = pairs.count
    if n_pairs > CV_SUBSAMPLE_LIMIT:
        rng = np.random.default_rng(_CV_SUBSAMPLE_SEED)
        sel = np.sort(rng.choice(n_pairs, size=CV_SUBSAMPLE_LIMIT, replace=False))
        y_eval = resp[sel]
    else:
        y_eval = resp

    indicator = (resp[:, None] <= y_eval[None, :]).astype(np.float64)

    kmats = []
    for h0 in grid.h0_candidates:
        z = (y_eval[None, :] - resp[:, None]) / h0
        kmats.append(smooth_cdf_kernel(z))

    crits = np.full((len(grid.h_candidates), len(grid.h0_candidates)), np.inf)
    for a, h in enumerate(grid.h_candidates):
        logw = log_weight_matrix(pairs.predictors, pairs.predictors, h)
        colmax = logw.max(axis=0)
        if not np.all(np.isfinite(colmax)):
            continue
        omega = np.exp(logw - colmax[None, :])
        d_self = np.diagonal(omega).copy()
        denom_loo = omega.sum(axis=0) - d_self
        if np.any(denom_loo <= 0.0):
            # every non-self weight underflowed for some pair at this h
            continue
        for b, kmat in enumerate(kmats):
            numer = omega.T @ kmat
            numer -= d_self[:, None] * kmat
            fit = numer / denom_loo[:, None]
            crits[a, b] = float(((indicator - fit) ** 2).sum())
    return crits


def cv_select(pairs: EmbeddedPairs, grid: BandwidthGrid) -> Bandwidths:
    """Grid argmin of the leave-one-out least-squares CV criterion.

    Ties break toward the smaller h, then the smaller h0 (candidates are
    scanned in increasing order and only a strict improvement moves the
    minimizer).
    """
    if pairs.count < 3:
        raise ValueError("cv_select needs at least 3 pairs")
    if float(np.ptp(pairs.responses)) == 0.0:
        raise DegenerateData("all responses identical; CV criterion is constant")
    crits = _cv_criteria(pairs, grid)
    best = np.inf
    best_hh0 = None
    for a, h in enumerate(grid.h_candidates):
        for b, h0 in enumerate(grid.h0_candidates):
            if crits[a, b] < best:
                best = crits[a, b]
                best_hh0 = (h, h0)
    if best_hh0 is None:
        raise DegenerateWeights("every bandwidth candidate produced degenerate weights")
    return Bandwidths(h=best_hh0[0], h0=best_hh0[1])


def select_bandwidths(
    pairs: EmbeddedPairs,
    mode: str = "cv",
    fixed: Bandwidths | None = None,
) -> Bandwidths:
    """Dispatch on the bandwidth mode used by the experiment drivers.

    mode "cv" runs cv_select over the default multiplier grid; "rot"
    returns the rule-of-thumb pair; "fixed" echoes the supplied pair.
    The scale plug-in is the sample standard deviation of the responses.
    """
    if mode == "fixed":
        if fixed is None:
            raise ValueError("mode 'fixed' requires a Bandwidths value")
        return fixed
    sigma_hat = float(np.std(pairs.responses, ddof=1))
    if sigma_hat <= 0.0:
        raise DegenerateData("responses have zero variance")
    n = pairs.count + pairs.p
    if mode == "rot":
        return rule_of_thumb(n, pairs.p, sigma_hat)
    if mode == "cv":
        return cv_select(pairs, default_grid(n, pairs.p, sigma_hat))
    raise ValueError(f"unknown bandwidth mode: {mode!r}")
