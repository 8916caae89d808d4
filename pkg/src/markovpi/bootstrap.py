"""Model-free bootstrap prediction intervals (plain and predictive).

The sample's conditional ranks are resampled into synthetic rank paths;
each path is pushed through the inverse estimated conditional CDF to
regenerate a series, a future value is drawn the same way, the estimator
is refit on the regenerated pairs, and the spread of prediction roots
(bootstrap future minus refit point predictor) around the real point
predictor yields an equal-tailed interval.

All B replicates are generated in lockstep: at every time step a single
vectorized bisection inverts the estimated CDF for all replicates at
once. Replicate randomness comes from per-replicate substreams derived
from the root seed, so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cdf import invert_weighted, normalized_weight_columns, transform_ranks
from .errors import DegenerateWeights, InvalidProbability, WarmupTooShort
from .kernels import Bandwidths, log_weight_matrix
from .series import EmbeddedPairs, Method, NominalLevel, PredictionInterval

__all__ = [
    "BootstrapConfig",
    "BootstrapResult",
    "empirical_quantile",
    "mf_point_predictor",
    "mf_interval",
]

_REFIT_CHUNK_ELEMS = 4_000_000  # bound on count*count*chunk temporaries


@dataclass(frozen=True)
class BootstrapConfig:
    """Bootstrap knobs: replicate count B, warm-up length M, root seed."""

    B: int = 250
    M: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class BootstrapResult:
    """Point predictor, the B bootstrap roots, and the resulting interval."""

    point_predictor: float
    roots: np.ndarray
    interval: PredictionInterval


def empirical_quantile(values, a: float) -> float:
    """The ceil(B*a)-th order statistic (1-indexed) of the values."""
    vals = np.sort(np.asarray(values, dtype=np.float64))
    if vals.size == 0:
        raise ValueError("values must be nonempty")
    if not 0.0 < a < 1.0:
        raise InvalidProbability(f"quantile level must lie in (0, 1), got {a}")
    k = math.ceil(vals.size * a)
    return float(vals[k - 1])


def mf_point_predictor(pairs: EmbeddedPairs, bw: Bandwidths, x_n, ranks) -> float:
    """Mean of the inverse estimated CDF at x_n over the given ranks."""
    ranks = np.asarray(ranks, dtype=np.float64)
    if ranks.size == 0 or np.any(ranks < 0.0) or np.any(ranks > 1.0):
        raise InvalidProbability("ranks must be nonempty and lie in [0, 1]")
    x_n = np.atleast_1d(np.asarray(x_n, dtype=np.float64))
    omega, _ = normalized_weight_columns(pairs.predictors, x_n, bw.h)
    vals = invert_weighted(omega, pairs.responses, bw.h0, ranks)
    return float(vals.mean())


def _normalized_exp(logw: np.ndarray) -> np.ndarray:
    """Columnwise max-normalized exponentials; raises if a column is all -inf."""
    colmax = logw.max(axis=0)
    if not np.all(np.isfinite(colmax)):
        raise DegenerateWeights("kernel weights underflowed during path generation")
    return np.exp(logw - colmax[None, :])


def _refit_means(
    path: np.ndarray, v_refit: np.ndarray, x_n: np.ndarray, p: int, bw: Bandwidths
) -> np.ndarray:
    """Refit point predictors: for each replicate, embed its generated
    series, weight the refit mixture at x_n, and average the inverse CDF
    over that replicate's resampled ranks."""
    n_boot, n = path.shape
    count = n - p
    # lag s of the embedded predictors, one (replicates, count) sheet per lag
    lags = [path[:, p - 1 - s : n - 1 - s] for s in range(p)]
    sq = np.zeros((n_boot, count))
    for s in range(p):
        d = (lags[s] - x_n[s]) / bw.h
        sq += d * d
    logw = -0.5 * sq  # per-column constants cancel after normalizing
    rowmax = logw.max(axis=1)
    if not np.all(np.isfinite(rowmax)):
        raise DegenerateWeights("refit weights underflowed")
    omega = np.exp(logw - rowmax[:, None])  # (replicates, count)
    responses = path[:, p:]

    means = np.empty(n_boot)
    chunk = max(1, _REFIT_CHUNK_ELEMS // (count * count))
    for start in range(0, n_boot, chunk):
        stop = min(start + chunk, n_boot)
        om = omega[start:stop].T[:, None, :]        # (count, 1, C)
        resp = responses[start:stop].T[:, None, :]  # (count, 1, C)
        targets = v_refit[start:stop].T             # (count targets, C)
        inverted = invert_weighted(om, resp, bw.h0, targets)
        means[start:stop] = inverted.mean(axis=0)
    return means


def mf_interval(
    pairs: EmbeddedPairs,
    bw: Bandwidths,
    x_n,
    alpha: NominalLevel,
    cfg: BootstrapConfig,
    predictive: bool = False,
) -> BootstrapResult:
    """Equal-tailed bootstrap prediction interval for the next observation.

    predictive=False resamples plain conditional ranks (MF); with
    predictive=True the leave-one-out ranks are used throughout (PMF).

    Returns a BootstrapResult whose interval is
    [point + q(alpha/2), point + q(1 - alpha/2)] over the B roots.
    """
    p = pairs.p
    if cfg.M < p:
        raise WarmupTooShort(f"warm-up M={cfg.M} shorter than order p={p}")
    x_n = np.atleast_1d(np.asarray(x_n, dtype=np.float64))
    count = pairs.count
    n = count + p
    resp = pairs.responses

    ranks = transform_ranks(pairs, bw, loo=predictive)
    point = mf_point_predictor(pairs, bw, x_n, ranks)
    omega_xn, _ = normalized_weight_columns(pairs.predictors, x_n, bw.h)

    # rank draws cover times -M+p .. n+1; the initial p path values come
    # from a uniformly drawn consecutive block of the observed series
    n_draws = cfg.M + count + 2
    state_pool = np.vstack([pairs.predictors, x_n[None, :]])
    idx = np.empty((cfg.B, n_draws), dtype=np.intp)
    init = np.empty(cfg.B, dtype=np.intp)
    for b, child in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.B)):
        rng = np.random.default_rng(child)
        idx[b] = rng.integers(0, count, size=n_draws)
        init[b] = rng.integers(0, count + 1)
    v_star = ranks[idx]          # (B, n_draws)
    state = state_pool[init]     # (B, p)

    keep_from = cfg.M - p + 1    # step index of time t = 1
    path = np.empty((cfg.B, n))
    for j in range(n_draws - 1):
        logw = log_weight_matrix(pairs.predictors, state, bw.h)
        om = _normalized_exp(logw)
        y_new = invert_weighted(om, resp, bw.h0, v_star[:, j])
        if j >= keep_from:
            path[:, j - keep_from] = y_new
        if p == 1:
            state = y_new[:, None]
        else:
            state = np.column_stack([y_new, state[:, : p - 1]])

    future = invert_weighted(omega_xn, resp, bw.h0, v_star[:, -1])
    v_refit = v_star[:, cfg.M + 1 : cfg.M + 1 + count]
    boot_means = _refit_means(path, v_refit, x_n, p, bw)
    roots = future - boot_means

    a = alpha.alpha
    interval = PredictionInterval(
        lower=point + empirical_quantile(roots, a / 2.0),
        upper=point + empirical_quantile(roots, 1.0 - a / 2.0),
        alpha=alpha,
        method=Method.PMF if predictive else Method.MF,
    )
    roots = roots.copy()
    roots.setflags(write=False)
    return BootstrapResult(point_predictor=point, roots=roots, interval=interval)
