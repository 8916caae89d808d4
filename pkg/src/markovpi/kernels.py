"""Smoothing kernels and the product predictor weight.

Conventions
-----------
- w is the standard normal density.
- K is the standard normal CDF restricted to [-2, 2], renormalized so
  K(-2) = 0 and K(2) = 1 exactly; outside [-2, 2] it is constant.
- The predictor weight is a product of scaled w terms, one per lag
  coordinate, with a single shared bandwidth h.

Weights are accumulated in log space and exponentiated once per pair so
that products over many coordinates or distant points do not underflow
before they can be normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DimensionMismatch

__all__ = [
    "Bandwidths",
    "gaussian_density",
    "smooth_cdf_kernel",
    "product_weight",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_PHI_LO = float(ndtr(-2.0))
_PHI_SPAN = float(ndtr(2.0) - ndtr(-2.0))


@dataclass(frozen=True)
class Bandwidths:
    """Smoothing pair: h for the predictor kernel, h0 for the response CDF kernel."""

    h: float
    h0: float

    def __post_init__(self):
        h = float(self.h)
        h0 = float(self.h0)
        if not (np.isfinite(h) and h > 0.0):
            raise ValueError(f"h must be a positive finite real, got {self.h}")
        if not (np.isfinite(h0) and h0 > 0.0):
            raise ValueError(f"h0 must be a positive finite real, got {self.h0}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "h0", h0)


def gaussian_density(v):
    """Standard normal density w(v) = exp(-v^2/2) / sqrt(2*pi).

    Accepts a scalar or an ndarray; returns the same shape.
    """
    v = np.asarray(v, dtype=np.float64)
    out = np.exp(-0.5 * v * v) / _SQRT_2PI
    return float(out) if out.ndim == 0 else out


def smooth_cdf_kernel(z):
    """Renormalized truncated normal CDF on [-2, 2].

    Returns 0 for z <= -2, 1 for z >= 2, and
    (Phi(z) - Phi(-2)) / (Phi(2) - Phi(-2)) in between. Vectorized;
    the normal CDF is only evaluated strictly inside the support, which
    is what keeps the grid scans and bootstrap path generation cheap.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 0:
        zf = float(z)
        if zf <= -2.0:
            return 0.0
        if zf >= 2.0:
            return 1.0
        return min(max((float(ndtr(zf)) - _PHI_LO) / _PHI_SPAN, 0.0), 1.0)
    out = np.zeros(z.shape, dtype=np.float64)
    out[z >= 2.0] = 1.0
    inside = (z > -2.0) & (z < 2.0)
    if np.any(inside):
        zi = z[inside]
        out[inside] = np.clip((ndtr(zi) - _PHI_LO) / _PHI_SPAN, 0.0, 1.0)
    return out


def product_weight(x_i, x, h: float) -> float:
    """Product kernel weight between two predictor vectors.

    Computes prod_s (1/h) * w((x_i[s] - x[s]) / h) by summing log terms
    and exponentiating once.

    Raises
    ------
    DimensionMismatch
        If the two vectors differ in length.
    """
    a = np.atleast_1d(np.asarray(x_i, dtype=np.float64))
    b = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(
            f"predictor vectors disagree in shape: {a.shape} vs {b.shape}"
        )
    if not (np.isfinite(h) and h > 0.0):
        raise ValueError(f"h must be a positive finite real, got {h}")
    z = (a - b) / h
    log_w = -0.5 * float(z @ z) - a.size * (_LOG_SQRT_2PI + math.log(h))
    return math.exp(log_w)


def log_weight_matrix(xi: np.ndarray, x: np.ndarray, h: float) -> np.ndarray:
    """Pairwise log product weights; rows index xi, columns index x.

    xi has shape (N, p); x has shape (Q, p) or (p,). The (i, q) entry is
    log of product_weight(xi[i], x[q], h). Used by the estimators, which
    normalize per query column before exponentiating.
    """
    xi = np.asarray(xi, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    if xi.shape[1] != x.shape[1]:
        raise DimensionMismatch(
            f"predictor dimension mismatch: {xi.shape[1]} vs {x.shape[1]}"
        )
    p = xi.shape[1]
    # scale gaps by h before squaring so tiny h overflows to -inf log
    # weights instead of dividing by an underflowed h*h
    with np.errstate(over="ignore"):
        if p == 1:
            diff = (xi - x[:, 0][None, :]) / h  # (N, Q) broadcast over the single lag
            sq = diff * diff
        else:
            diff = (xi[:, None, :] - x[None, :, :]) / h
            sq = np.einsum("nqs,nqs->nq", diff, diff)
        out = -0.5 * sq - p * (_LOG_SQRT_2PI + math.log(h))
    return out[:, 0] if squeeze else out
