"""Synthetic data generators and coverage/length evaluation harnesses.

Two order-1 maps drive the simulations:

    sine:    Y_{t+1} = sin(Y_t) + e_{t+1}
    logquad: Y_{t+1} = 0.8 * log(3 * Y_t^2 + 1) + e_{t+1}

with innovations either standard normal or Laplace rescaled to unit
variance. Coverage of an interval is scored against pseudo-futures drawn
from the exact conditional law at the observed last state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Union

import numpy as np
from joblib import Parallel, delayed
from threadpoolctl import threadpool_limits

from .bandwidth import select_bandwidths
from .bootstrap import BootstrapConfig, mf_interval
from .conformal import ConformalTrace, build_trial_grid, conformal_interval
from .errors import MarkovPIError
from .kernels import Bandwidths
from .series import (
    EmbeddedPairs,
    Method,
    NominalLevel,
    PredictionInterval,
    TimeSeriesSample,
    embed,
    last_predictor,
)

__all__ = [
    "Model",
    "Innovation",
    "DgpSpec",
    "CoverageReport",
    "RollingResult",
    "simulate",
    "oracle_futures",
    "cvr_len",
    "compute_interval",
    "monte_carlo",
    "rolling_eval",
]

# A "method" may be the public enum or a callable stub
# (series, pairs, bw, x_n, alpha) -> PredictionInterval used in tests.
MethodLike = Union[Method, str, Callable]


class Model(str, Enum):
    SINE = "sine"
    LOGQUAD = "logquad"


class Innovation(str, Enum):
    NORMAL = "normal"
    LAPLACE_UNIT_VAR = "laplace"


@dataclass(frozen=True)
class DgpSpec:
    """One simulated-data scenario: map, innovation law, length, burn-in, seed."""

    model: Model
    innovation: Innovation
    n: int
    warmup: int = 500
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "innovation", Innovation(self.innovation))
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def model_map(model: Model) -> Callable[[np.ndarray], np.ndarray]:
    if Model(model) is Model.SINE:
        return np.sin
    return lambda y: 0.8 * np.log(3.0 * np.asarray(y) ** 2 + 1.0)


def _draw_innovations(innovation: Innovation, size: int, rng: np.random.Generator):
    if Innovation(innovation) is Innovation.NORMAL:
        return rng.standard_normal(size)
    return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size)


def _iterate(model: Model, innovations: np.ndarray, y0: float = 0.0) -> np.ndarray:
    """Apply the recursion Y_{t+1} = g(Y_t) + e_{t+1} along given innovations."""
    g = model_map(model)
    out = np.empty(len(innovations))
    y = y0
    for t, e in enumerate(innovations):
        y = float(g(y)) + e
        out[t] = y
    return out


def simulate(spec: DgpSpec) -> TimeSeriesSample:
    """Generate n observations after discarding `warmup` burn-in steps from Y_0 = 0."""
    rng = np.random.default_rng(spec.seed)
    innov = _draw_innovations(spec.innovation, spec.warmup + spec.n, rng)
    path = _iterate(spec.model, innov, y0=0.0)
    return TimeSeriesSample(values=path[spec.warmup :])


def oracle_futures(spec: DgpSpec, x_n: float, S: int, seed: int) -> np.ndarray:
    """S i.i.d. draws of g(x_n) + e, the exact conditional law of the next value."""
    if S < 1:
        raise ValueError("S must be >= 1")
    rng = np.random.default_rng(seed)
    g = model_map(spec.model)
    return float(g(float(x_n))) + _draw_innovations(spec.innovation, S, rng)


def cvr_len(interval: PredictionInterval, futures) -> tuple[float, float]:
    """Fraction of futures inside the closed interval, and its length."""
    f = np.asarray(futures, dtype=np.float64)
    cvr = float(np.mean((f >= interval.lower) & (f <= interval.upper)))
    return cvr, interval.length


def compute_interval(
    series: TimeSeriesSample,
    p: int,
    method: MethodLike,
    alpha: NominalLevel,
    *,
    bandwidth_mode: str = "cv",
    fixed_bw: Bandwidths | None = None,
    B: int = 250,
    M: int = 100,
    G: int = 200,
    seed: int = 0,
) -> tuple[PredictionInterval, ConformalTrace | None]:
    """Fit on the series and produce one next-step interval by any method."""
    pairs = embed(series, p)
    bw = select_bandwidths(pairs, mode=bandwidth_mode, fixed=fixed_bw)
    x_n = last_predictor(series, p)
    if callable(method):
        return method(series, pairs, bw, x_n, alpha), None
    method = Method(method)
    if method in (Method.MDCP, Method.PMDCP):
        grid = build_trial_grid(series, G)
        return conformal_interval(
            pairs, bw, x_n, grid, alpha, predictive=method is Method.PMDCP
        )
    cfg = BootstrapConfig(B=B, M=M, seed=seed)
    result = mf_interval(pairs, bw, x_n, alpha, cfg, predictive=method is Method.PMF)
    return result.interval, None


@dataclass(frozen=True)
class CoverageReport:
    """Aggregated coverage/length metrics with per-replication detail.

    cvr_i/len_i have length R with NaN at failed replications; failures
    lists (replication index, simulation seed, message).
    """

    cvr_mean: float
    len_mean: float
    cvr_sd: float
    len_sd: float
    cvr_i: np.ndarray
    len_i: np.ndarray
    failures: tuple


@dataclass(frozen=True)
class RollingResult:
    """Rolling-origin evaluation summary plus per-step records.

    records holds (t, y_true, lower, upper, hit, length) per successful
    step, with t the 1-based time index of the predicted observation.
    """

    cvr: float
    len_mean: float
    len_sd: float
    records: tuple
    failures: tuple


def _mc_replication(spec, p, method, alpha, S, knobs, rep_seeds):
    sim_seed, fut_seed, method_seed = (int(s) for s in rep_seeds)
    with threadpool_limits(limits=1):
        try:
            rep_spec = replace(spec, seed=sim_seed)
            series = simulate(rep_spec)
            interval, _ = compute_interval(
                series, p, method, alpha, seed=method_seed, **knobs
            )
            futures = oracle_futures(spec, float(series.values[-1]), S, fut_seed)
            cvr, length = cvr_len(interval, futures)
            return (cvr, length, None)
        except MarkovPIError as exc:
            return (math.nan, math.nan, f"{type(exc).__name__}: {exc}")


def monte_carlo(
    spec: DgpSpec,
    method: MethodLike,
    alpha: NominalLevel,
    R: int,
    S: int,
    *,
    p: int = 1,
    bandwidth_mode: str = "cv",
    fixed_bw: Bandwidths | None = None,
    B: int = 250,
    M: int = 100,
    G: int = 200,
    n_jobs: int = 1,
) -> CoverageReport:
    """Replicate simulate -> fit -> interval -> oracle scoring R times.

    Per-replication seeds are derived from spec.seed by index, and the
    report is assembled by index, so the worker count never changes the
    result. Aborts if more than 1% of replications fail.
    """
    if R < 2:
        raise ValueError("R must be >= 2")
    seeds = np.random.SeedSequence(spec.seed).generate_state(3 * R, dtype=np.uint64)
    seeds = seeds.reshape(R, 3)
    knobs = dict(bandwidth_mode=bandwidth_mode, fixed_bw=fixed_bw, B=B, M=M, G=G)
    rows = Parallel(n_jobs=max(1, n_jobs))(
        delayed(_mc_replication)(spec, p, method, alpha, S, knobs, seeds[i])
        for i in range(R)
    )
    cvr_i = np.array([r[0] for r in rows])
    len_i = np.array([r[1] for r in rows])
    failures = tuple(
        (i, int(seeds[i, 0]), rows[i][2]) for i in range(R) if rows[i][2] is not None
    )
    if len(failures) > 0.01 * R:
        detail = "; ".join(f"rep {i} (seed {s}): {m}" for i, s, m in failures[:5])
        raise RuntimeError(
            f"{len(failures)} of {R} replications failed (>1%): {detail}"
        )
    ok = ~np.isnan(cvr_i)
    report = CoverageReport(
        cvr_mean=float(np.mean(cvr_i[ok])),
        len_mean=float(np.mean(len_i[ok])),
        cvr_sd=float(np.std(cvr_i[ok], ddof=1)),
        len_sd=float(np.std(len_i[ok], ddof=1)),
        cvr_i=cvr_i,
        len_i=len_i,
        failures=failures,
    )
    return report


def _rolling_step(values, t, w, p, method, alpha, S_unused, knobs, step_seed):
    # t is the 1-based time index of the target observation
    with threadpool_limits(limits=1):
        try:
            window = TimeSeriesSample(values=values[t - 1 - w : t - 1])
            interval, _ = compute_interval(
                window, p, method, alpha, seed=int(step_seed), **knobs
            )
            y_true = float(values[t - 1])
            hit = interval.lower <= y_true <= interval.upper
            return (t, y_true, interval.lower, interval.upper, bool(hit),
                    interval.length, None)
        except MarkovPIError as exc:
            return (t, float(values[t - 1]), math.nan, math.nan, False, math.nan,
                    f"{type(exc).__name__}: {exc}")


def rolling_eval(
    series: TimeSeriesSample,
    w: int,
    p: int,
    method: MethodLike,
    alpha: NominalLevel,
    *,
    bandwidth_mode: str = "cv",
    fixed_bw: Bandwidths | None = None,
    B: int = 250,
    M: int = 100,
    G: int = 200,
    seed: int = 0,
    n_jobs: int = 1,
) -> RollingResult:
    """Rolling one-step-ahead evaluation over t = w+1..n.

    Each step refits on the previous w observations and predicts the
    next one. Failed steps are recorded and excluded from the averages.
    """
    n = series.n
    if not (n > w >= p + 10):
        raise ValueError(f"need n > w >= p + 10, got n={n}, w={w}, p={p}")
    steps = list(range(w + 1, n + 1))
    step_seeds = np.random.SeedSequence(seed).generate_state(len(steps), dtype=np.uint64)
    knobs = dict(bandwidth_mode=bandwidth_mode, fixed_bw=fixed_bw, B=B, M=M, G=G)
    values = series.values
    rows = Parallel(n_jobs=max(1, n_jobs))(
        delayed(_rolling_step)(values, t, w, p, method, alpha, None, knobs, step_seeds[i])
        for i, t in enumerate(steps)
    )
    records = tuple(r[:6] for r in rows if r[6] is None)
    failures = tuple((r[0], r[6]) for r in rows if r[6] is not None)
    if not records:
        raise RuntimeError("every rolling step failed")
    hits = np.array([r[4] for r in records], dtype=np.float64)
    lengths = np.array([r[5] for r in records])
    len_sd = float(np.std(lengths, ddof=1)) if lengths.size > 1 else 0.0
    return RollingResult(
        cvr=float(hits.mean()),
        len_mean=float(lengths.mean()),
        len_sd=len_sd,
        records=records,
        failures=failures,
    )
