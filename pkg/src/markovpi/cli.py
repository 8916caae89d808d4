"""Command-line surface: simulate, predict, evaluate, bench.

All outputs are CSV with `#`-prefixed metadata comments echoing the fully
resolved run configuration, so every artifact can be re-derived from its
own header plus the input file. Exit codes: 0 success, 2 usage, 3 data,
4 numerical, 5 internal.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields

from .dgp_eval import (
    DgpSpec,
    Innovation,
    Model,
    compute_interval,
    monte_carlo,
    rolling_eval,
    simulate,
)
from .errors import (
    DegenerateData,
    DegenerateWeights,
    DimensionMismatch,
    EmptyAcceptedSet,
    EmptyFile,
    InvalidIndex,
    InvalidProbability,
    MarkovPIError,
    NonFiniteInput,
    OrderTooLarge,
    ParseError,
    WarmupTooShort,
)
from .kernels import Bandwidths
from .series import Method, NominalLevel, TimeSeriesSample

__all__ = ["RunConfig", "UsageError", "parse_config", "read_series", "run", "main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4
EXIT_INTERNAL = 5


class UsageError(Exception):
    """Bad flags, bad config-file keys, or invalid option values."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one CLI run.

    `threads` caps worker counts but never affects output bytes, so it is
    the one field excluded from the echoed header.
    """

    command: str
    method: str
    model: str
    innovation: str
    n: int
    p: int
    alpha: float
    B: int
    M: int
    G: int
    R: int
    S: int
    w: int
    seed: int
    warmup: int
    bandwidth_mode: str
    h: float | None
    h0: float | None
    input_path: str | None
    output_path: str | None
    trace_path: str | None
    threads: int


_DEFAULTS = {
    "method": "MDCP",
    "model": "sine",
    "innovation": "normal",
    "n": 100,
    "p": 1,
    "alpha": 0.05,
    "B": 250,
    "M": 100,
    "G": 200,
    "R": 200,
    "S": 1000,
    "w": 100,
    "seed": 42,
    "warmup": 500,
    "bandwidth_mode": "cv",
    "h": None,
    "h0": None,
    "input_path": None,
    "output_path": None,
    "trace_path": None,
    "threads": 1,
}

_INT_KEYS = {"n", "p", "B", "M", "G", "R", "S", "w", "seed", "warmup", "threads"}
_POSITIVE_KEYS = {"n", "p", "B", "M", "G", "R", "S", "w", "threads"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="markovpi", add_help=True, allow_abbrev=False)
    parser.add_argument("command", choices=["simulate", "predict", "evaluate", "bench"])
    parser.add_argument("--config", default=None, help="JSON file with option values")
    parser.add_argument("--method", default=None)
    parser.add_argument("--model", default=None)
    parser.add_argument("--innovation", default=None)
    parser.add_argument("--n", default=None, type=int)
    parser.add_argument("--p", default=None, type=int)
    parser.add_argument("--alpha", default=None, type=float)
    parser.add_argument("--B", default=None, type=int)
    parser.add_argument("--M", default=None, type=int)
    parser.add_argument("--G", default=None, type=int)
    parser.add_argument("--R", default=None, type=int)
    parser.add_argument("--S", default=None, type=int)
    parser.add_argument("--w", default=None, type=int)
    parser.add_argument("--seed", default=None, type=int)
    parser.add_argument("--warmup", default=None, type=int)
    parser.add_argument("--bandwidth-mode", dest="bandwidth_mode", default=None)
    parser.add_argument("--h", default=None, type=float)
    parser.add_argument("--h0", default=None, type=float)
    parser.add_argument("--input", dest="input_path", default=None)
    parser.add_argument("--output", dest="output_path", default=None)
    parser.add_argument("--trace", dest="trace_path", default=None)
    parser.add_argument("--threads", default=None, type=int)
    return parser


def parse_config(argv=None) -> RunConfig:
    """Resolve flags over config-file keys over documented defaults."""
    ns = _build_parser().parse_args(argv)
    merged = dict(_DEFAULTS)
    if ns.config is not None:
        try:
            with open(ns.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must contain a JSON object")
        for key, value in loaded.items():
            if key not in _DEFAULTS:
                raise UsageError(f"unknown config key: {key}")
            merged[key] = value
    for key in _DEFAULTS:
        flag_value = getattr(ns, key)
        if flag_value is not None:
            merged[key] = flag_value
    return _validate(ns.command, merged)


def _validate(command: str, merged: dict) -> RunConfig:
    for key in _INT_KEYS:
        value = merged[key]
        if not isinstance(value, int) or isinstance(value, bool):
            raise UsageError(f"{key} must be an integer, got {value!r}")
    for key in _POSITIVE_KEYS:
        if merged[key] < 1:
            raise UsageError(f"{key} must be positive, got {merged[key]}")
    if merged["seed"] < 0:
        raise UsageError(f"seed must be nonnegative, got {merged['seed']}")
    if merged["warmup"] < 0:
        raise UsageError(f"warmup must be nonnegative, got {merged['warmup']}")
    alpha = merged["alpha"]
    if not isinstance(alpha, (int, float)) or not 0.0 < float(alpha) < 1.0:
        raise UsageError(f"alpha must be in (0, 1), got {alpha!r}")
    merged["alpha"] = float(alpha)

    method = str(merged["method"]).upper()
    if method == "ALL" and command == "bench":
        merged["method"] = "ALL"
    else:
        try:
            merged["method"] = Method(method).value
        except ValueError:
            raise UsageError(f"unknown method: {merged['method']}") from None

    try:
        merged["model"] = Model(str(merged["model"]).lower()).value
        merged["innovation"] = Innovation(str(merged["innovation"]).lower()).value
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    mode = str(merged["bandwidth_mode"]).lower()
    if mode not in ("cv", "rot", "fixed"):
        raise UsageError(f"bandwidth_mode must be cv, rot, or fixed, got {mode!r}")
    merged["bandwidth_mode"] = mode
    if mode == "fixed":
        if merged["h"] is None or merged["h0"] is None:
            raise UsageError("bandwidth_mode=fixed requires --h and --h0")
        if not (float(merged["h"]) > 0 and float(merged["h0"]) > 0):
            raise UsageError("fixed bandwidths must be positive")
        merged["h"] = float(merged["h"])
        merged["h0"] = float(merged["h0"])

    if command in ("predict", "bench") and merged["input_path"] is None:
        raise UsageError(f"{command} requires --input")
    if command in ("simulate", "evaluate") and merged["n"] < 3:
        raise UsageError(f"n must be >= 3, got {merged['n']}")
    if command == "evaluate" and merged["R"] < 2:
        raise UsageError(f"R must be >= 2, got {merged['R']}")
    return RunConfig(command=command, **merged)


def read_series(path: str) -> TimeSeriesSample:
    """Parse a single-column CSV of reals; a leading header row "y" is tolerated.

    Blank lines and `#` comment lines are skipped. A non-numeric cell
    raises ParseError carrying its 1-based line number.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    values = []
    for lineno, line in enumerate(raw, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if not values and lineno == _first_content_line(raw) and text.lower() == "y":
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise ParseError(f"not a number: {text!r}", line=lineno) from None
    if not values:
        raise EmptyFile(f"no data rows in {path}")
    return TimeSeriesSample(values=values)


def _first_content_line(raw) -> int:
    for lineno, line in enumerate(raw, start=1):
        text = line.strip()
        if text and not text.startswith("#"):
            return lineno
    return -1


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _config_header(cfg: RunConfig) -> list[str]:
    lines = []
    for f in fields(RunConfig):
        if f.name == "threads":
            continue
        lines.append(f"# {f.name}={_fmt(getattr(cfg, f.name))}")
    return lines


def _emit(lines: list[str], path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _fixed_bw(cfg: RunConfig) -> Bandwidths | None:
    if cfg.bandwidth_mode == "fixed":
        return Bandwidths(h=cfg.h, h0=cfg.h0)
    return None


def _knobs(cfg: RunConfig) -> dict:
    return dict(
        bandwidth_mode=cfg.bandwidth_mode,
        fixed_bw=_fixed_bw(cfg),
        B=cfg.B,
        M=cfg.M,
        G=cfg.G,
    )


def _run_simulate(cfg: RunConfig) -> int:
    spec = DgpSpec(
        model=cfg.model, innovation=cfg.innovation, n=cfg.n,
        warmup=cfg.warmup, seed=cfg.seed,
    )
    sample = simulate(spec)
    lines = _config_header(cfg) + ["y"] + [_fmt(float(v)) for v in sample.values]
    _emit(lines, cfg.output_path)
    return EXIT_OK


def _run_predict(cfg: RunConfig) -> int:
    series = read_series(cfg.input_path)
    alpha = NominalLevel(cfg.alpha)
    interval, trace = compute_interval(
        series, cfg.p, Method(cfg.method), alpha, seed=cfg.seed, **_knobs(cfg)
    )
    lines = _config_header(cfg)
    lines.append("method,alpha,lower,upper")
    lines.append(
        f"{interval.method.value},{_fmt(cfg.alpha)},"
        f"{_fmt(interval.lower)},{_fmt(interval.upper)}"
    )
    _emit(lines, cfg.output_path)
    if trace is not None and cfg.trace_path is not None:
        tlines = _config_header(cfg)
        tlines.append("y,pvalue,accepted")
        for y, pv, acc in zip(trace.ys, trace.pvalues, trace.accepted):
            tlines.append(f"{_fmt(float(y))},{_fmt(float(pv))},{int(acc)}")
        _emit(tlines, cfg.trace_path)
    return EXIT_OK


def _run_evaluate(cfg: RunConfig) -> int:
    spec = DgpSpec(
        model=cfg.model, innovation=cfg.innovation, n=cfg.n,
        warmup=cfg.warmup, seed=cfg.seed,
    )
    report = monte_carlo(
        spec, Method(cfg.method), NominalLevel(cfg.alpha), cfg.R, cfg.S,
        p=cfg.p, n_jobs=cfg.threads, **_knobs(cfg),
    )
    lines = _config_header(cfg)
    lines.append(f"# failures={len(report.failures)}")
    lines.append("rep,cvr_i,len_i")
    for i in range(cfg.R):
        lines.append(
            f"{i},{_fmt(float(report.cvr_i[i]))},{_fmt(float(report.len_i[i]))}"
        )
    lines.append("CVR,LEN,CVR Sd,LEN Sd")
    lines.append(
        f"{_fmt(report.cvr_mean)},{_fmt(report.len_mean)},"
        f"{_fmt(report.cvr_sd)},{_fmt(report.len_sd)}"
    )
    _emit(lines, cfg.output_path)
    return EXIT_OK


def _run_bench(cfg: RunConfig) -> int:
    series = read_series(cfg.input_path)
    if not (series.n > cfg.w >= cfg.p + 10):
        raise UsageError(
            f"bench needs n > w >= p + 10, got n={series.n}, w={cfg.w}, p={cfg.p}"
        )
    alpha = NominalLevel(cfg.alpha)
    if cfg.method == "ALL":
        methods = [Method.MF, Method.PMF, Method.MDCP, Method.PMDCP]
    else:
        methods = [Method(cfg.method)]
    lines = _config_header(cfg)
    record_lines = ["method,t,y,lower,upper,hit,length"]
    summary_lines = ["method,CVR,LEN,LEN Sd"]
    for method in methods:
        result = rolling_eval(
            series, cfg.w, cfg.p, method, alpha,
            seed=cfg.seed, n_jobs=cfg.threads, **_knobs(cfg),
        )
        lines.append(f"# failures_{method.value}={len(result.failures)}")
        for t, y, lo, hi, hit, length in result.records:
            record_lines.append(
                f"{method.value},{t},{_fmt(float(y))},{_fmt(float(lo))},"
                f"{_fmt(float(hi))},{int(hit)},{_fmt(float(length))}"
            )
        summary_lines.append(
            f"{method.value},{_fmt(result.cvr)},{_fmt(result.len_mean)},"
            f"{_fmt(result.len_sd)}"
        )
    _emit(lines + record_lines + summary_lines, cfg.output_path)
    return EXIT_OK


def run(cfg: RunConfig) -> int:
    """Dispatch one resolved configuration; returns the process exit code."""
    if cfg.command == "simulate":
        return _run_simulate(cfg)
    if cfg.command == "predict":
        return _run_predict(cfg)
    if cfg.command == "evaluate":
        return _run_evaluate(cfg)
    if cfg.command == "bench":
        return _run_bench(cfg)
    raise UsageError(f"unknown command: {cfg.command}")


_USAGE_ERRORS = (UsageError, InvalidIndex, InvalidProbability, WarmupTooShort)
_DATA_ERRORS = (
    ParseError,
    EmptyFile,
    OrderTooLarge,
    NonFiniteInput,
    DimensionMismatch,
    DegenerateData,
    OSError,
)
_NUMERICAL_ERRORS = (DegenerateWeights, EmptyAcceptedSet)


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except _USAGE_ERRORS as exc:
        code = EXIT_USAGE
        message = str(exc)
    except _DATA_ERRORS as exc:
        code = EXIT_DATA
        message = str(exc)
    except _NUMERICAL_ERRORS as exc:
        code = EXIT_NUMERICAL
        message = str(exc)
    except (MarkovPIError, ValueError, RuntimeError) as exc:
        code = EXIT_INTERNAL
        message = str(exc)
    print(f"ERROR {code}: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
