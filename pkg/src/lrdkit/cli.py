"""Command line interface.

Subcommands cover the full pipeline: ``synth`` writes fractional Gaussian
noise as a dated CSV, ``volatility`` turns OHLCV bars into log-variance
and log-volume series, ``chain`` stitches overlapping segments, ``lrdtest``
runs the long-range dependence tests plus the Hurst estimate, and
``xcorr`` scans cross-correlation coefficients with surrogate p-values.

Defaults can come from a ``key = value`` config file; explicit flags win.
Exit codes: 0 on success, 1 on an analysis or I/O error, 2 on bad usage.
All output is deterministic for a fixed seed, independent of --jobs.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

import numpy as np

from .dfa import dfa_hurst
from .errors import ToolkitError
from .finance import (
    TrendsSegment,
    chain_segments,
    format_float,
    garman_klass,
    log_transform,
    read_series_csv,
    write_series_csv,
)
from .lrd import bootstrap_lrd_tests
from .series import TimeSeries
from .surrogates import SurrogateConfig, average_coefficient, xcorr_significance
from .synth import FgnSpec, generate_fgn

__all__ = ["main", "build_parser"]

SCHEMA_VERSION = 1


class UsageError(Exception):
    """Bad flag or config combination, mapped to exit code 2."""


def _hurst_argument(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid hurst exponent {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(
            f"hurst exponent must lie strictly inside (0, 1), got {text}"
        )
    return value


def _length_argument(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid length {text!r}") from None
    if value < 16:
        raise argparse.ArgumentTypeError(f"length must be at least 16, got {text}")
    return value


def _date_argument(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid ISO date {text!r}") from None


def _grid_cast(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = (int(p) for p in parts)
    except ValueError:
        raise ValueError(f"grid fields must be integers, got {text!r}") from None
    if step < 1 or stop < start:
        raise ValueError(f"grid {text!r} is empty or decreasing")
    return np.arange(start, stop + 1, step)


def _grid_argument(text: str) -> np.ndarray:
    try:
        return _grid_cast(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _level_cast(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise ValueError(f"significance level must lie in (0, 1), got {text}")
    return value


def _level_argument(text: str) -> float:
    try:
        return _level_cast(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error)) from None


def _format_cast(text: str) -> str:
    value = text.strip().lower()
    if value not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {text!r}")
    return value


def _load_config(path: str | None, allowed: set[str]) -> dict[str, str]:
    if path is None:
        return {}
    config: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise UsageError(f"cannot read config file: {error}") from None
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{line_number}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if key not in allowed:
            raise UsageError(f"{path}:{line_number}: unknown key {key!r}")
        config[key] = value.strip()
    return config


def _resolve(args, config: dict[str, str], key: str, cast, fallback):
    value = getattr(args, key, None)
    if value is not None:
        return value
    raw = config.get(key)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as error:
        raise UsageError(f"config key {key!r}: {error}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json_document(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def cmd_lrdtest(args) -> int:
    allowed = {"seed", "surrogates", "block_size", "jobs", "format", "out"}
    config = _load_config(args.config, allowed)
    seed = _resolve(args, config, "seed", int, 0)
    surrogates = _resolve(args, config, "surrogates", int, 1000)
    block_size = _resolve(args, config, "block_size", int, 25)
    jobs = _resolve(args, config, "jobs", int, 1)
    out_format = _resolve(args, config, "format", _format_cast, "json")
    out = _resolve(args, config, "out", str, None)

    rows = []
    for path in args.inputs:
        series = read_series_csv(path, "trends")
        tests = bootstrap_lrd_tests(
            series,
            block_size=block_size,
            n_surrogates=surrogates,
            seed=seed,
            n_jobs=jobs,
        )
        hurst = dfa_hurst(series)
        if args.fluctuation_out is not None:
            fluct = hurst.fluctuation
            fluct_rows = [
                [str(int(s)), format_float(v)]
                for s, v in zip(fluct.scales, fluct.values)
            ]
            _emit(
                _csv_text(["scale", "fluctuation"], fluct_rows),
                f"{args.fluctuation_out}_{series.label}.csv",
            )
        rescaled_range = tests["rescaled_range"]
        rescaled_variance = tests["rescaled_variance"]
        rows.append(
            {
                "label": series.label,
                "n_obs": len(series),
                "rescaled_range_stat": rescaled_range.statistic,
                "rescaled_range_p": rescaled_range.p_value,
                "rescaled_variance_stat": rescaled_variance.statistic,
                "rescaled_variance_p": rescaled_variance.p_value,
                "bandwidth": rescaled_range.bandwidth,
                "hurst_dfa": hurst.h,
            }
        )

    if out_format == "json":
        document = {
            "schema_version": SCHEMA_VERSION,
            "command": "lrdtest",
            "seed": seed,
            "n_surrogates": surrogates,
            "block_size": block_size,
            "results": rows,
        }
        _emit(_json_document(document), out)
    else:
        header = [
            "label",
            "n_obs",
            "rescaled_range_stat",
            "rescaled_range_p",
            "rescaled_variance_stat",
            "rescaled_variance_p",
            "bandwidth",
            "hurst_dfa",
        ]
        csv_rows = [
            [
                row["label"],
                str(row["n_obs"]),
                format_float(row["rescaled_range_stat"]),
                format_float(row["rescaled_range_p"]),
                format_float(row["rescaled_variance_stat"]),
                format_float(row["rescaled_variance_p"]),
                str(row["bandwidth"]),
                format_float(row["hurst_dfa"]),
            ]
            for row in rows
        ]
        _emit(_csv_text(header, csv_rows), out)
    return 0


def _align_by_date(x: TimeSeries, y: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    if x.dates is None or y.dates is None:
        if len(x) != len(y):
            raise ToolkitError(
                "series without dates must have equal lengths to align"
            )
        return x, y
    common = sorted(set(x.dates) & set(y.dates))
    if len(common) < 2:
        raise ToolkitError("series share fewer than 2 dates")
    x_map = dict(zip(x.dates, x.values))
    y_map = dict(zip(y.dates, y.values))
    x_aligned = TimeSeries(
        np.asarray([x_map[d] for d in common]), label=x.label, dates=common
    )
    y_aligned = TimeSeries(
        np.asarray([y_map[d] for d in common]), label=y.label, dates=common
    )
    return x_aligned, y_aligned


def _sign_label(summaries: dict[str, object], level: float) -> str:
    significant = [
        (s.p_value, s.mean_rho)
        for s in summaries.values()
        if s.p_value is not None and s.p_value < level
    ]
    if not significant:
        return "0"
    _, mean_rho = min(significant)
    if mean_rho > 0:
        return "+"
    if mean_rho < 0:
        return "-"
    return "0"


def cmd_xcorr(args) -> int:
    allowed = {"seed", "surrogates", "level", "jobs", "grid", "format", "out"}
    config = _load_config(args.config, allowed)
    seed = _resolve(args, config, "seed", int, 0)
    surrogates = _resolve(args, config, "surrogates", int, 1000)
    level = _resolve(args, config, "level", _level_cast, 0.10)
    jobs = _resolve(args, config, "jobs", int, 1)
    grid = _resolve(args, config, "grid", _grid_cast, None)
    out_format = _resolve(args, config, "format", _format_cast, "json")
    out = _resolve(args, config, "out", str, None)

    methods = ("dcca", "dmca") if args.method == "both" else (args.method,)
    if grid is not None and len(methods) > 1:
        raise UsageError("--grid requires a single --method, not both")

    x_series = read_series_csv(args.x, "trends")
    y_series = read_series_csv(args.y, "trends")
    x_aligned, y_aligned = _align_by_date(x_series, y_series)

    surrogate_config = SurrogateConfig(
        n_surrogates=surrogates,
        seed=seed,
        significance_level=level,
        n_jobs=jobs,
    )
    reports = {}
    summaries = {}
    for method in methods:
        correlogram = xcorr_significance(
            x_aligned, y_aligned, method, scales=grid, config=surrogate_config
        )
        summary = average_coefficient(correlogram)
        masked = np.where(correlogram.p_values < level, correlogram.rho, 0.0)
        reports[method] = {
            "scales": [int(s) for s in correlogram.scales],
            "rho": [float(r) for r in correlogram.rho],
            "p_values": [float(p) for p in correlogram.p_values],
            "rho_masked": [float(r) for r in masked],
            "summary": {
                "mean_rho": float(summary.mean_rho),
                "std_rho": float(summary.std_rho),
                "p_value": float(summary.p_value),
                "significant": bool(summary.p_value < level),
            },
        }
        summaries[method] = summary

    if out_format == "json":
        document = {
            "schema_version": SCHEMA_VERSION,
            "command": "xcorr",
            "inputs": {"x": x_series.label, "y": y_series.label},
            "n_obs": len(x_aligned),
            "seed": seed,
            "n_surrogates": surrogates,
            "level": level,
            "results": reports,
            "sign": _sign_label(summaries, level),
        }
        _emit(_json_document(document), out)
    else:
        header = ["method", "scale", "rho", "p_value", "rho_masked"]
        csv_rows = [
            [
                method,
                str(scale),
                format_float(rho),
                format_float(p_value),
                format_float(masked),
            ]
            for method in methods
            for scale, rho, p_value, masked in zip(
                reports[method]["scales"],
                reports[method]["rho"],
                reports[method]["p_values"],
                reports[method]["rho_masked"],
            )
        ]
        _emit(_csv_text(header, csv_rows), out)
    return 0


def cmd_volatility(args) -> int:
    allowed = {"floor", "out"}
    config = _load_config(args.config, allowed)
    floor = _resolve(args, config, "floor", float, None)
    out = _resolve(args, config, "out", str, None)
    if out is None:
        raise UsageError("volatility requires --out PREFIX for its two files")

    bars = read_series_csv(args.input, "ohlcv")
    dates = [bar.date for bar in bars]
    stem = Path(args.input).stem
    variance = TimeSeries(
        np.asarray([garman_klass(bar) for bar in bars]),
        label=f"{stem}-variance",
        dates=dates,
    )
    volume = TimeSeries(
        np.asarray([bar.volume for bar in bars]),
        label=f"{stem}-volume",
        dates=dates,
    )
    log_variance = log_transform(variance, floor=floor)
    log_volume = log_transform(volume, floor=floor)

    variance_path = f"{out}_log_variance.csv"
    volume_path = f"{out}_log_volume.csv"
    write_series_csv(log_variance, variance_path)
    write_series_csv(log_volume, volume_path)

    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "volatility",
        "input": str(args.input),
        "n_bars": len(bars),
        "outputs": {"log_variance": variance_path, "log_volume": volume_path},
        "clamped": {
            "log_variance": log_variance.meta["clamped_indices"],
            "log_volume": log_volume.meta["clamped_indices"],
        },
        "floor": {
            "log_variance": log_variance.meta["floor"],
            "log_volume": log_volume.meta["floor"],
        },
    }
    sys.stdout.write(_json_document(document))
    return 0


def cmd_chain(args) -> int:
    allowed = {"overlap_days", "out"}
    config = _load_config(args.config, allowed)
    overlap_days = _resolve(args, config, "overlap_days", int, 1)
    out = _resolve(args, config, "out", str, None)

    segments = [
        TrendsSegment.from_timeseries(read_series_csv(path, "trends"))
        for path in args.segments
    ]
    chained = chain_segments(segments, overlap_days)
    lines = [",".join(("date", "value"))]
    lines.extend(
        f"{date.isoformat()},{format_float(value)}"
        for date, value in zip(chained.dates, chained.values)
    )
    _emit("\n".join(lines) + "\n", out)
    return 0


def cmd_synth(args) -> int:
    allowed = {"seed", "sigma", "label", "start_date", "out"}
    config = _load_config(args.config, allowed)
    seed = _resolve(args, config, "seed", int, 0)
    sigma = _resolve(args, config, "sigma", float, 1.0)
    label = _resolve(args, config, "label", str, None)
    start_date = _resolve(args, config, "start_date", dt.date.fromisoformat, dt.date(2004, 1, 1))
    out = _resolve(args, config, "out", str, None)

    spec = FgnSpec(h=args.hurst, length=args.length, seed=seed, sigma=sigma)
    series = generate_fgn(spec)
    dates = [start_date + dt.timedelta(days=i) for i in range(args.length)]
    dated = TimeSeries(
        series.values,
        label=label if label is not None else series.label,
        dates=dates,
    )
    lines = [",".join(("date", "value"))]
    lines.extend(
        f"{date.isoformat()},{format_float(value)}"
        for date, value in zip(dated.dates, dated.values)
    )
    _emit("\n".join(lines) + "\n", out)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value file with defaults")
    parser.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrdkit",
        description="Long-range dependence and scale-wise cross-correlation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lrdtest = sub.add_parser(
        "lrdtest",
        help="rescaled range and rescaled variance tests plus the Hurst estimate",
    )
    lrdtest.add_argument("inputs", nargs="+", help="date,value CSV files")
    lrdtest.add_argument("--seed", type=int)
    lrdtest.add_argument("--surrogates", type=_positive_int)
    lrdtest.add_argument("--block-size", type=_positive_int, dest="block_size")
    lrdtest.add_argument("--jobs", type=_positive_int)
    lrdtest.add_argument("--format", choices=("csv", "json"))
    lrdtest.add_argument(
        "--fluctuation-out",
        dest="fluctuation_out",
        help="prefix for per-series scale,fluctuation CSV files",
    )
    _add_common(lrdtest)
    lrdtest.set_defaults(handler=cmd_lrdtest)

    xcorr = sub.add_parser(
        "xcorr", help="scale-wise cross-correlation with surrogate p-values"
    )
    xcorr.add_argument("x", help="first date,value CSV file")
    xcorr.add_argument("y", help="second date,value CSV file")
    xcorr.add_argument("--method", choices=("dcca", "dmca", "both"), default="both")
    xcorr.add_argument("--grid", type=_grid_argument, help="scales as start:stop:step")
    xcorr.add_argument("--seed", type=int)
    xcorr.add_argument("--surrogates", type=_positive_int)
    xcorr.add_argument("--level", type=_level_argument)
    xcorr.add_argument("--jobs", type=_positive_int)
    xcorr.add_argument("--format", choices=("csv", "json"))
    _add_common(xcorr)
    xcorr.set_defaults(handler=cmd_xcorr)

    volatility = sub.add_parser(
        "volatility", help="Garman-Klass log-variance and log-volume series"
    )
    volatility.add_argument("input", help="date,open,high,low,close,volume CSV file")
    volatility.add_argument("--floor", type=float, help="explicit clamp floor")
    _add_common(volatility)
    volatility.set_defaults(handler=cmd_volatility)

    chain = sub.add_parser("chain", help="chain overlapping segments onto one level")
    chain.add_argument("segments", nargs="+", help="date,value CSV files in order")
    chain.add_argument("--overlap-days", type=_positive_int, dest="overlap_days")
    _add_common(chain)
    chain.set_defaults(handler=cmd_chain)

    synth = sub.add_parser("synth", help="write fractional Gaussian noise as CSV")
    synth.add_argument("--hurst", type=_hurst_argument, required=True)
    synth.add_argument("--length", type=_length_argument, required=True)
    synth.add_argument("--seed", type=int)
    synth.add_argument("--sigma", type=float)
    synth.add_argument("--label")
    synth.add_argument("--start-date", type=_date_argument, dest="start_date")
    _add_common(synth)
    synth.set_defaults(handler=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as error:
        print(f"usage error: {error}", file=sys.stderr)
        return 2
    except ToolkitError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
