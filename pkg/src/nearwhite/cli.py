"""Command-line entry point.

Commands: ``analyze``, ``simulate``, ``calibrate``, ``report``.
Option values resolve as flags > ``--config`` JSON file > defaults.
Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classify import ClassifierConfig
from .errors import ConfigurationError, DataError
from .ingest import TimeSeries, TransformSpec, load_series, write_series_csv
from .nwn import BAND_MODES, CalibrationReport, mc_calibrate
from .report import SCHEMA_VERSION, analyze, read_report, write_analysis_csv, write_panels
from .spectral import DEFAULT_GRID_SIZE, FrequencyGrid
from .synth import ArmaSpec, RngSpec, gen_arma, gen_random_walk, gen_white_noise

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

DEFAULTS = {
    "analyze": {
        "column": "1",
        "period_column": None,
        "no_header": False,
        "delimiter": ",",
        "name": None,
        "transform": "logdiff",
        "scale": None,
        "grid": DEFAULT_GRID_SIZE,
        "alpha": 0.05,
        "band": "auto",
        "simultaneous": False,
        "calibration": None,
        "window": "raw",
        "width": None,
        "sign_dominance": 0.95,
        "min_sig": 0.10,
        "strong_sig": 0.50,
        "out": "json",
        "outfile": None,
    },
    "simulate": {
        "model": "wn",
        "ar": [],
        "ma": [],
        "sd": 1.0,
        "spec": None,
        "n": 200,
        "seed": 0,
        "stream": 0,
        "burn_in": None,
        "out": "-",
    },
    "calibrate": {
        "n": None,
        "reps": 10000,
        "alpha": 0.05,
        "grid": DEFAULT_GRID_SIZE,
        "seed": 0,
        "workers": 1,
        "out": "-",
    },
    "report": {"outdir": ".", "prefix": None},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", ",").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nearwhite", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--version", action="version", version=f"nearwhite {__version__} (report schema {SCHEMA_VERSION})"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    # Every option defaults to None so config-file values can fill the gaps.
    a = sub.add_parser("analyze", help="analyze one column of a CSV file")
    a.add_argument("csv", help="input CSV path")
    a.add_argument("--column", help="column name or zero-based index (default 1)")
    a.add_argument("--period-column", help="column holding period labels")
    a.add_argument("--no-header", action="store_const", const=True, help="file has no header row")
    a.add_argument("--delimiter")
    a.add_argument("--name", help="series name for the report")
    a.add_argument("--transform", choices=["none", "diff", "logdiff"])
    a.add_argument("--scale", type=float, help="transform multiplier (100 for logdiff, else 1)")
    a.add_argument("--grid", type=int, help=f"frequency subdivisions of [0, pi] (default {DEFAULT_GRID_SIZE})")
    a.add_argument("--alpha", type=float)
    a.add_argument("--band", choices=("auto",) + BAND_MODES)
    a.add_argument("--simultaneous", action="store_const", const=True, help="sup-based band (needs --calibration)")
    a.add_argument("--calibration", help="CalibrationReport JSON from `nearwhite calibrate`")
    a.add_argument("--window", choices=["raw", "bartlett"], help="lag window for the displayed spectrum")
    a.add_argument("--width", type=int, help="Bartlett window width")
    a.add_argument("--sign-dominance", type=float)
    a.add_argument("--min-sig", type=float)
    a.add_argument("--strong-sig", type=float)
    a.add_argument("--out", choices=["json", "csv"])
    a.add_argument("--outfile", help="report path (default <csv stem>.report.<out> in the working directory)")
    a.add_argument("--config", help="JSON file of option values")

    s = sub.add_parser("simulate", help="write a synthetic series as CSV")
    s.add_argument("--model", choices=["wn", "rw", "arma"])
    s.add_argument("--ar", type=_float_list, help="AR coefficients, comma-separated")
    s.add_argument("--ma", type=_float_list, help="MA coefficients, comma-separated")
    s.add_argument("--sd", type=float, help="innovation standard deviation (arma)")
    s.add_argument("--spec", help="ArmaSpec JSON file, overrides --ar/--ma/--sd")
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--stream", type=int)
    s.add_argument("--burn-in", type=int)
    s.add_argument("--out", help="output path, - for stdout")
    s.add_argument("--config", help="JSON file of option values")

    c = sub.add_parser("calibrate", help="Monte Carlo null distribution of xi")
    c.add_argument("--n", type=int, help="series length")
    c.add_argument("--reps", type=int)
    c.add_argument("--alpha", type=float)
    c.add_argument("--grid", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--workers", type=int, help="threads; output does not depend on this")
    c.add_argument("--out", help="output path, - for stdout")
    c.add_argument("--config", help="JSON file of option values")

    r = sub.add_parser("report", help="write plot-ready CSV panels from an analysis report")
    r.add_argument("report", help="AnalysisReport JSON")
    r.add_argument("--outdir")
    r.add_argument("--prefix", help="file prefix (default: report file stem)")
    r.add_argument("--config", help="JSON file of option values")
    return parser


def _resolve(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS[args.command])
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config file {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"config file {args.config} must hold a JSON object")
        unknown = set(loaded) - set(opts)
        if unknown:
            raise ConfigurationError(f"unknown keys in {args.config}: {sorted(unknown)}")
        opts.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None or key not in opts:
            opts[key] = value
    return opts


def _out_stream(path: str):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")


def cmd_analyze(opts: dict) -> int:
    alpha = opts["alpha"]
    if not (0 < alpha < 1):
        raise ConfigurationError("alpha must lie in (0,1)")
    config = ClassifierConfig(opts["sign_dominance"], opts["min_sig"], opts["strong_sig"])
    spec = TransformSpec(opts["transform"], opts["scale"])
    grid = FrequencyGrid.uniform(opts["grid"])

    calibration = None
    if opts["calibration"]:
        try:
            text = Path(opts["calibration"]).read_text("utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot read calibration file {opts['calibration']}: {exc}") from None
        calibration = CalibrationReport.from_json(text)

    column = opts["column"]
    try:
        raw = load_series(
            opts["csv"],
            column=column,
            header=not opts["no_header"],
            delimiter=opts["delimiter"],
            period_column=opts["period_column"],
            name=opts["name"],
        )
    except OSError as exc:
        raise DataError(f"cannot read {opts['csv']}: {exc}") from None

    if opts["band"] == "auto" and calibration is None:
        print("note: no calibration supplied, using the paper3 band (3 w (pi - w) / 4 pi^2)", file=sys.stderr)

    report = analyze(
        raw,
        spec,
        grid,
        alpha=alpha,
        band_mode=opts["band"],
        band_kind="simultaneous" if opts["simultaneous"] else "pointwise",
        calibration=calibration,
        config=config,
        window=opts["window"],
        width=opts["width"],
        source={"file": str(opts["csv"]), "column": column},
    )

    outfile = opts["outfile"] or f"{Path(opts['csv']).stem}.report.{opts['out']}"
    if opts["out"] == "json":
        Path(outfile).write_text(report.to_json(), encoding="utf-8")
    else:
        write_analysis_csv(report, outfile)
    print(f"{raw.name}: {report.verdict.summary()} [band {report.band.mode}/{report.band.kind}, alpha {alpha}]")
    return EXIT_OK


def cmd_simulate(opts: dict) -> int:
    n = opts["n"]
    if n is None or n < 1:
        raise ConfigurationError("--n must be a positive integer")
    rng = RngSpec(opts["seed"], opts["stream"])
    model = opts["model"]
    if model == "wn":
        series = gen_white_noise(n, rng)
    elif model == "rw":
        series = gen_random_walk(n, rng)
    else:
        if opts["spec"]:
            try:
                arma = ArmaSpec.from_json(Path(opts["spec"]).read_text("utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigurationError(f"cannot read ArmaSpec {opts['spec']}: {exc}") from None
        else:
            arma = ArmaSpec(tuple(opts["ar"]), tuple(opts["ma"]), opts["sd"])
        series = gen_arma(n, arma, rng, opts["burn_in"])
    stream = _out_stream(opts["out"])
    try:
        write_series_csv(TimeSeries(model, series.values), stream)
    finally:
        if stream is not sys.stdout:
            stream.close()
    return EXIT_OK


def cmd_calibrate(opts: dict) -> int:
    if opts["n"] is None:
        raise ConfigurationError("--n is required")
    report = mc_calibrate(
        opts["n"],
        FrequencyGrid.uniform(opts["grid"]),
        alpha=opts["alpha"],
        reps=opts["reps"],
        seed=opts["seed"],
        workers=opts["workers"],
    )
    text = report.to_json()
    summary = f"matched_mode={report.matched_mode} sup_critical={report.sup_critical:.6f}"
    if opts["out"] in (None, "-"):
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    else:
        Path(opts["out"]).write_text(text, encoding="utf-8")
        print(summary)
    return EXIT_OK


def cmd_report(opts: dict) -> int:
    data = read_report(opts["report"])
    prefix = opts["prefix"] or Path(opts["report"]).name.split(".")[0]
    paths = write_panels(data, opts["outdir"], prefix)
    for p in paths.values():
        print(p)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "calibrate": cmd_calibrate, "report": cmd_report}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](_resolve(args))
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, UnicodeDecodeError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
