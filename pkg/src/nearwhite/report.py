"""Analysis pipeline, report serialization and plot-data panels."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .classify import ClassifierConfig, PatternVerdict, classify
from .errors import ConfigurationError, DataError
from .ingest import (
    MIN_SPECTRAL_LENGTH,
    SummaryStats,
    TimeSeries,
    TransformSpec,
    standardize,
    summary_stats,
    transform,
)
from .nwn import CalibrationReport, _check_calibration, ConfidenceBand, XiCurve, confidence_band, sup_statistic, xi_statistic
from .spectral import FrequencyGrid, SpectrumEstimate, autocovariances, integral_spectrum, spectrum

SCHEMA_VERSION = "1.0"
TOOL_NAME = "nearwhite"


def load_schema(name: str = "analysis_report") -> dict:
    text = resources.files("nearwhite").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class AnalysisReport:
    """Everything one analysis produces: series, xi with band, spectrum, verdict."""

    input: dict
    series: TimeSeries
    standardized: np.ndarray
    source_mean: float
    source_std: float
    summary: SummaryStats
    grid: FrequencyGrid
    spectrum: SpectrumEstimate
    integral: np.ndarray
    xi: XiCurve
    band: ConfidenceBand
    verdict: PatternVerdict
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "kind": "analysis_report",
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": TOOL_NAME, "version": __version__},
            "input": self.input,
            "series": {
                "name": self.series.name,
                "N": self.series.N,
                "period": list(self.series.period) if self.series.period is not None else None,
                "values": self.series.values.tolist(),
                "standardized": self.standardized.tolist(),
                "source_mean": self.source_mean,
                "source_std": self.source_std,
            },
            "summary": self.summary.to_dict(),
            "grid": {"M": self.grid.M, "omega": self.grid.points.tolist()},
            "spectrum": {
                "window": self.spectrum.window,
                "width": self.spectrum.width,
                "values": self.spectrum.values.tolist(),
            },
            "integral_spectrum": {"values": self.integral.tolist()},
            "xi": {"values": self.xi.xi.tolist(), "sup": sup_statistic(self.xi)},
            "band": {
                "mode": self.band.mode,
                "kind": self.band.kind,
                "alpha": self.band.alpha,
                "upper": self.band.upper.tolist(),
                "lower": self.band.lower.tolist(),
            },
            "verdict": self.verdict.to_dict(),
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


def resolve_band_mode(requested: str, calibration: CalibrationReport | None) -> tuple[str, str]:
    """Turn ``auto`` into a concrete mode; returns ``(mode, source)``."""
    if requested != "auto":
        return requested, "flag"
    if calibration is None:
        return "paper3", "default"
    if calibration.matched_mode == "neither":
        return "montecarlo", "calibration"
    return calibration.matched_mode, "calibration"


def analyze(
    raw: TimeSeries,
    transform_spec: TransformSpec | None = None,
    grid: FrequencyGrid | None = None,
    alpha: float = 0.05,
    band_mode: str = "auto",
    band_kind: str = "pointwise",
    calibration: CalibrationReport | None = None,
    config: ClassifierConfig | None = None,
    window: str = "raw",
    width: int | None = None,
    source: dict | None = None,
) -> AnalysisReport:
    """Run transform -> standardize -> spectra -> xi -> band -> verdict."""
    transform_spec = transform_spec or TransformSpec("none")
    grid = grid or FrequencyGrid.uniform()
    config = config or ClassifierConfig()

    growth = transform(raw, transform_spec)
    if growth.N < MIN_SPECTRAL_LENGTH:
        raise DataError(f"spectral analysis needs at least {MIN_SPECTRAL_LENGTH} observations, got {growth.N}")
    stats = summary_stats(growth)
    z = standardize(growth)
    acov = autocovariances(z)
    if window == "bartlett" and width is None:
        width = max(2, int(round(2 * np.sqrt(z.N))))
    display = spectrum(acov, grid, window, width)
    F = integral_spectrum(acov, grid)

    if calibration is not None:
        # Also for analytic bands: matched_mode is only meaningful for this setup.
        _check_calibration(calibration, grid, alpha, z.N)
    mode, mode_source = resolve_band_mode(band_mode, calibration)
    xi = xi_statistic(F, mode)
    band = confidence_band(grid, alpha, mode, calibration, band_kind, N=z.N)
    verdict = classify(xi, band, config)

    provenance = {"band_mode_source": mode_source, "calibration": None}
    if calibration is not None:
        provenance["calibration"] = {
            "N": calibration.N,
            "reps": calibration.reps,
            "seed": calibration.seed,
            "alpha": calibration.alpha,
            "matched_mode": calibration.matched_mode,
            "sup_critical": calibration.sup_critical,
            "rng_algorithm": calibration.rng_algorithm,
        }
    descriptor = dict(source or {})
    descriptor["transform"] = {"kind": transform_spec.kind, "scale": transform_spec.scale}
    return AnalysisReport(
        input=descriptor,
        series=growth,
        standardized=z.values,
        source_mean=z.source_mean,
        source_std=z.source_std,
        summary=stats,
        grid=grid,
        spectrum=display,
        integral=F.values,
        xi=xi,
        band=band,
        verdict=verdict,
        provenance=provenance,
    )


def read_report(path) -> dict:
    """Load and schema-validate an analysis report; raises DataError if unusable."""
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read report {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"report {path} is not valid JSON: {exc}") from None
    try:
        jsonschema.validate(data, load_schema("analysis_report"))
    except jsonschema.ValidationError as exc:
        raise DataError(f"report {path} does not match the schema: {exc.message}") from None
    n = len(data["grid"]["omega"])
    for key in ("spectrum", "integral_spectrum", "xi"):
        if len(data[key]["values"]) != n:
            raise DataError(f"report {path}: {key} has {len(data[key]['values'])} values for {n} frequencies")
    if len(data["band"]["upper"]) != n or len(data["band"]["lower"]) != n:
        raise DataError(f"report {path}: band length does not match the grid")
    return data


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def write_panels(data: dict, outdir, prefix: str = "report") -> dict[str, Path]:
    """Write the series, xi-with-band and spectrum panels as aligned CSVs."""
    outdir = Path(outdir)
    if outdir.exists() and not outdir.is_dir():
        raise ConfigurationError(f"{outdir} is not a directory")
    os.makedirs(outdir, exist_ok=True)

    series = data["series"]
    labels = series["period"] or [str(i + 1) for i in range(len(series["values"]))]
    omega = [float(w) for w in data["grid"]["omega"]]
    paths = {
        "series": outdir / f"{prefix}_series.csv",
        "xi": outdir / f"{prefix}_xi.csv",
        "spectrum": outdir / f"{prefix}_spectrum.csv",
    }
    _write_rows(
        paths["series"],
        ["t", "value", "standardized"],
        zip(labels, map(float, series["values"]), map(float, series["standardized"])),
    )
    _write_rows(
        paths["xi"],
        ["omega", "xi", "upper", "lower"],
        zip(omega, map(float, data["xi"]["values"]), map(float, data["band"]["upper"]), map(float, data["band"]["lower"])),
    )
    _write_rows(
        paths["spectrum"],
        ["omega", "spectrum", "integral_spectrum"],
        zip(omega, map(float, data["spectrum"]["values"]), map(float, data["integral_spectrum"]["values"])),
    )
    return paths


def write_analysis_csv(report: AnalysisReport, dest) -> None:
    """Flat per-frequency table for ``analyze --out csv``."""
    rows = zip(
        map(float, report.grid.points),
        map(float, report.spectrum.values),
        map(float, report.integral),
        map(float, report.xi.xi),
        map(float, report.band.upper),
        map(float, report.band.lower),
    )
    _write_rows(Path(dest), ["omega", "spectrum", "integral_spectrum", "xi", "upper", "lower"], rows)
