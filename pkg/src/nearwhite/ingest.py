"""Loading, transforming and standardizing observed series."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateInputError,
    DomainError,
    ParseError,
    TooShortError,
)

TRANSFORM_KINDS = ("none", "diff", "logdiff")

# Minimum lengths
MIN_TRANSFORM_LENGTH = 2
MIN_SPECTRAL_LENGTH = 16


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real observations with an optional label per observation."""

    name: str
    values: np.ndarray
    period: tuple[str, ...] | None = None

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1:
            raise ConfigurationError("series values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise DomainError(f"non-finite value at index {bad}")
        object.__setattr__(self, "values", values)
        if self.period is not None:
            period = tuple(str(p) for p in self.period)
            if len(period) != len(values):
                raise ConfigurationError(
                    f"{len(period)} period labels for {len(values)} observations"
                )
            object.__setattr__(self, "period", period)

    @property
    def N(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class TransformSpec:
    """Which growth transform to apply, and the multiplier.

    ``scale`` defaults to 100 for ``logdiff`` (percent growth per period)
    and to 1 otherwise.
    """

    kind: str = "logdiff"
    scale: float | None = None

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ConfigurationError(
                f"transform must be one of {', '.join(TRANSFORM_KINDS)}, got {self.kind!r}"
            )
        if self.scale is None:
            object.__setattr__(self, "scale", 100.0 if self.kind == "logdiff" else 1.0)
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ConfigurationError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class StandardizedSeries:
    """Zero-mean, unit-variance (divisor N) copy of a series.

    ``source_mean`` and ``source_std`` hold the location and scale that
    were removed, so the total power ``sum(values**2)`` equals ``N``.
    """

    values: np.ndarray
    source_mean: float = 0.0
    source_std: float = 1.0
    name: str = ""

    def __post_init__(self):
        values = _frozen_array(self.values)
        object.__setattr__(self, "values", values)
        n = len(values)
        if n < MIN_TRANSFORM_LENGTH:
            raise TooShortError(f"need at least {MIN_TRANSFORM_LENGTH} observations, got {n}")
        if abs(values.mean()) >= 1e-10 or abs(values.var() - 1.0) >= 1e-10:
            raise DegenerateInputError("values are not standardized (mean 0, variance 1)")

    @property
    def N(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    acc: float
    # "acc" is read as the mean first difference of the growth series.
    notes: dict = field(
        default_factory=lambda: {
            "std": "sample standard deviation, divisor N-1",
            "acc": "mean of first differences of the growth series (interpretation)",
        }
    )

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "acc": self.acc, "notes": dict(self.notes)}


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"), newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def load_series(
    source,
    column: str | int = 1,
    header: bool = True,
    delimiter: str = ",",
    period_column: str | int | None = None,
    name: str | None = None,
) -> TimeSeries:
    """Read one numeric column of a delimited file into a :class:`TimeSeries`.

    Parameters
    ----------
    source : path, bytes, or text/binary stream
        Delimited text, one observation per row in chronological order.
    column : str or int
        Column name (requires ``header``) or zero-based index.
    header : bool
        Whether the first row holds column names.
    delimiter : str
        Field separator.
    period_column : str or int, optional
        Column holding period labels (e.g. ``1955Q2``).
    name : str, optional
        Series name; defaults to the column header or ``column<i>``.

    Raises
    ------
    ConfigurationError
        The requested column does not exist.
    ParseError
        A cell in the target column is empty or not a real number.
    TooShortError
        Fewer than two observations.
    """
    stream, owned = _open_text(source)
    try:
        rows = [r for r in csv.reader(stream, delimiter=delimiter) if r]
    finally:
        if owned:
            stream.close()

    names = None
    first_line = 1
    if header:
        if not rows:
            raise TooShortError("empty file")
        names = [h.strip() for h in rows[0]]
        rows = rows[1:]
        first_line = 2

    def resolve(col) -> int:
        if isinstance(col, str) and not col.lstrip("-").isdigit():
            if names is None or col not in names:
                raise ConfigurationError(f"column {col!r} not found")
            return names.index(col)
        idx = int(col)
        width = len(names) if names is not None else max((len(r) for r in rows), default=0)
        if not 0 <= idx < width:
            raise ConfigurationError(f"column index {idx} out of range (have {width} columns)")
        return idx

    idx = resolve(column)
    pidx = resolve(period_column) if period_column is not None else None
    label = name or (names[idx] if names is not None else f"column{idx}")

    values = []
    periods = [] if pidx is not None else None
    for offset, row in enumerate(rows):
        line = first_line + offset
        if idx >= len(row) or not row[idx].strip():
            raise ParseError(f"row {line}, column {label!r}: missing value", row=line, column=label)
        cell = row[idx].strip()
        try:
            x = float(cell)
        except ValueError:
            raise ParseError(
                f"row {line}, column {label!r}: cannot parse {cell!r} as a number",
                row=line,
                column=label,
            ) from None
        if not math.isfinite(x):
            raise ParseError(f"row {line}, column {label!r}: non-finite value {cell!r}", row=line, column=label)
        values.append(x)
        if periods is not None:
            periods.append(row[pidx].strip() if pidx < len(row) else "")

    if len(values) < MIN_TRANSFORM_LENGTH:
        raise TooShortError(f"need at least {MIN_TRANSFORM_LENGTH} observations, got {len(values)}")
    return TimeSeries(label, values, tuple(periods) if periods is not None else None)


def write_series_csv(series: TimeSeries, dest, value_column: str = "value") -> None:
    """Write ``series`` in the two-column layout :func:`load_series` reads.

    Values are written with ``repr`` so a load round-trip is exact.
    """
    labels = series.period or tuple(str(i + 1) for i in range(series.N))
    owned = isinstance(dest, (str, os.PathLike))
    stream = open(dest, "w", newline="", encoding="utf-8") if owned else dest
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t", value_column])
        for label, x in zip(labels, series.values):
            writer.writerow([label, repr(float(x))])
    finally:
        if owned:
            stream.close()


def transform(series: TimeSeries, spec: TransformSpec) -> TimeSeries:
    """Apply a growth transform. ``diff`` and ``logdiff`` drop the first observation."""
    if spec.kind == "none":
        return series
    if series.N < MIN_TRANSFORM_LENGTH:
        raise TooShortError(f"{spec.kind} needs at least 2 observations, got {series.N}")
    x = series.values
    if spec.kind == "logdiff":
        bad = np.flatnonzero(x <= 0)
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"logdiff requires positive levels; value {x[i]!r} at index {i}")
        out = spec.scale * np.diff(np.log(x))
    else:
        out = spec.scale * np.diff(x)
    period = series.period[1:] if series.period is not None else None
    return TimeSeries(series.name, out, period)


def standardize(series: TimeSeries | Sequence[float]) -> StandardizedSeries:
    """Remove the sample mean and divide by the divisor-N standard deviation."""
    if isinstance(series, TimeSeries):
        x, name = series.values, series.name
    else:
        x, name = np.asarray(series, dtype=float), ""
    if len(x) < MIN_TRANSFORM_LENGTH:
        raise TooShortError(f"need at least {MIN_TRANSFORM_LENGTH} observations, got {len(x)}")
    mean = float(x.mean())
    centered = x - mean
    std = float(np.sqrt(np.mean(centered**2)))
    if std == 0.0 or std <= 1e-14 * max(1.0, abs(mean)):
        raise DegenerateInputError("series has zero variance and cannot be standardized")
    z = centered / std
    # One polishing pass removes residual rounding in mean and scale.
    z = z - z.mean()
    z = z / np.sqrt(np.mean(z**2))
    return StandardizedSeries(z, source_mean=mean, source_std=std, name=name)


def summary_stats(growth: TimeSeries | Sequence[float]) -> SummaryStats:
    x = growth.values if isinstance(growth, TimeSeries) else np.asarray(growth, dtype=float)
    if len(x) < 3:
        raise TooShortError(f"summary statistics need at least 3 observations, got {len(x)}")
    return SummaryStats(
        mean=float(np.mean(x)),
        std=float(np.std(x, ddof=1)),
        acc=float(np.mean(np.diff(x))),
    )
