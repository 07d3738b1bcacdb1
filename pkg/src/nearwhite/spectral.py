"""Autocovariances, sample spectrum and integral spectrum on [0, pi].

With a standardized series ``x`` of length ``N`` the lag products are
``C_tau = sum_t x_t x_{t+tau}`` (so ``C_0 = N``) and

    f(w) = C_0/(2 pi N) + 1/(pi N) * sum_tau C_tau cos(tau w)
    F(w) = C_0 w/(2 pi N) + 1/(pi N) * sum_tau C_tau sin(tau w)/tau

``F`` is the exact antiderivative of ``f`` with ``F(0) = 0`` and
``F(pi) = 1/2``. Both are evaluated by direct trigonometric sums, which
are exact at any grid point; the FFT periodogram is kept only as an
independent cross-check.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, TooShortError
from .ingest import MIN_SPECTRAL_LENGTH, StandardizedSeries, _frozen_array

DEFAULT_GRID_SIZE = 256
WINDOWS = ("raw", "bartlett")


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing angular frequencies in ``[0, pi]``.

    :meth:`uniform` builds the usual closed grid with both endpoints.
    Fourier grids from :meth:`fourier` stop short of ``pi`` when N is odd.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = _frozen_array(self.points)
        if pts.ndim != 1 or pts.size == 0:
            raise ConfigurationError("frequency grid must be a non-empty 1-d array")
        if pts[0] < 0 or pts[-1] > np.pi or np.any(np.diff(pts) <= 0):
            raise ConfigurationError("grid points must be strictly increasing within [0, pi]")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, M: int = DEFAULT_GRID_SIZE) -> "FrequencyGrid":
        if int(M) != M or M < 2:
            raise ConfigurationError(f"grid needs at least 2 subdivisions, got {M}")
        pts = np.linspace(0.0, np.pi, int(M) + 1)
        return cls(pts)

    @classmethod
    def fourier(cls, N: int) -> "FrequencyGrid":
        k = np.arange(N // 2 + 1)
        return cls(2.0 * np.pi * k / N)

    @property
    def M(self) -> int:
        return len(self.points) - 1

    @property
    def is_closed(self) -> bool:
        return self.points[0] == 0.0 and self.points[-1] == np.pi

    @property
    def is_uniform(self) -> bool:
        d = np.diff(self.points)
        return bool(np.allclose(d, d[0], rtol=1e-12, atol=0))

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, FrequencyGrid):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.all(self.points == other.points))

    def __hash__(self):
        return hash(self.points.tobytes())


@dataclass(frozen=True)
class AutocovarianceSet:
    """Unnormalized lag products ``C[k] = C_{k+1}`` up to ``max_lag``."""

    C: np.ndarray
    C0: float
    N: int
    max_lag: int

    def __post_init__(self):
        object.__setattr__(self, "C", _frozen_array(self.C))
        if len(self.C) != self.max_lag:
            raise ConfigurationError("C must hold exactly max_lag values")

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1, self.max_lag + 1)

    @property
    def R(self) -> np.ndarray:
        """Autocovariances ``C_tau / N`` for lags 1..max_lag."""
        return self.C / self.N

    @classmethod
    def white_noise(cls, N: int, max_lag: int | None = None) -> "AutocovarianceSet":
        """The ideal null: ``C_0 = N`` and every lag product zero."""
        max_lag = N - 1 if max_lag is None else max_lag
        return cls(np.zeros(max_lag), float(N), N, max_lag)


@dataclass(frozen=True)
class SpectrumEstimate:
    grid: FrequencyGrid
    values: np.ndarray
    window: str = "raw"
    width: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if len(self.values) != len(self.grid):
            raise ConfigurationError("spectrum values and grid differ in length")

    @property
    def window_tag(self) -> str:
        return self.window if self.width is None else f"{self.window}({self.width})"


@dataclass(frozen=True)
class IntegralSpectrum:
    grid: FrequencyGrid
    values: np.ndarray
    N: int

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if len(self.values) != len(self.grid):
            raise ConfigurationError("integral spectrum values and grid differ in length")


def autocovariances(series: StandardizedSeries, max_lag: int | None = None) -> AutocovarianceSet:
    """Direct-sum lag products of a standardized series."""
    x = series.values
    n = len(x)
    if max_lag is None:
        max_lag = n - 1
    if int(max_lag) != max_lag or not 1 <= max_lag <= n - 1:
        raise ConfigurationError(f"max_lag must lie in [1, {n - 1}], got {max_lag}")
    max_lag = int(max_lag)
    full = np.correlate(x, x, mode="full")[n - 1 :]
    return AutocovarianceSet(full[1 : max_lag + 1], float(full[0]), n, max_lag)


def lag_weights(max_lag: int, window: str = "raw", width: int | None = None) -> np.ndarray:
    """Lag-window weights ``w_tau`` for tau = 1..max_lag."""
    if window == "raw":
        return np.ones(max_lag)
    if window == "bartlett":
        if width is None or int(width) != width or width < 1:
            raise ConfigurationError("bartlett window needs a positive integer width")
        tau = np.arange(1, max_lag + 1)
        return np.clip(1.0 - tau / width, 0.0, None)
    raise ConfigurationError(f"window must be one of {', '.join(WINDOWS)}, got {window!r}")


def spectrum(
    acov: AutocovarianceSet,
    grid: FrequencyGrid | None = None,
    window: str = "raw",
    width: int | None = None,
) -> SpectrumEstimate:
    """Sample spectrum ``f`` on ``grid``, optionally Bartlett lag-windowed."""
    grid = grid or FrequencyGrid.uniform()
    w = lag_weights(acov.max_lag, window, width)
    n = acov.N
    cos_terms = np.cos(np.outer(grid.points, acov.lags))
    values = acov.C0 / (2 * np.pi * n) + cos_terms @ (w * acov.C) / (np.pi * n)
    return SpectrumEstimate(grid, values, window, width if window == "bartlett" else None)


def integral_spectrum(acov: AutocovarianceSet, grid: FrequencyGrid | None = None) -> IntegralSpectrum:
    """Closed-form antiderivative ``F`` of the raw spectrum, ``F(0) = 0``."""
    grid = grid or FrequencyGrid.uniform()
    n = acov.N
    tau = acov.lags
    sin_terms = np.sin(np.outer(grid.points, tau)) / tau
    values = acov.C0 * grid.points / (2 * np.pi * n) + sin_terms @ acov.C / (np.pi * n)
    return IntegralSpectrum(grid, values, n)


def fft_periodogram_oracle(series: StandardizedSeries) -> SpectrumEstimate:
    """``|DFT|^2 / (2 pi N)`` at the Fourier frequencies ``2 pi k / N``."""
    x = series.values
    n = len(x)
    if n < MIN_SPECTRAL_LENGTH:
        raise TooShortError(f"spectral estimates need at least {MIN_SPECTRAL_LENGTH} observations, got {n}")
    dft = np.fft.rfft(x)
    return SpectrumEstimate(FrequencyGrid.fourier(n), np.abs(dft) ** 2 / (2 * np.pi * n))


def write_curve_csv(grid: FrequencyGrid, values, dest, value_name: str = "value") -> None:
    """Two-column (omega, value) export."""
    owned = isinstance(dest, (str, os.PathLike))
    stream = open(dest, "w", newline="", encoding="utf-8") if owned else dest
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["omega", value_name])
        for w, v in zip(grid.points, values):
            writer.writerow([repr(float(w)), repr(float(v))])
    finally:
        if owned:
            stream.close()
