"""Near-white-noise departure statistic, its limiting variance, bands and calibration.

For a standardized series of length N,

    xi(w) = sqrt(N) * (F(w) - w / (2 pi)),

which is pinned to zero at ``w = 0`` and ``w = pi``. Two analytic
variance curves are offered:

``paper3``
    ``3 w (pi - w) / (4 pi^2)``, the published limit.
``studentized2``
    ``2 w (pi - w) / (4 pi^2)``, the limit when ``C_0`` is fixed at N by
    sample standardization (only the lag sum varies).

:func:`mc_calibrate` decides empirically which one a given ``N`` follows.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import ConfigurationError, DomainError
from .ingest import _frozen_array
from .spectral import FrequencyGrid, IntegralSpectrum
from .synth import RNG_ALGORITHM, RngSpec, gen_white_noise

ANALYTIC_MODES = ("paper3", "studentized2")
BAND_MODES = ANALYTIC_MODES + ("montecarlo",)
BAND_KINDS = ("pointwise", "simultaneous")
VARIANCE_FACTOR = {"paper3": 3.0, "studentized2": 2.0}

MIN_REPS = 1000
MIN_CALIBRATION_N = 32
MATCH_TOLERANCE = 0.15
# Replications per batch. Fixed so results do not depend on the worker count.
CHUNK_REPS = 250


@dataclass(frozen=True)
class XiCurve:
    grid: FrequencyGrid
    xi: np.ndarray
    N: int
    band_mode: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "xi", _frozen_array(self.xi))
        if len(self.xi) != len(self.grid):
            raise ConfigurationError("xi values and grid differ in length")


@dataclass(frozen=True)
class ConfidenceBand:
    grid: FrequencyGrid
    upper: np.ndarray
    lower: np.ndarray
    alpha: float
    mode: str
    kind: str = "pointwise"

    def __post_init__(self):
        object.__setattr__(self, "upper", _frozen_array(self.upper))
        object.__setattr__(self, "lower", _frozen_array(self.lower))
        if not (len(self.upper) == len(self.lower) == len(self.grid)):
            raise ConfigurationError("band arrays and grid differ in length")


@dataclass(frozen=True)
class CalibrationReport:
    N: int
    reps: int
    seed: int
    alpha: float
    grid: FrequencyGrid
    variance_curve: np.ndarray
    q_low: np.ndarray
    q_high: np.ndarray
    sup_critical: float
    matched_mode: str
    relative_error: dict = field(default_factory=dict)
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        for name in ("variance_curve", "q_low", "q_high"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name)))

    def to_dict(self) -> dict:
        return {
            "kind": "calibration_report",
            "N": self.N,
            "reps": self.reps,
            "seed": self.seed,
            "alpha": self.alpha,
            "matched_mode": self.matched_mode,
            "sup_critical": self.sup_critical,
            "relative_error": dict(self.relative_error),
            "rng_algorithm": self.rng_algorithm,
            "omega": self.grid.points.tolist(),
            "variance": self.variance_curve.tolist(),
            "q_low": self.q_low.tolist(),
            "q_high": self.q_high.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationReport":
        try:
            return cls(
                N=int(data["N"]),
                reps=int(data["reps"]),
                seed=int(data["seed"]),
                alpha=float(data["alpha"]),
                grid=FrequencyGrid(np.asarray(data["omega"], dtype=float)),
                variance_curve=data["variance"],
                q_low=data["q_low"],
                q_high=data["q_high"],
                sup_critical=float(data["sup_critical"]),
                matched_mode=str(data["matched_mode"]),
                relative_error=dict(data.get("relative_error", {})),
                rng_algorithm=str(data.get("rng_algorithm", RNG_ALGORITHM)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid calibration report: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "CalibrationReport":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"calibration file is not JSON: {exc}") from None
        return cls.from_dict(data)


def xi_statistic(F: IntegralSpectrum, band_mode: str | None = None) -> XiCurve:
    w = F.grid.points
    return XiCurve(F.grid, np.sqrt(F.N) * (F.values - w / (2 * np.pi)), F.N, band_mode)


def _check_mode(mode: str) -> None:
    if mode not in ANALYTIC_MODES:
        raise ConfigurationError(f"analytic mode must be one of {', '.join(ANALYTIC_MODES)}, got {mode!r}")


def _check_omega(*values) -> None:
    for v in values:
        v = np.asarray(v, dtype=float)
        if np.any((v < 0) | (v > np.pi)) or not np.all(np.isfinite(v)):
            raise DomainError("frequency must lie in [0, pi]")


def xi_variance(omega, mode: str = "paper3"):
    """Limiting ``E[xi(w)^2]``; accepts scalars or arrays."""
    _check_mode(mode)
    _check_omega(omega)
    w = np.asarray(omega, dtype=float)
    out = VARIANCE_FACTOR[mode] * w * (np.pi - w) / (4 * np.pi**2)
    return float(out) if out.ndim == 0 else out


def xi_covariance(nu, omega, mode: str = "paper3"):
    """Limiting ``E[xi(nu) xi(w)]``. Arguments are ordered internally."""
    _check_mode(mode)
    _check_omega(nu, omega)
    a = np.minimum(nu, omega)
    b = np.maximum(nu, omega)
    out = VARIANCE_FACTOR[mode] * np.asarray(a) * (np.pi - np.asarray(b)) / (4 * np.pi**2)
    return float(out) if np.ndim(out) == 0 else out


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ConfigurationError("alpha must lie in (0,1)")


def _check_calibration(calibration, grid: FrequencyGrid, alpha: float, N: int | None) -> None:
    if calibration is None:
        raise ConfigurationError("this band needs a calibration report (run `nearwhite calibrate`)")
    if calibration.grid != grid:
        raise ConfigurationError("calibration grid does not match the analysis grid")
    if not np.isclose(calibration.alpha, alpha, rtol=0, atol=1e-12):
        raise ConfigurationError(f"calibration was run at alpha={calibration.alpha}, not {alpha}")
    if N is not None and calibration.N != N:
        raise ConfigurationError(f"calibration was run for N={calibration.N}, series has N={N}")


def confidence_band(
    grid: FrequencyGrid,
    alpha: float = 0.05,
    mode: str = "paper3",
    calibration: CalibrationReport | None = None,
    kind: str = "pointwise",
    N: int | None = None,
) -> ConfidenceBand:
    """Band for xi under the white-noise null.

    ``pointwise`` bands use ``z_{1-alpha/2} * sqrt(Var)`` for analytic modes
    and the calibrated per-frequency quantiles for ``montecarlo``.
    ``simultaneous`` bands are the constant ``+/- sup_critical`` from a
    calibration, so the whole curve stays inside with probability
    ``1 - alpha`` under the null.
    """
    _check_alpha(alpha)
    if mode not in BAND_MODES:
        raise ConfigurationError(f"band mode must be one of {', '.join(BAND_MODES)}, got {mode!r}")
    if kind not in BAND_KINDS:
        raise ConfigurationError(f"band kind must be one of {', '.join(BAND_KINDS)}, got {kind!r}")

    if kind == "simultaneous":
        _check_calibration(calibration, grid, alpha, N)
        upper = np.full(len(grid), calibration.sup_critical)
        return ConfidenceBand(grid, upper, -upper, alpha, mode, kind)
    if mode == "montecarlo":
        _check_calibration(calibration, grid, alpha, N)
        return ConfidenceBand(grid, calibration.q_high, calibration.q_low, alpha, mode, kind)
    z = norm.ppf(1 - alpha / 2)
    upper = z * np.sqrt(xi_variance(grid.points, mode))
    return ConfidenceBand(grid, upper, -upper, alpha, mode, kind)


def sup_statistic(xi: XiCurve) -> float:
    """Grid maximum of ``|xi|``, standing in for the continuous supremum."""
    return float(np.max(np.abs(xi.xi)))


def xi_batch(X: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """xi curves for each row of ``X``; same arithmetic as the scalar path.

    Rows are standardized like :func:`nearwhite.ingest.standardize` and lag
    products come from a zero-padded FFT, which agrees with the direct sums
    to rounding error.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    z = X - X.mean(axis=1, keepdims=True)
    z /= np.sqrt(np.mean(z**2, axis=1, keepdims=True))
    z -= z.mean(axis=1, keepdims=True)
    z /= np.sqrt(np.mean(z**2, axis=1, keepdims=True))
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    spec = np.fft.rfft(z, nfft, axis=1)
    lagged = np.fft.irfft(spec.real**2 + spec.imag**2, nfft, axis=1)[:, 1:n]
    c0 = np.sum(z**2, axis=1, keepdims=True)
    tau = np.arange(1, n)
    w = grid.points
    F = c0 * w / (2 * np.pi * n) + lagged @ (np.sin(np.outer(tau, w)) / tau[:, None]) / (np.pi * n)
    return np.sqrt(n) * (F - w / (2 * np.pi))


def _calibration_chunk(N: int, grid: FrequencyGrid, seed: int, reps: range) -> np.ndarray:
    X = np.stack([gen_white_noise(N, RngSpec(seed, r)).values for r in reps])
    return xi_batch(X, grid)


def simulate_null_xi(N: int, grid: FrequencyGrid, reps: int, seed: int, workers: int = 1) -> np.ndarray:
    """``reps x len(grid)`` xi curves of Gaussian white noise; rep ``r`` uses stream ``r``."""
    chunks = [range(s, min(s + CHUNK_REPS, reps)) for s in range(0, reps, CHUNK_REPS)]
    if workers <= 1:
        parts = [_calibration_chunk(N, grid, seed, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _calibration_chunk(N, grid, seed, c), chunks))
    return np.concatenate(parts, axis=0)


def variance_mismatch(empirical: np.ndarray, grid: FrequencyGrid, mode: str) -> float:
    """Largest gap to the analytic curve, relative to that curve's peak."""
    model = xi_variance(grid.points, mode)
    interior = slice(1, -1) if grid.is_closed else slice(None)
    return float(np.max(np.abs(empirical[interior] - model[interior])) / np.max(model))


def mc_calibrate(
    N: int,
    grid: FrequencyGrid | None = None,
    alpha: float = 0.05,
    reps: int = 10000,
    seed: int = 0,
    workers: int = 1,
) -> CalibrationReport:
    """Monte Carlo null distribution of xi for series of length ``N``."""
    grid = grid or FrequencyGrid.uniform()
    if int(reps) != reps or reps < MIN_REPS:
        raise ConfigurationError(f"reps must be an integer >= {MIN_REPS}, got {reps}")
    if int(N) != N or N < MIN_CALIBRATION_N:
        raise ConfigurationError(f"N must be an integer >= {MIN_CALIBRATION_N}, got {N}")
    _check_alpha(alpha)
    N, reps, seed = int(N), int(reps), int(seed)
    xi = simulate_null_xi(N, grid, reps, seed, workers)

    variance = xi.var(axis=0, ddof=1)
    q_low = np.quantile(xi, alpha / 2, axis=0)
    q_high = np.quantile(xi, 1 - alpha / 2, axis=0)
    sup_critical = float(np.quantile(np.max(np.abs(xi), axis=1), 1 - alpha))

    errors = {m: variance_mismatch(variance, grid, m) for m in ANALYTIC_MODES}
    best = min(ANALYTIC_MODES, key=errors.get)
    matched = best if errors[best] <= MATCH_TOLERANCE else "neither"

    return CalibrationReport(
        N=N,
        reps=reps,
        seed=seed,
        alpha=float(alpha),
        grid=grid,
        variance_curve=variance,
        q_low=q_low,
        q_high=q_high,
        sup_critical=sup_critical,
        matched_mode=matched,
        relative_error=errors,
    )
