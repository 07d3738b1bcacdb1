"""Synthetic processes with known spectral shape, and their closed-form spectra.

Every generator draws from a :class:`RngSpec`, which names a portable
bit generator (numpy's PCG64 seeded through ``SeedSequence``) plus a
sub-stream id. Concurrent replications use distinct stream ids rather
than sharing one generator.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, signal

from .errors import ConfigurationError, NonStationaryError
from .ingest import TimeSeries
from .spectral import FrequencyGrid, SpectrumEstimate

RNG_ALGORITHM = "numpy.PCG64/SeedSequence(seed, spawn_key=(stream,))"
MIN_BURN_IN = 50


@dataclass(frozen=True)
class RngSpec:
    seed: int = 0
    stream: int = 0
    algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        if self.algorithm != RNG_ALGORITHM:
            raise ConfigurationError(f"unsupported RNG algorithm {self.algorithm!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if int(self.stream) < 0:
            raise ConfigurationError("stream must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ArmaSpec:
    """``x_t = sum phi_i x_{t-i} + e_t + sum theta_j e_{t-j}``, ``e_t ~ N(0, sd^2)``."""

    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    innovation_sd: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(a) for a in self.ar))
        object.__setattr__(self, "ma", tuple(float(m) for m in self.ma))
        if not self.innovation_sd > 0:
            raise ConfigurationError("innovation_sd must be positive")
        if self.ar:
            # Roots of 1 - phi_1 z - ... - phi_p z^p must lie outside the unit circle.
            roots = np.roots(np.r_[-np.array(self.ar)[::-1], 1.0])
            if roots.size and np.min(np.abs(roots)) <= 1.0 + 1e-10:
                raise NonStationaryError(
                    f"AR coefficients {list(self.ar)} are not stationary: "
                    f"root of modulus {np.min(np.abs(roots)):.6g} on or inside the unit circle"
                )

    @property
    def ar_poly(self) -> np.ndarray:
        return np.r_[1.0, -np.array(self.ar)]

    @property
    def ma_poly(self) -> np.ndarray:
        return np.r_[1.0, np.array(self.ma)]

    @property
    def default_burn_in(self) -> int:
        return max(MIN_BURN_IN, 10 * (len(self.ar) + len(self.ma) + 1))

    def to_dict(self) -> dict:
        return {"ar": list(self.ar), "ma": list(self.ma), "innovation_sd": self.innovation_sd}

    @classmethod
    def from_dict(cls, data: dict) -> "ArmaSpec":
        unknown = set(data) - {"ar", "ma", "innovation_sd"}
        if unknown:
            raise ConfigurationError(f"unknown ArmaSpec fields: {sorted(unknown)}")
        return cls(tuple(data.get("ar", ())), tuple(data.get("ma", ())), float(data.get("innovation_sd", 1.0)))

    @classmethod
    def from_json(cls, text: str) -> "ArmaSpec":
        return cls.from_dict(json.loads(text))


def gen_white_noise(n: int, rng: RngSpec, name: str = "wn") -> TimeSeries:
    if n < 1:
        raise ConfigurationError("n must be at least 1")
    return TimeSeries(name, rng.generator().standard_normal(int(n)))


def gen_random_walk(n: int, rng: RngSpec, name: str = "rw") -> TimeSeries:
    """Walk starting at 0 whose steps are ``gen_white_noise(n - 1, rng)``."""
    if n < 2:
        raise ConfigurationError("random walk needs n >= 2")
    steps = rng.generator().standard_normal(int(n) - 1)
    return TimeSeries(name, np.r_[0.0, np.cumsum(steps)])


def gen_arma(n: int, spec: ArmaSpec, rng: RngSpec, burn_in: int | None = None, name: str = "arma") -> TimeSeries:
    """Recursive ARMA simulation from a zero start, burn-in discarded.

    The first ``n`` normal draws feed the kept observations and the burn-in
    draws come afterwards from the same stream, so ARMA(0,0) with unit sd
    reproduces :func:`gen_white_noise` exactly.
    """
    if n < 1:
        raise ConfigurationError("n must be at least 1")
    burn_in = spec.default_burn_in if burn_in is None else int(burn_in)
    if burn_in < 0:
        raise ConfigurationError("burn_in must be non-negative")
    g = rng.generator()
    kept = g.standard_normal(int(n))
    warm = g.standard_normal(burn_in)
    e = spec.innovation_sd * np.r_[warm, kept]
    x = signal.lfilter(spec.ma_poly, spec.ar_poly, e)[burn_in:]
    return TimeSeries(name, x)


def _density(spec: ArmaSpec, omega: np.ndarray) -> np.ndarray:
    z = np.exp(-1j * omega)
    num = np.abs(np.polyval(spec.ma_poly[::-1], z)) ** 2
    den = np.abs(np.polyval(spec.ar_poly[::-1], z)) ** 2
    return num / den


def process_variance_ratio(spec: ArmaSpec, points: int = 1 << 16) -> float:
    """Variance of the process per unit innovation variance.

    Mean of ``|theta|^2/|phi|^2`` over a full period; the rectangle rule is
    spectrally accurate for this periodic analytic integrand.
    """
    omega = 2 * np.pi * np.arange(points) / points
    return float(np.mean(_density(spec, omega)))


def theoretical_spectrum(spec: ArmaSpec, grid: FrequencyGrid | None = None) -> SpectrumEstimate:
    """Rational spectral density scaled to unit process variance.

    Integrates to 1/2 over ``[0, pi]``, matching a standardized sample.
    """
    grid = grid or FrequencyGrid.uniform()
    values = _density(spec, grid.points) / (2 * np.pi * process_variance_ratio(spec))
    return SpectrumEstimate(grid, values, window="theoretical")


def theoretical_xi_shape(spec: ArmaSpec, grid: FrequencyGrid | None = None, min_steps: int = 4096) -> np.ndarray:
    """Population departure ``int_0^w f - w/(2 pi)`` (no sqrt(N) factor).

    Composite trapezoid with at least ``min_steps`` sub-intervals over
    ``[0, pi]``, accumulated segment by segment between grid points.
    """
    grid = grid or FrequencyGrid.uniform()
    scale = 2 * np.pi * process_variance_ratio(spec)
    edges = np.r_[0.0, grid.points] if grid.points[0] > 0 else grid.points
    pieces = [0.0]
    for a, b in zip(edges[:-1], edges[1:]):
        steps = max(1, int(np.ceil(min_steps * (b - a) / np.pi)))
        w = np.linspace(a, b, steps + 1)
        pieces.append(integrate.trapezoid(_density(spec, w) / scale, w))
    mass = np.cumsum(pieces)
    if grid.points[0] > 0:
        mass = mass[1:]
    return mass - grid.points / (2 * np.pi)
