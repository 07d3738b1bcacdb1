"""Business-cycle pattern verdicts from a xi curve and its confidence band.

Labels, applied in order:

1. ``WhiteNoiseCompatible``: no interior point breaches the band.
2. ``Compounding``: xi is (almost) never negative, breaches the upper
   band on at least ``min_sig`` of the interior and never the lower one.
   Low frequencies dominate.
3. ``MeanReverting``: the mirror image. High frequencies dominate.
4. ``MixedComplexity``: anything else, in particular any curve with
   breaches on both sides.

Grid endpoints are excluded everywhere since xi is pinned to zero there.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigurationError
from .nwn import ConfidenceBand, XiCurve
from .spectral import SpectrumEstimate

LABELS = ("WhiteNoiseCompatible", "Compounding", "MeanReverting", "MixedComplexity")
STRENGTHS = ("none", "weak", "strong")


@dataclass(frozen=True)
class ClassifierConfig:
    sign_dominance: float = 0.95
    min_sig: float = 0.10
    strong_sig: float = 0.50
    zero_tol: float = 1e-9

    def __post_init__(self):
        if not 0 < self.min_sig <= self.strong_sig <= 1:
            raise ConfigurationError("need 0 < min_sig <= strong_sig <= 1")
        if not 0.5 < self.sign_dominance <= 1:
            raise ConfigurationError("sign_dominance must lie in (0.5, 1]")
        if not self.zero_tol >= 0:
            raise ConfigurationError("zero_tol must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SignProfile:
    frac_positive: float
    frac_negative: float
    frac_zero: float
    frac_sig_positive: float
    frac_sig_negative: float
    max_breach_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PatternVerdict:
    label: str
    strength: str
    profile: SignProfile
    config: ClassifierConfig

    def to_dict(self) -> dict:
        p = self.profile.to_dict()
        ratio = p.pop("max_breach_ratio")
        return {
            "label": self.label,
            "strength": self.strength,
            "fractions": p,
            "max_breach_ratio": ratio,
            "config": self.config.to_dict(),
        }

    def summary(self) -> str:
        p = self.profile
        return (
            f"{self.label} ({self.strength}): "
            f"{p.frac_positive:.0%} positive, {p.frac_negative:.0%} negative, "
            f"{p.frac_sig_positive:.0%} above band, {p.frac_sig_negative:.0%} below band"
        )


def _interior(n: int) -> slice:
    return slice(1, n - 1)


def _check_shared(xi: XiCurve, grid) -> None:
    if xi.grid != grid:
        raise ConfigurationError("xi curve and band/spectrum are on different grids")


def significance_profile(xi: XiCurve, band: ConfidenceBand, zero_tol: float = 1e-9) -> SignProfile:
    _check_shared(xi, band.grid)
    inner = _interior(len(xi.grid))
    x = xi.xi[inner]
    upper = band.upper[inner]
    lower = band.lower[inner]
    if x.size == 0:
        raise ConfigurationError("grid has no interior points")

    pos = x > zero_tol
    neg = x < -zero_tol
    zero = ~(pos | neg)
    # A breach must also carry the matching sign, so sig fractions never
    # exceed sign fractions even for a degenerate band.
    sig_pos = pos & (x > upper)
    sig_neg = neg & (x < lower)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(x >= 0, x / np.abs(upper), -x / np.abs(lower))
    ratio = ratio[np.isfinite(ratio)]
    n = x.size
    return SignProfile(
        frac_positive=pos.sum() / n,
        frac_negative=neg.sum() / n,
        frac_zero=zero.sum() / n,
        frac_sig_positive=sig_pos.sum() / n,
        frac_sig_negative=sig_neg.sum() / n,
        max_breach_ratio=float(ratio.max()) if ratio.size else 0.0,
    )


def classify(xi: XiCurve, band: ConfidenceBand, config: ClassifierConfig | None = None) -> PatternVerdict:
    config = config or ClassifierConfig()
    p = significance_profile(xi, band, config.zero_tol)

    if p.frac_sig_positive == 0 and p.frac_sig_negative == 0:
        return PatternVerdict("WhiteNoiseCompatible", "none", p, config)

    if (
        p.frac_positive + p.frac_zero >= config.sign_dominance
        and p.frac_sig_positive >= config.min_sig
        and p.frac_sig_negative == 0
    ):
        label, dominant = "Compounding", p.frac_sig_positive
    elif (
        p.frac_negative + p.frac_zero >= config.sign_dominance
        and p.frac_sig_negative >= config.min_sig
        and p.frac_sig_positive == 0
    ):
        label, dominant = "MeanReverting", p.frac_sig_negative
    else:
        label, dominant = "MixedComplexity", max(p.frac_sig_positive, p.frac_sig_negative)

    strength = "strong" if dominant >= config.strong_sig else "weak"
    return PatternVerdict(label, strength, p, config)


def xi_derivative_check(xi: XiCurve, spectrum: SpectrumEstimate) -> float:
    """Largest interior gap between ``d xi / d w`` and ``sqrt(N) (f - 1/(2 pi))``.

    The derivative is a second-order central difference, so the residual
    is pure finite-difference error and shrinks about 4x per halving of the
    grid spacing once the spacing resolves the highest lag (``h * N << 1``).
    """
    _check_shared(xi, spectrum.grid)
    if spectrum.window != "raw":
        raise ConfigurationError("derivative check needs the raw (unwindowed) spectrum")
    w = xi.grid.points
    if len(w) < 3:
        raise ConfigurationError("derivative check needs at least 3 grid points")
    slope = np.gradient(xi.xi, w)
    target = np.sqrt(xi.N) * (spectrum.values - 1 / (2 * np.pi))
    inner = _interior(len(w))
    return float(np.max(np.abs(slope[inner] - target[inner])))
