"""Frequency-domain departure from white noise and business-cycle pattern verdicts."""

__version__ = "0.1.0"

from .errors import ConfigurationError, DataError, NearWhiteError  # noqa: E402
from .ingest import (  # noqa: E402
    StandardizedSeries,
    SummaryStats,
    TimeSeries,
    TransformSpec,
    load_series,
    standardize,
    summary_stats,
    transform,
)
from .spectral import (  # noqa: E402
    AutocovarianceSet,
    FrequencyGrid,
    IntegralSpectrum,
    SpectrumEstimate,
    autocovariances,
    fft_periodogram_oracle,
    integral_spectrum,
    spectrum,
)
from .synth import (  # noqa: E402
    ArmaSpec,
    RngSpec,
    gen_arma,
    gen_random_walk,
    gen_white_noise,
    theoretical_spectrum,
    theoretical_xi_shape,
)
from .nwn import (  # noqa: E402
    CalibrationReport,
    ConfidenceBand,
    XiCurve,
    confidence_band,
    mc_calibrate,
    sup_statistic,
    xi_covariance,
    xi_statistic,
    xi_variance,
)
from .classify import (  # noqa: E402
    ClassifierConfig,
    PatternVerdict,
    SignProfile,
    classify,
    significance_profile,
    xi_derivative_check,
)
