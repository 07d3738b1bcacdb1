import json

import jsonschema
import numpy as np
import pytest

from nearwhite import (
    CalibrationReport,
    FrequencyGrid,
    XiCurve,
    autocovariances,
    confidence_band,
    integral_spectrum,
    mc_calibrate,
    standardize,
    sup_statistic,
    xi_covariance,
    xi_statistic,
    xi_variance,
)
from nearwhite.errors import ConfigurationError, DomainError
from nearwhite.nwn import simulate_null_xi, xi_batch
from nearwhite.report import load_schema
from nearwhite.synth import RngSpec, gen_white_noise

from conftest import arma_standardized, wn_standardized

Z975 = 1.959963984540054
HALF_PI = FrequencyGrid(np.array([0.0, np.pi / 2, np.pi]))


def xi_of(z, grid=None):
    return xi_statistic(integral_spectrum(autocovariances(z), grid))


def test_xi_pinned_at_endpoints():
    for seed in range(10):
        xi = xi_of(arma_standardized(200, seed, ar=(0.7,)))
        assert abs(xi.xi[0]) < 1e-12
        assert abs(xi.xi[-1]) < 1e-6


def test_xi_alternating_hand_value(alternating4):
    xi = xi_of(alternating4, HALF_PI)
    assert xi.xi[1] == pytest.approx(-4 / (3 * np.pi), abs=1e-13)
    assert xi.N == 4


def test_xi_is_linear_in_lag_products():
    z = wn_standardized(300, 4)
    acov = autocovariances(z)
    grid = FrequencyGrid.uniform(64)
    w = grid.points
    tau = acov.lags
    direct = (acov.C @ (np.sin(np.outer(tau, w)) / tau[:, None])) / (np.pi * np.sqrt(z.N))
    np.testing.assert_allclose(xi_statistic(integral_spectrum(acov, grid)).xi, direct, rtol=0, atol=1e-10)


def test_variance_values():
    assert xi_variance(np.pi / 2, "paper3") == pytest.approx(0.1875, abs=1e-15)
    assert xi_variance(np.pi / 2, "studentized2") == pytest.approx(0.125, abs=1e-15)
    assert xi_variance(0.0) == 0.0
    assert xi_variance(np.pi) == 0.0
    assert xi_covariance(np.pi / 4, np.pi / 2) == pytest.approx(0.09375, abs=1e-15)
    assert xi_covariance(np.pi / 2, np.pi / 4) == xi_covariance(np.pi / 4, np.pi / 2)
    assert xi_covariance(0.0, 1.0) == 0.0


def test_variance_is_covariance_diagonal():
    w = FrequencyGrid.uniform(32).points
    for mode in ("paper3", "studentized2"):
        np.testing.assert_allclose(xi_covariance(w, w, mode), xi_variance(w, mode), rtol=0, atol=1e-15)


def test_variance_domain():
    for bad in (-0.1, 3.2, np.nan):
        with pytest.raises(DomainError):
            xi_variance(bad)
    with pytest.raises(DomainError):
        xi_covariance(0.5, 4.0)
    with pytest.raises(ConfigurationError):
        xi_variance(1.0, "bogus")


def test_band_values():
    p3 = confidence_band(HALF_PI, 0.05, "paper3")
    s2 = confidence_band(HALF_PI, 0.05, "studentized2")
    assert p3.upper[1] == pytest.approx(0.8486893005571288, abs=1e-12)
    assert s2.upper[1] == pytest.approx(0.692951912174839, abs=1e-12)
    assert p3.upper[1] == pytest.approx(Z975 * np.sqrt(3 / 16), abs=1e-12)
    for band in (p3, s2):
        assert band.upper[0] == band.upper[-1] == 0.0
        np.testing.assert_array_equal(band.lower, -band.upper)


def test_band_narrows_with_alpha():
    grid = FrequencyGrid.uniform(16)
    wide = confidence_band(grid, 0.01).upper
    narrow = confidence_band(grid, 0.10).upper
    assert np.all(wide[1:-1] > narrow[1:-1])


@pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5, -0.2])
def test_band_alpha_validation(alpha):
    with pytest.raises(ConfigurationError, match=r"alpha must lie in \(0,1\)"):
        confidence_band(HALF_PI, alpha)


def test_calibrated_bands_need_calibration():
    with pytest.raises(ConfigurationError):
        confidence_band(HALF_PI, 0.05, "montecarlo")
    with pytest.raises(ConfigurationError):
        confidence_band(HALF_PI, 0.05, "paper3", kind="simultaneous")
    with pytest.raises(ConfigurationError):
        confidence_band(HALF_PI, 0.05, "paper3", kind="sideways")


def test_sup_statistic():
    grid = FrequencyGrid.uniform(3)
    assert sup_statistic(XiCurve(grid, [0.0, 0.3, -0.7, 0.0], 10)) == 0.7
    assert sup_statistic(XiCurve(grid, np.zeros(4), 10)) == 0.0


def test_batch_matches_scalar_pipeline():
    grid = FrequencyGrid.uniform(128)
    series = [gen_white_noise(100, RngSpec(7, r)).values for r in range(12)]
    batch = xi_batch(np.stack(series), grid)
    for row, x in zip(batch, series):
        np.testing.assert_allclose(row, xi_of(standardize(x), grid).xi, rtol=0, atol=1e-10)


def test_null_streams_are_independent_of_chunking():
    grid = FrequencyGrid.uniform(16)
    full = simulate_null_xi(64, grid, 600, seed=3)
    tail = simulate_null_xi(64, grid, 300, seed=3)
    np.testing.assert_array_equal(full[:300], tail)


@pytest.fixture(scope="module")
def small_calibration():
    return mc_calibrate(128, FrequencyGrid.uniform(64), reps=2000, seed=11)


def test_calibration_deterministic_across_workers(small_calibration):
    again = mc_calibrate(128, FrequencyGrid.uniform(64), reps=2000, seed=11, workers=4)
    assert again.to_json() == small_calibration.to_json()


def test_calibration_seed_changes_output(small_calibration):
    other = mc_calibrate(128, FrequencyGrid.uniform(64), reps=2000, seed=12)
    assert other.to_json() != small_calibration.to_json()


def test_calibration_shape(small_calibration):
    cal = small_calibration
    assert cal.variance_curve[0] == pytest.approx(0, abs=1e-20)
    assert np.all(cal.q_low[1:-1] < 0) and np.all(cal.q_high[1:-1] > 0)
    assert cal.sup_critical > np.max(cal.q_high)
    assert cal.matched_mode in ("paper3", "studentized2", "neither")
    assert set(cal.relative_error) == {"paper3", "studentized2"}


def test_calibration_json_round_trip(small_calibration):
    data = json.loads(small_calibration.to_json())
    jsonschema.validate(data, load_schema("calibration_report"))
    back = CalibrationReport.from_json(small_calibration.to_json())
    assert back.to_json() == small_calibration.to_json()
    assert back.grid == small_calibration.grid


def test_calibrated_bands(small_calibration):
    cal = small_calibration
    mc = confidence_band(cal.grid, 0.05, "montecarlo", cal, N=128)
    np.testing.assert_array_equal(mc.upper, cal.q_high)
    sim = confidence_band(cal.grid, 0.05, "studentized2", cal, "simultaneous", N=128)
    assert np.all(sim.upper == cal.sup_critical)
    with pytest.raises(ConfigurationError):
        confidence_band(cal.grid, 0.05, "montecarlo", cal, N=129)
    with pytest.raises(ConfigurationError):
        confidence_band(cal.grid, 0.10, "montecarlo", cal)
    with pytest.raises(ConfigurationError):
        confidence_band(FrequencyGrid.uniform(32), 0.05, "montecarlo", cal)


def test_calibration_argument_checks():
    with pytest.raises(ConfigurationError):
        mc_calibrate(128, reps=999)
    with pytest.raises(ConfigurationError):
        mc_calibrate(16, reps=1000)
    with pytest.raises(ConfigurationError):
        mc_calibrate(128, reps=1000, alpha=2.0)


def test_bad_calibration_json():
    with pytest.raises(ConfigurationError):
        CalibrationReport.from_json("{not json")
    with pytest.raises(ConfigurationError):
        CalibrationReport.from_json('{"N": 5}')


@pytest.mark.slow
def test_sup_critical_stable_across_seeds():
    grid = FrequencyGrid.uniform(64)
    crit = [mc_calibrate(188, grid, reps=10000, seed=s).sup_critical for s in (1, 2, 3)]
    assert (max(crit) - min(crit)) / np.mean(crit) < 0.04
    for c in crit:
        assert abs(c / np.mean(crit) - 1) < 0.02
