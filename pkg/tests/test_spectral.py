import numpy as np
import pytest
from scipy.integrate import cumulative_simpson, quad, trapezoid

from nearwhite import (
    AutocovarianceSet,
    FrequencyGrid,
    autocovariances,
    fft_periodogram_oracle,
    integral_spectrum,
    spectrum,
    standardize,
)
from nearwhite.errors import ConfigurationError, TooShortError
from nearwhite.spectral import lag_weights, write_curve_csv

from conftest import arma_standardized, brute_force_acov, wn_standardized

# F(pi/2) for [1, -1, 1, -1]: 1/4 + (-3 + 1/3)/(4 pi), confirmed by quad below.
ALT4_F_HALF_PI = 0.25 - 2 / (3 * np.pi)


def test_alternating_acov(alternating4):
    acov = autocovariances(alternating4)
    assert acov.C0 == 4
    assert acov.C.tolist() == [-3, 2, -1]
    assert acov.R.tolist() == [-0.75, 0.5, -0.25]


def test_two_point_acov():
    acov = autocovariances(standardize([1.0, -1.0]))
    assert (acov.C0, acov.C.tolist()) == (2, [-1])


def test_acov_matches_double_loop_exactly_on_signs():
    # Balanced +/-1 sequences are already standardized and every product is exact.
    rng = np.random.default_rng(9)
    for n in (16, 64, 256, 512):
        x = np.r_[np.ones(n // 2), -np.ones(n // 2)]
        rng.shuffle(x)
        z = standardize(x)
        assert np.array_equal(z.values, x)
        acov = autocovariances(z)
        ref = brute_force_acov(x)
        assert acov.C0 == ref[0]
        assert np.array_equal(acov.C, ref[1:])


@pytest.mark.parametrize("seed", range(3))
def test_acov_matches_double_loop_floats(seed):
    z = wn_standardized(300, seed)
    ref = brute_force_acov(z.values)
    acov = autocovariances(z)
    np.testing.assert_allclose(acov.C, ref[1:], rtol=0, atol=1e-10)
    assert acov.C0 == pytest.approx(z.N, rel=1e-8)
    assert np.all(np.abs(acov.C) <= acov.C0)


def test_max_lag_range():
    z = wn_standardized(32, 0)
    assert autocovariances(z, 5).C.shape == (5,)
    for bad in (0, 32, 2.5):
        with pytest.raises(ConfigurationError):
            autocovariances(z, bad)


def test_white_noise_lag_products_small():
    # sd of C_tau / N is about 1/sqrt(N) = 0.032, so 0.2 is a 6-sigma bound.
    hits = 0
    for seed in range(1000):
        acov = autocovariances(wn_standardized(1000, seed), max_lag=10)
        hits += np.all(np.abs(acov.R) < 0.2)
    assert hits / 1000 >= 0.99


def test_grid_construction():
    g = FrequencyGrid.uniform(4)
    assert g.M == 4 and g.is_closed and g.is_uniform
    assert g.points[-1] == np.pi
    with pytest.raises(ConfigurationError):
        FrequencyGrid(np.array([0.0, 2.0, 1.0]))
    with pytest.raises(ConfigurationError):
        FrequencyGrid(np.array([0.0, 4.0]))
    with pytest.raises(ConfigurationError):
        FrequencyGrid.uniform(1)
    assert FrequencyGrid.uniform(8) == FrequencyGrid.uniform(8)
    assert FrequencyGrid.uniform(8) != FrequencyGrid.uniform(16)


def test_white_noise_spectrum_flat():
    f = spectrum(AutocovarianceSet.white_noise(100), FrequencyGrid.uniform(64))
    np.testing.assert_allclose(f.values, 1 / (2 * np.pi), rtol=0, atol=1e-15)
    assert 1 / (2 * np.pi) == pytest.approx(0.15915, abs=1e-5)


def test_alternation_peaks_at_pi():
    z = standardize(np.tile([1.0, -1.0], 32))
    f = spectrum(autocovariances(z)).values
    assert np.argmax(f) == len(f) - 1
    # f vanishes at every Fourier frequency but pi; f(0) attains the minimum.
    assert f[0] <= f.min() + 1e-12


def test_ar1_spectrum_single_frequency():
    # Averaged raw estimate near the closed-form AR(1) density at w = 0.1.
    rho, w = 0.5, 0.1
    grid = FrequencyGrid(np.array([0.0, w, np.pi]))
    est = np.mean(
        [spectrum(autocovariances(arma_standardized(4096, s, ar=(rho,))), grid).values[1] for s in range(200)]
    )
    exact = (1 - rho**2) / (1 - 2 * rho * np.cos(w) + rho**2) / (2 * np.pi)
    assert abs(est / exact - 1) < 0.25


@pytest.mark.parametrize("n", [64, 256])
def test_trapezoid_integral_is_half(n):
    z = wn_standardized(n, n)
    for m in (256, 512):
        grid = FrequencyGrid.uniform(m)
        f = spectrum(autocovariances(z), grid)
        assert trapezoid(f.values, grid.points) == pytest.approx(0.5, abs=1e-6)


def test_bartlett_nonnegative_and_weights():
    w = lag_weights(6, "bartlett", 4)
    np.testing.assert_allclose(w, [0.75, 0.5, 0.25, 0, 0, 0])
    for seed in range(20):
        z = arma_standardized(200, seed, ma=(-0.7,))
        f = spectrum(autocovariances(z), FrequencyGrid.uniform(512), "bartlett", 25)
        assert f.values.min() >= -1e-12
        assert f.window_tag == "bartlett(25)"
    with pytest.raises(ConfigurationError):
        lag_weights(5, "bartlett")
    with pytest.raises(ConfigurationError):
        lag_weights(5, "parzen")


def test_integral_endpoints():
    for seed in range(10):
        z = arma_standardized(100, seed, ar=(0.6,))
        F = integral_spectrum(autocovariances(z))
        assert F.values[0] == 0.0
        assert abs(F.values[-1] - 0.5) < 1e-8


def test_integral_white_noise_line():
    grid = FrequencyGrid.uniform(32)
    F = integral_spectrum(AutocovarianceSet.white_noise(50), grid)
    np.testing.assert_allclose(F.values, grid.points / (2 * np.pi), rtol=0, atol=1e-15)


def test_integral_hand_value(alternating4):
    grid = FrequencyGrid(np.array([0.0, np.pi / 2, np.pi]))
    F = integral_spectrum(autocovariances(alternating4), grid)
    assert F.values[1] == pytest.approx(ALT4_F_HALF_PI, abs=1e-14)
    assert F.values[1] == pytest.approx(0.0378, abs=1e-4)

    def f(w):
        return spectrum(autocovariances(alternating4), FrequencyGrid(np.array([w]))).values[0]

    by_quad, _ = quad(f, 0, np.pi / 2, epsabs=1e-13)
    assert F.values[1] == pytest.approx(by_quad, abs=1e-12)


@pytest.mark.parametrize("seed", range(50))
def test_integral_matches_fine_quadrature(seed):
    n = (64, 128, 256)[seed % 3]
    z = wn_standardized(n, seed) if seed % 2 else arma_standardized(n, seed, ar=(0.5,))
    acov = autocovariances(z)
    fine = FrequencyGrid.uniform(4096)
    f = spectrum(acov, fine).values
    by_quad = np.r_[0.0, cumulative_simpson(f, x=fine.points)]
    coarse = FrequencyGrid(fine.points[::16])
    F = integral_spectrum(acov, coarse).values
    assert np.max(np.abs(F - by_quad[::16])) < 1e-6


@pytest.mark.parametrize("seed", range(20))
def test_fft_oracle_agrees_at_fourier_frequencies(seed):
    z = wn_standardized(128, seed)
    oracle = fft_periodogram_oracle(z)
    direct = spectrum(autocovariances(z), oracle.grid)
    assert np.max(np.abs(direct.values - oracle.values)) < 1e-8


def test_ideal_white_noise_at_fourier_frequencies():
    grid = FrequencyGrid.fourier(128)
    f = spectrum(AutocovarianceSet.white_noise(128), grid)
    np.testing.assert_allclose(f.values, 1 / (2 * np.pi), rtol=0, atol=1e-10)


def test_fft_oracle_single_tone():
    n = 128
    t = np.arange(n)
    z = standardize(np.cos(2 * np.pi * 8 * t / n))
    p = fft_periodogram_oracle(z).values
    assert np.argmax(p) == 8
    assert p[8] / p.sum() > 1 - 1e-12


def test_fft_oracle_too_short():
    with pytest.raises(TooShortError):
        fft_periodogram_oracle(standardize([1.0, 2.0, 3.0]))


def test_curve_csv(tmp_path):
    grid = FrequencyGrid.uniform(4)
    p = tmp_path / "f.csv"
    write_curve_csv(grid, np.arange(5.0), p, "spectrum")
    lines = p.read_text().splitlines()
    assert lines[0] == "omega,spectrum"
    assert len(lines) == 6
    assert float(lines[-1].split(",")[0]) == np.pi
