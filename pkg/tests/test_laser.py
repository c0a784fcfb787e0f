"""Tests for the pulse-train correlation function and spectral variances."""

import math
import warnings

import numpy as np
import pytest

from cvmbqc.laser import (
    DivergentAntisqueezingError,
    PulseTrain,
    QuadratureSpectrum,
    XNoiseModel,
    discrete_frequencies,
    whole_pulse_mode,
    x_spectral_variance,
    y_correlation,
    y_spectral_variance,
    y_spectral_variance_oracle,
)


@pytest.fixture
def train():
    return PulseTrain(duration=20.0, gap=5.0, n_pulses=4, kappa=1.0, mu=0.0)


class TestPulseTrain:
    def test_rejects_bad_geometry(self):
        with pytest.raises(ValueError):
            PulseTrain(duration=0.0, gap=1.0, n_pulses=1, kappa=1.0)
        with pytest.raises(ValueError):
            PulseTrain(duration=1.0, gap=1.0, n_pulses=0, kappa=1.0)
        with pytest.raises(ValueError):
            PulseTrain(duration=20.0, gap=1.0, n_pulses=1, kappa=-1.0)
        with pytest.raises(ValueError):
            PulseTrain(duration=20.0, gap=1.0, n_pulses=1, kappa=1.0, mu=1.0)

    def test_warns_on_short_pulses(self):
        with pytest.warns(UserWarning, match="correlation time"):
            PulseTrain(duration=1.0, gap=1.0, n_pulses=1, kappa=1.0)

    def test_warns_on_strong_locking(self):
        with pytest.warns(UserWarning, match="synchronization"):
            PulseTrain(duration=20.0, gap=1.0, n_pulses=1, kappa=1.0, mu=0.5)

    def test_pulse_starts(self, train):
        assert train.pulse_start(0) == 0.0
        assert train.pulse_start(3) == 75.0
        with pytest.raises(ValueError):
            train.pulse_start(4)


class TestCorrelation:
    def test_equal_times_same_pulse(self, train):
        assert y_correlation(1.0, 1.0, 0, 0, train) == pytest.approx(-train.kappa / 8)

    def test_distinct_pulses_vanish(self, train):
        assert y_correlation(1.0, 26.0, 0, 1, train) == 0.0

    def test_distinct_lasers_vanish(self, train):
        assert y_correlation(1.0, 1.0, 0, 0, train, channel=0, channel_prime=1) == 0.0

    def test_exponential_decay(self, train):
        c0 = abs(y_correlation(1.0, 1.0, 0, 0, train))
        c5 = abs(y_correlation(1.0, 6.0, 0, 0, train))
        assert c5 == pytest.approx(c0 * math.exp(-5.0), rel=1e-12)
        assert abs(y_correlation(0.5, 19.5, 0, 0, train)) < c0 * 1e-8

    def test_outside_window_vanishes(self, train):
        assert y_correlation(21.0, 1.0, 0, 0, train) == 0.0

    def test_mu_scaling(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            t = PulseTrain(duration=20.0, gap=5.0, n_pulses=1, kappa=1.0, mu=0.2)
        expected = -(1 / 8) * (0.8 / 0.9)
        assert y_correlation(1.0, 1.0, 0, 0, t) == pytest.approx(expected, rel=1e-12)


class TestSpectralVariance:
    def test_zero_frequency_is_fully_squeezed(self):
        assert y_spectral_variance(0.0, 1.0) == 0.0

    def test_at_kappa_is_one_eighth(self):
        assert y_spectral_variance(1.0, 1.0) == pytest.approx(0.125, abs=1e-15)
        # the entanglement boundary: 4 * variance = 1/2 exactly
        assert 4.0 * y_spectral_variance(1.0, 1.0) == 0.5

    def test_asymptotic_vacuum(self):
        assert y_spectral_variance(1e9, 1.0) == pytest.approx(0.25, rel=1e-12)
        assert np.all(y_spectral_variance(np.logspace(-3, 3, 50), 1.0) < 0.25)

    def test_even_and_monotone(self):
        omegas = np.linspace(0.0, 20.0, 100)
        y = y_spectral_variance(omegas, 2.0)
        np.testing.assert_array_equal(y, y_spectral_variance(-omegas, 2.0))
        assert np.all(np.diff(y) > 0)

    def test_rejects_bad_kappa(self):
        with pytest.raises(ValueError):
            y_spectral_variance(1.0, 0.0)


class TestOracle:
    def test_matches_closed_form_at_mu_zero(self):
        kappa = 1.3
        for omega in np.logspace(-3, 3, 25) * kappa:
            closed = y_spectral_variance(omega, kappa)
            numeric = y_spectral_variance_oracle(omega, kappa, 0.0)
            assert numeric == pytest.approx(closed, rel=1e-6)

    def test_zero_frequency(self):
        assert abs(y_spectral_variance_oracle(0.0, 1.0, 0.0)) < 1e-9

    def test_at_kappa(self):
        assert y_spectral_variance_oracle(1.0, 1.0, 0.0) == pytest.approx(0.125, rel=1e-6)

    def test_locking_leaves_residual_noise(self):
        # imperfect phase locking stops the vacuum term from cancelling at
        # zero frequency; the residual is (1/4)(1 - (1-mu)/(1-mu/2)^2)
        mu = 0.05
        residual = y_spectral_variance_oracle(0.0, 1.0, mu)
        expected = 0.25 * (1.0 - (1.0 - mu) / (1.0 - mu / 2.0) ** 2)
        assert residual > 0
        assert residual == pytest.approx(expected, rel=1e-9)

    def test_rejects_short_window(self):
        with pytest.raises(ValueError, match="window"):
            y_spectral_variance_oracle(1.0, 1.0, 0.0, window=5.0)


class TestXModel:
    def test_minimum_uncertainty_at_kappa(self):
        assert x_spectral_variance(1.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_excess_noise_scales(self):
        assert x_spectral_variance(1.0, 1.0, XNoiseModel.excess_noise(4.0)) == \
            pytest.approx(2.0, abs=1e-14)

    def test_uncertainty_product_everywhere(self):
        omegas = np.logspace(-3, 3, 60)
        for model in (XNoiseModel.minimum_uncertainty(), XNoiseModel.excess_noise(7.0)):
            x = x_spectral_variance(omegas, 1.0, model)
            y = y_spectral_variance(omegas, 1.0)
            assert np.all(x * y >= 1.0 / 16.0 - 1e-15)

    def test_divergent_at_zero(self):
        with pytest.raises(DivergentAntisqueezingError, match="divergent"):
            x_spectral_variance(0.0, 1.0)

    def test_rejects_factor_below_one(self):
        with pytest.raises(ValueError):
            XNoiseModel(0.5)

    def test_spectrum_wrapper(self):
        spec = QuadratureSpectrum(2.0, XNoiseModel.excess_noise(3.0))
        assert spec.four_y_var(2.0) == pytest.approx(0.5, abs=1e-15)
        assert spec.x_var(2.0) == pytest.approx(3.0 / (16 * 0.125), abs=1e-12)


class TestGridsAndWholePulse:
    def test_direct_formula(self, train):
        grid = discrete_frequencies(train, 1, [1])
        assert grid.omegas[-1] == pytest.approx(2 * math.pi / 25.0, rel=1e-15)

    def test_multiplicity_halves_frequencies(self, train):
        g1 = discrete_frequencies(train, 1, range(-3, 4))
        g2 = discrete_frequencies(train, 2, range(-3, 4))
        np.testing.assert_allclose(g2.omegas, g1.omegas / 2.0, atol=1e-18)

    def test_symmetric_range_closed_under_negation(self, train):
        grid = discrete_frequencies(train, 1, range(-4, 5))
        np.testing.assert_allclose(np.sort(-grid.omegas), np.sort(grid.omegas))

    def test_zero_always_included(self, train):
        grid = discrete_frequencies(train, 1, [3, 5])
        assert 0 in grid.ks

    def test_empty_range_rejected(self, train):
        with pytest.raises(ValueError, match="empty k range"):
            discrete_frequencies(train, 1, [])
        with pytest.raises(ValueError, match="multiplicity"):
            discrete_frequencies(train, 0, [0])

    def test_whole_pulse_mode(self, train):
        mode = whole_pulse_mode(train, 1, 0)
        assert mode.y_variance == 0.0
        assert mode.omega == 0.0 and mode.k == 0
        assert mode.commutator == 0.25

    def test_whole_pulse_correlations(self, train):
        a = whole_pulse_mode(train, 0, 0)
        b = whole_pulse_mode(train, 1, 0)
        c = whole_pulse_mode(train, 0, 1)
        assert a.correlated_with(a)
        assert not a.correlated_with(b)
        assert not a.correlated_with(c)
