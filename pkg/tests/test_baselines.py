#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Testing suite for the baseline IF estimators.

"""
from __future__ import print_function, division

import unittest as ut
import numpy as np
import numpy.testing as npt

from chirpgp import (BaselineEstimate, Linearize, TimeSeries,
                     UnsupportedInput, default_starts, hilbert_if,
                     legacy_ss_if, rmse, spectrogram_if)


def sampled(func, fs, duration):
    t = np.arange(int(round(fs * duration))) / fs
    return TimeSeries(t, func(t))


class HilbertTestCase(ut.TestCase):

    """Test the analytic-signal estimator."""

    def test_tone(self):
        """Test a pure tone over whole periods."""

        series = sampled(lambda t: np.sin(2 * np.pi * 5 * t), 1000., 1.)
        estimate = hilbert_if(series)

        self.assertEqual(len(estimate), len(series))
        self.assertEqual(estimate.method, 'hilbert')
        npt.assert_allclose(estimate.if_est, 5., atol=1e-6)
        npt.assert_array_equal(np.flatnonzero(estimate.edge),
                               [0, len(series) - 1])

    def test_linear_chirp(self):
        """Test a linear chirp from 2 to 10 Hz."""

        series = sampled(lambda t: np.sin(2 * np.pi * (2 * t + 4 * t ** 2)),
                         1000., 1.)
        estimate = hilbert_if(series)
        interior = slice(100, 900)
        error = estimate.if_est[interior] - (2 + 8 * series.t[interior])

        self.assertLess(np.mean(np.abs(error)), .2)

    def test_unsupported(self):
        """Test rejected inputs."""

        with self.assertRaises(UnsupportedInput):
            hilbert_if(TimeSeries(np.arange(5.), np.zeros(5)))
        with self.assertRaises(UnsupportedInput):
            hilbert_if(TimeSeries(np.arange(10.) ** 2, np.zeros(10)))
        y = np.zeros(10)
        y[3] = np.nan
        with self.assertRaises(UnsupportedInput):
            hilbert_if(TimeSeries(np.arange(10.), y))


class SpectrogramTestCase(ut.TestCase):

    """Test the spectrogram first-moment estimator."""

    def test_tone(self):
        """Test a pure tone on a frequency bin."""

        series = sampled(lambda t: np.sin(2 * np.pi * 5 * t), 1000., 10.)
        estimate = spectrogram_if(series, window_len=2000, overlap=1000)

        self.assertEqual(len(estimate), len(series))
        npt.assert_allclose(estimate.if_est, 5., atol=.05)
        self.assertTrue(estimate.edge[0])
        self.assertFalse(estimate.edge[len(series) // 2])

    def test_white_noise(self):
        """Test white noise centres on a quarter of the sampling rate."""

        rng = np.random.default_rng(0)
        series = TimeSeries(np.arange(10000) / 1000.,
                            rng.standard_normal(10000))
        estimate = spectrogram_if(series, overlap=225)

        self.assertAlmostEqual(np.mean(estimate.if_est) / 250., 1.,
                               delta=.1)

    def test_arguments(self):
        """Test invalid windows."""

        series = sampled(np.sin, 100., 1.)
        with self.assertRaises(ValueError):
            spectrogram_if(series, window_len=50, overlap=50)
        with self.assertRaises(UnsupportedInput):
            spectrogram_if(series, window_len=450, overlap=449)


class LegacyTestCase(ut.TestCase):

    """Test the legacy state-space baseline."""

    def test_pinned_dispersion(self):
        """Test the fitted dispersion stays at zero."""

        series = sampled(lambda t: np.sin(2 * np.pi * 5 * t), 100., .3)
        estimate = legacy_ss_if(series, rule=Linearize(),
                                starts=default_starts()[:1])

        self.assertEqual(estimate.params.b, 0.)
        self.assertEqual(len(estimate), len(series))
        self.assertTrue(np.all(estimate.if_est > 0))


class RMSETestCase(ut.TestCase):

    """Test the error metric."""

    def test_rmse(self):
        """Test values, masks and non-finite estimates."""

        self.assertAlmostEqual(rmse([1., 2., 3.], [1., 2., 5.]),
                               np.sqrt(4. / 3))
        self.assertEqual(rmse([1., 9.], [1., 2.], mask=[True, False]), 0.)
        self.assertTrue(np.isnan(rmse([np.nan, 1.], [0., 0.])))

        with self.assertRaises(ValueError):
            rmse([1., 2.], [1.])
        with self.assertRaises(ValueError):
            BaselineEstimate(t=np.zeros(2), if_est=np.zeros(2),
                             method='wavelet')


if __name__ == '__main__':
    ut.main()
