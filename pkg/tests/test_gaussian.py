#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Testing suite for Gaussian helpers.

"""
from __future__ import print_function, division

import unittest as ut
import numpy as np
import numpy.testing as npt
import scipy.stats as scs

from chirpgp import (PSD_TOL, GaussianBelief, NumericalFailure, as_state,
                     normal_logpdf, psd_sqrt, symmetrize)


class GaussianTestCase(ut.TestCase):

    """Test Gaussian helpers."""

    def test_logpdf(self):
        """Test univariate log-density."""

        nobs = 10
        data = np.random.normal(size=nobs)
        mean = np.random.normal(size=nobs)
        var = np.random.uniform(.1, 3., size=nobs)

        npt.assert_array_almost_equal(
            normal_logpdf(data, mean, var),
            scs.norm.logpdf(data, loc=mean, scale=var ** .5))

    def test_psd_sqrt(self):
        """Test square root of covariance matrices."""

        ndim = 4
        for _ in range(10):
            mat = np.random.normal(size=(ndim, ndim))
            cov = mat.dot(mat.T)
            root = psd_sqrt(cov)

            npt.assert_array_almost_equal(root.dot(root.T), cov)

        npt.assert_array_equal(psd_sqrt(np.zeros((ndim, ndim))),
                               np.zeros((ndim, ndim)))

        cov = np.diag([1., 2., 0., 0.])
        root = psd_sqrt(cov)
        npt.assert_array_almost_equal(root.dot(root.T), cov)

        with self.assertRaises(NumericalFailure):
            psd_sqrt(np.diag([1., -1., 1., 1.]))

    def test_symmetrize(self):
        """Test symmetrization over the last two axes."""

        mats = np.random.normal(size=(3, 4, 4))
        sym = symmetrize(mats)

        npt.assert_array_equal(sym, np.swapaxes(sym, -1, -2))
        npt.assert_array_almost_equal(symmetrize(sym), sym)


class GaussianBeliefTestCase(ut.TestCase):

    """Test GaussianBelief validation."""

    def test_init(self):
        """Test __init__."""

        belief = GaussianBelief(np.arange(4.), np.eye(4))

        npt.assert_array_equal(belief.mean, np.arange(4.))
        self.assertEqual(belief.marginal(2), (2., 1.))
        self.assertFalse(belief.cov.flags.writeable)

        with self.assertRaises(ValueError):
            GaussianBelief(np.zeros(3), np.eye(3))
        with self.assertRaises(ValueError):
            GaussianBelief(np.zeros(4), np.eye(3))

        cov = np.eye(4)
        cov[0, 1] = .5
        with self.assertRaises(ValueError):
            GaussianBelief(np.zeros(4), cov)
        with self.assertRaises(ValueError):
            GaussianBelief(np.zeros(4), -np.eye(4))

    def test_tolerance(self):
        """Test beliefs and square roots share one PSD tolerance."""

        cov = np.diag([1., -.1 * PSD_TOL, .5, 0.])
        GaussianBelief(np.zeros(4), cov)
        psd_sqrt(cov)

        cov = np.diag([1., -10 * PSD_TOL, .5, 0.])
        with self.assertRaises(ValueError):
            GaussianBelief(np.zeros(4), cov)
        with self.assertRaises(NumericalFailure):
            psd_sqrt(cov)

    def test_as_state(self):
        """Test state validation."""

        npt.assert_array_equal(as_state([1, 2, 3, 4]), [1., 2., 3., 4.])

        with self.assertRaises(ValueError):
            as_state([0., np.nan, 0., 0.])
        with self.assertRaises(ValueError):
            as_state(np.zeros(5))


if __name__ == '__main__':
    ut.main()
