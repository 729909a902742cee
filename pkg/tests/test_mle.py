#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Testing suite for maximum likelihood estimation.

"""
from __future__ import print_function, division

import os
import unittest as ut
import numpy as np
import numpy.testing as npt

from chirpgp import (Damped, FitFailed, Linearize, ModelParams,
                     NLL_SENTINEL, Reparam, Softplus, TimeSeries,
                     default_starts, extract_if, fd_gradient, fit,
                     gaussian_filter, gaussian_smoother, gen_benchmark, nll,
                     normal_logpdf, rmse, sample_prior_path)

SLOW = os.environ.get('CHIRPGP_SLOW') == '1'


class ReparamTestCase(ut.TestCase):

    """Test the unconstrained parameterisation."""

    def test_round_trip(self):
        """Test constrained -> unconstrained -> constrained."""

        params = ModelParams(lam=.02, b=8e-5, xi=.1, ell=1.7, sigma=3.,
                             m0v=-.4)
        reparam = Reparam()
        back = reparam.to_params(reparam.to_unconstrained(params))

        for name in ModelParams.names:
            self.assertAlmostEqual(getattr(back, name), getattr(params, name),
                                   delta=1e-12 * max(1, abs(getattr(params,
                                                                    name))))
        npt.assert_allclose(reparam.to_unconstrained(params)[:5],
                            np.log([.02, 8e-5, .1, 1.7, 3.]))

    def test_pin(self):
        """Test pinned parameters leave the vector."""

        reparam = Reparam(pin={'b': 0.})

        self.assertEqual(len(reparam), 5)
        self.assertNotIn('b', reparam.free)
        self.assertEqual(reparam.to_params(np.zeros(5)).b, 0.)

        with self.assertRaises(ValueError):
            Reparam(pin={'omega': 1.})
        with self.assertRaises(ValueError):
            reparam.to_params(np.zeros(6))


class ObjectiveTestCase(ut.TestCase):

    """Test the likelihood objective."""

    def setUp(self):
        _, series = gen_benchmark(seed=2)
        self.series = TimeSeries(series.t[:200], series.y[:200])
        self.uparams = Reparam().to_unconstrained(default_starts()[0])

    def test_nll(self):
        """Test agreement with the filter and determinism."""

        value = nll(self.uparams, self.series, rule=Linearize())
        run = gaussian_filter(self.series, Reparam().to_params(self.uparams),
                              rule=Linearize())

        self.assertEqual(value, run.nll)
        self.assertEqual(value, nll(self.uparams, self.series,
                                    rule=Linearize()))

    def test_sentinel(self):
        """Test invalid parameters map to the sentinel."""

        self.assertEqual(nll(np.full(6, np.inf), self.series), NLL_SENTINEL)
        self.assertEqual(nll(np.zeros(3), self.series), NLL_SENTINEL)

    def test_noise_limit(self):
        """Test the gain-free limit of a large noise variance."""

        xi = 1e8
        series = TimeSeries(np.arange(1, 51) * .01, np.zeros(50))
        uparams = Reparam().to_unconstrained(ModelParams(xi=xi))
        expected = -np.sum(normal_logpdf(0., 0., np.full(50, xi)))

        self.assertAlmostEqual(nll(uparams, series, rule=Linearize()),
                               expected, delta=1e-3)


class FitTestCase(ut.TestCase):

    """Test the optimiser with injected objectives."""

    def setUp(self):
        self.target = np.array([-1.5, -2., -1., .3, .7, 1.2])
        self.weights = np.array([1., 2., .5, 1., 3., 1.])
        self.series = TimeSeries([.1, .2], [0., 0.])

    def quadratic(self, x):
        return np.sum(self.weights * (x - self.target) ** 2)

    def test_fd_gradient(self):
        """Test finite differences on a quadratic."""

        x = np.array([.1, -.3, 2., 0., 5., -1.])
        exact = 2 * self.weights * (x - self.target)

        npt.assert_allclose(fd_gradient(self.quadratic, x), exact,
                            rtol=1e-6)

    def test_quadratic(self):
        """Test convergence to the minimiser of a convex bowl."""

        result = fit(self.series, objective=self.quadratic,
                     optimizer_opts={'gtol': 1e-10, 'ftol': 1e-15})
        reached = Reparam().to_unconstrained(result.params)

        npt.assert_allclose(reached, self.target, atol=1e-6)
        self.assertLess(result.nll, 1e-10)
        self.assertEqual(len(result.start_nlls), 6)
        self.assertTrue(all(result.nll <= value
                            for value in result.start_nlls))
        self.assertGreater(result.n_evaluations, 6)
        self.assertGreater(len(result.trace), 0)

    def test_pin(self):
        """Test pinned parameters stay fixed."""

        result = fit(self.series, objective=lambda x: np.sum(x ** 2),
                     pin={'b': 0.})

        self.assertEqual(result.params.b, 0.)
        npt.assert_allclose(result.params.lam, 1., atol=1e-4)

    def test_ties(self):
        """Test ties go to the lowest start index."""

        starts = [ModelParams(m0v=1.), ModelParams(m0v=1.)]
        result = fit(self.series, starts=starts,
                     objective=lambda x: np.sum(x ** 2))

        self.assertEqual(result.start_index, 0)

    def test_failure(self):
        """Test every start failing raises with diagnostics."""

        with self.assertRaises(FitFailed) as context:
            fit(self.series, objective=lambda x: NLL_SENTINEL,
                starts=default_starts()[:2])

        self.assertEqual(len(context.exception.diagnostics['starts']), 2)

        with self.assertRaises(ValueError):
            fit(self.series, starts=[])

    def test_default_starts(self):
        """Test the default multi-start grid."""

        starts = default_starts(Softplus())

        self.assertEqual(len(starts), 6)
        npt.assert_allclose(sorted({Softplus().forward(s.m0v)
                                    for s in starts}), [5., 10., 20.])
        self.assertEqual({s.ell for s in starts}, {.5, 1.5})
        self.assertTrue(all(s.sigma == 3. for s in starts))


@ut.skipUnless(SLOW, 'set CHIRPGP_SLOW=1 to run')
class SlowFitTestCase(ut.TestCase):

    """Parameter recovery on benchmark chirps."""

    def test_constant_amplitude(self):
        """Test small damping and dispersion for a constant amplitude."""

        truth, series = gen_benchmark(seed=0)
        result = fit(series)

        self.assertLess(result.params.lam, .1)
        self.assertLess(result.params.b, .05)

        run = gaussian_filter(series, result.params)
        smoothed = extract_if(gaussian_smoother(run, result.params))
        self.assertLess(rmse(smoothed.if_mean, truth.f_true), .12)

    def test_damped_amplitude(self):
        """Test recovered damping for a damped amplitude."""

        _, series = gen_benchmark(mode=Damped(), seed=0)
        result = fit(series)

        self.assertGreaterEqual(result.params.lam, .2)
        self.assertLessEqual(result.params.lam, .45)


@ut.skipUnless(SLOW, 'set CHIRPGP_SLOW=1 to run')
class SelfConsistencyTestCase(ut.TestCase):

    """Likelihood of the generating parameters."""

    def test_length_scale(self):
        """Test generating parameters beat a tripled length scale."""

        params = ModelParams(lam=.1, b=.3, xi=.01, ell=.3, sigma=1.5,
                             m0v=3.)
        wrong = params.replace(ell=.9)
        reparam = Reparam()
        grid = np.arange(1, 1001) * .005

        wins = 0
        for seed in range(20):
            chirp, _ = sample_prior_path(params, Softplus(), grid, seed=seed)
            noise = np.random.default_rng([seed, 1]).normal(size=grid.size)
            series = TimeSeries(grid, chirp + np.sqrt(params.xi) * noise)
            wins += nll(reparam.to_unconstrained(params), series) \
                < nll(reparam.to_unconstrained(wrong), series)

        self.assertGreaterEqual(wins, 19)


if __name__ == '__main__':
    ut.main()
