#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Testing suite for the joint chirp/IF model.

"""
from __future__ import print_function, division

import unittest as ut
import numpy as np
import numpy.testing as npt
import scipy.linalg as scl

from scipy.integrate import quad_vec
from scipy.special import gamma, kv

from chirpgp import (ModelParams, Softplus, Exp, H, H_V, drift,
                     drift_jacobian, harmonic_drift_matrix,
                     harmonic_kernel, harmonic_noise_cov,
                     harmonic_transition, initial_belief, lcd_cov,
                     lcd_jacobian, lcd_mean, matern32_dispersion,
                     matern32_drift_matrix, matern32_kernel,
                     matern32_noise_cov, matern32_stationary_cov,
                     matern32_transition, dispersion_matrix)


def noise_by_quadrature(drift_mat, disp, dt):
    """Integral of exp(sA) B B^T exp(sA)^T over [0, dt]."""
    qmat = np.outer(disp, disp) if np.ndim(disp) == 1 else disp.dot(disp.T)

    def integrand(s):
        trans = scl.expm(s * drift_mat)
        return trans.dot(qmat).dot(trans.T)

    return quad_vec(integrand, 0., dt, epsabs=1e-13, epsrel=1e-11)[0]


class ModelParamsTestCase(ut.TestCase):

    """Test ModelParams."""

    def test_init(self):
        """Test validation."""

        params = ModelParams()

        self.assertEqual(params.names,
                         ('lam', 'b', 'xi', 'ell', 'sigma', 'm0v'))
        self.assertEqual(ModelParams(b=0.).b, 0.)

        for bad in [{'lam': -.1}, {'b': -1.}, {'xi': 0.}, {'ell': 0.},
                    {'sigma': -1.}, {'m0v': np.nan}, {'p0x': -1.}]:
            with self.assertRaises(ValueError):
                ModelParams(**bad)

    def test_dict(self):
        """Test conversion to and from dicts."""

        params = ModelParams(lam=.2, b=.3, xi=.4, ell=.5, sigma=.6, m0v=.7)

        self.assertNotIn('p0x', params.as_dict())
        self.assertEqual(ModelParams.from_dict(params.as_dict()), params)
        self.assertEqual(params.replace(p0x=2.).as_dict()['p0x'], 2.)

    def test_chirp_prior_var(self):
        """Test chirp block prior variance."""

        self.assertEqual(ModelParams(lam=.5, b=2.).chirp_prior_var(), 4.)
        self.assertEqual(ModelParams(lam=.5, b=.1).chirp_prior_var(), 1.)
        self.assertEqual(ModelParams(lam=0., b=.1).chirp_prior_var(), 1.)
        self.assertEqual(ModelParams(p0x=.3).chirp_prior_var(), .3)


class HarmonicTestCase(ut.TestCase):

    """Test the harmonic SDE."""

    def test_transition(self):
        """Test transition against the matrix exponential."""

        rng = np.random.default_rng(1)
        for _ in range(100):
            freq, dt, lam = rng.uniform(0, 20), rng.uniform(0, 1), \
                rng.uniform(0, 2)
            expected = scl.expm(dt * harmonic_drift_matrix(freq, lam))

            npt.assert_allclose(harmonic_transition(freq, dt, lam),
                                expected, atol=1e-10)

        trans = harmonic_transition(np.arange(5.), .1, .3)
        self.assertEqual(trans.shape, (5, 2, 2))

        with self.assertRaises(ValueError):
            harmonic_transition(1., -.1, .3)
        with self.assertRaises(ValueError):
            harmonic_transition(np.inf, .1, .3)

    def test_noise(self):
        """Test process noise against quadrature."""

        rng = np.random.default_rng(2)
        for _ in range(20):
            freq, dt = rng.uniform(0, 10), rng.uniform(0, 1)
            lam, b = rng.uniform(0, 2), rng.uniform(0, 2)
            expected = noise_by_quadrature(harmonic_drift_matrix(freq, lam),
                                           b * np.eye(2), dt)

            npt.assert_allclose(harmonic_noise_cov(dt, lam, b), expected,
                                rtol=1e-8, atol=1e-12)

        npt.assert_allclose(harmonic_noise_cov(.5, 0., 2.), 2. * np.eye(2))
        npt.assert_array_equal(harmonic_noise_cov(0., .5, 2.),
                               np.zeros((2, 2)))

    def test_kernel(self):
        """Test the stationary harmonic kernel."""

        lam, b, freq = .5, 1., 3.
        stat = b ** 2 / (2 * lam) * np.eye(2)

        npt.assert_allclose(harmonic_kernel(2., 2., freq, lam, b, stat), stat,
                            atol=1e-12)
        npt.assert_allclose(harmonic_kernel(1., 1.5, freq, lam, b, stat),
                            stat.dot(harmonic_transition(freq, .5, lam).T),
                            atol=1e-12)
        npt.assert_allclose(harmonic_kernel(1.5, 1., freq, lam, b, stat),
                            harmonic_kernel(1., 1.5, freq, lam, b, stat).T,
                            atol=1e-12)

    def test_kernel_grid(self):
        """Test the kernel from a non-stationary initial covariance."""

        freq, lam, b = .5, .1, .5
        p0x = 1.25 * np.eye(2)

        npt.assert_allclose(harmonic_kernel(0., 0., freq, lam, b, p0x), p0x)

        trans = harmonic_transition(freq, 1., lam)
        expected = trans.dot(p0x).dot(trans.T) + harmonic_noise_cov(1., lam,
                                                                     b)
        npt.assert_allclose(harmonic_kernel(1., 1., freq, lam, b, p0x),
                            expected, atol=1e-12)
        # 1.25 is the stationary variance b^2 / (2 lam)
        npt.assert_allclose(expected, p0x, atol=1e-12)

        p0x = np.array([[2., .3], [.3, .5]])
        grid = np.linspace(0., 2., 5)
        for t in grid:
            for t_prime in grid:
                npt.assert_allclose(
                    harmonic_kernel(t, t_prime, freq, lam, b, p0x),
                    harmonic_kernel(t_prime, t, freq, lam, b, p0x).T,
                    atol=1e-12)

    def test_norm(self):
        """Test undamped transitions preserve the norm."""

        rng = np.random.default_rng(5)
        for _ in range(20):
            x = rng.normal(size=2)
            trans = harmonic_transition(rng.uniform(0, 50), rng.uniform(0, 1),
                                        0.)

            self.assertAlmostEqual(np.linalg.norm(trans.dot(x)),
                                   np.linalg.norm(x), delta=1e-12)


class MaternTestCase(ut.TestCase):

    """Test the Matérn 3/2 SDE."""

    def test_transition(self):
        """Test closed-form transition against the matrix exponential."""

        rng = np.random.default_rng(3)
        for _ in range(100):
            dt, ell = rng.uniform(0, 2), rng.uniform(.2, 3)
            expected = scl.expm(dt * matern32_drift_matrix(ell))

            npt.assert_allclose(matern32_transition(dt, ell), expected,
                                atol=1e-8)

    def test_noise(self):
        """Test closed-form process noise against quadrature."""

        rng = np.random.default_rng(4)
        for _ in range(100):
            dt, ell = rng.uniform(0, 2), rng.uniform(.2, 3)
            sigma = rng.uniform(.5, 2)
            expected = noise_by_quadrature(matern32_drift_matrix(ell),
                                           matern32_dispersion(ell, sigma),
                                           dt)

            npt.assert_allclose(matern32_noise_cov(dt, ell, sigma), expected,
                                rtol=1e-8, atol=1e-8)

    def test_stationary(self):
        """Test the Lyapunov equation and the large-step limit."""

        ell, sigma = .7, 1.3
        drift_mat = matern32_drift_matrix(ell)
        disp = matern32_dispersion(ell, sigma)
        stat = matern32_stationary_cov(ell, sigma)

        npt.assert_allclose(drift_mat.dot(stat) + stat.dot(drift_mat.T)
                            + np.outer(disp, disp), np.zeros((2, 2)),
                            atol=1e-10)
        npt.assert_allclose(matern32_noise_cov(100., ell, sigma), stat,
                            atol=1e-12)

        for dt in [.01, .3, 2.]:
            trans = matern32_transition(dt, ell)

            npt.assert_allclose(trans.dot(stat).dot(trans.T)
                                + matern32_noise_cov(dt, ell, sigma), stat,
                                atol=1e-10)

    def test_semigroup(self):
        """Test transitions and process noise compose over steps."""

        rng = np.random.default_rng(6)
        for _ in range(50):
            dt1, dt2 = rng.uniform(0, 1.5, size=2)
            ell, sigma = rng.uniform(.2, 3), rng.uniform(.5, 2)
            trans2 = matern32_transition(dt2, ell)

            npt.assert_allclose(matern32_transition(dt1, ell).dot(trans2),
                                matern32_transition(dt1 + dt2, ell),
                                atol=1e-10)
            npt.assert_allclose(
                trans2.dot(matern32_noise_cov(dt1, ell, sigma)).dot(trans2.T)
                + matern32_noise_cov(dt2, ell, sigma),
                matern32_noise_cov(dt1 + dt2, ell, sigma), atol=1e-10)

    def test_kernel(self):
        """Test kernel against the state-space form and the Bessel form."""

        ell, sigma = 1.4, .9
        stat = matern32_stationary_cov(ell, sigma)
        lags = np.linspace(.01, 3, 30)
        cov = [matern32_transition(lag, ell).dot(stat)[0, 0] for lag in lags]

        npt.assert_allclose(matern32_kernel(0., lags, ell, sigma), cov)

        nu = 1.5
        arg = np.sqrt(2 * nu) * lags / ell
        bessel = sigma ** 2 * 2 ** (1 - nu) / gamma(nu) * arg ** nu \
            * kv(nu, arg)

        npt.assert_allclose(matern32_kernel(lags, 0., ell, sigma), bessel,
                            rtol=1e-10)
        self.assertEqual(matern32_kernel(1., 1., ell, sigma), sigma ** 2)


class JointModelTestCase(ut.TestCase):

    """Test the joint SDE and its LCD discretisation."""

    def setUp(self):
        self.params = ModelParams(lam=.3, b=.4, xi=.1, ell=.8, sigma=1.2,
                                  m0v=1.)
        self.bij = Softplus()

    def test_operators(self):
        """Test measurement operators and the dispersion."""

        npt.assert_array_equal(H, [0, 1, 0, 0])
        npt.assert_array_equal(H_V, [0, 0, 1, 0])

        disp = dispersion_matrix(self.params)
        self.assertEqual(disp.shape, (4, 3))
        npt.assert_array_equal(disp[:2, :2], .4 * np.eye(2))

    def test_initial_belief(self):
        """Test prior at the time origin."""

        belief = initial_belief(self.params)

        npt.assert_array_equal(belief.mean, [0., 0., 1., 0.])
        npt.assert_allclose(belief.cov[2:, 2:],
                            matern32_stationary_cov(.8, 1.2))
        npt.assert_allclose(belief.cov[:2, :2], np.eye(2))
        npt.assert_array_equal(belief.cov[:2, 2:], np.zeros((2, 2)))

    def test_drift(self):
        """Test drift and its Jacobian."""

        u = np.array([.3, -.7, .2, -.4])
        freq = self.bij.forward(u[2])
        expected = np.concatenate(
            (harmonic_drift_matrix(freq, .3).dot(u[:2]),
             matern32_drift_matrix(.8).dot(u[2:])))

        npt.assert_allclose(drift(u, self.params, self.bij), expected)

        states = np.random.normal(size=(5, 3, 4))
        self.assertEqual(drift(states, self.params, self.bij).shape,
                         (5, 3, 4))

        step = 1e-6
        fdiff = np.column_stack([
            (drift(u + step * e, self.params, self.bij)
             - drift(u - step * e, self.params, self.bij)) / (2 * step)
            for e in np.eye(4)])

        npt.assert_allclose(drift_jacobian(u, self.params, self.bij), fdiff,
                            atol=1e-7)

    def test_lcd(self):
        """Test LCD mean, Jacobian and covariance."""

        dt = .05
        for bij in [Softplus(), Exp()]:
            u = np.array([1.1, -.2, .5, .3])
            freq = bij.forward(u[2])
            expected = np.concatenate(
                (harmonic_transition(freq, dt, .3).dot(u[:2]),
                 matern32_transition(dt, .8).dot(u[2:])))

            npt.assert_allclose(lcd_mean(u, dt, self.params, bij), expected)

            states = np.random.normal(size=(7, 4))
            batch = lcd_mean(states, dt, self.params, bij)
            for state, out in zip(states, batch):
                npt.assert_allclose(lcd_mean(state, dt, self.params, bij),
                                    out)

            step = 1e-6
            fdiff = np.column_stack([
                (lcd_mean(u + step * e, dt, self.params, bij)
                 - lcd_mean(u - step * e, dt, self.params, bij)) / (2 * step)
                for e in np.eye(4)])

            npt.assert_allclose(lcd_jacobian(u, dt, self.params, bij), fdiff,
                                atol=1e-7)

        npt.assert_allclose(lcd_mean(u, 0., self.params, self.bij), u)
        npt.assert_array_equal(lcd_cov(0., self.params), np.zeros((4, 4)))

        cov = lcd_cov(dt, self.params)
        npt.assert_allclose(cov[:2, :2], harmonic_noise_cov(dt, .3, .4))
        npt.assert_allclose(cov[2:, 2:], matern32_noise_cov(dt, .8, 1.2))

        with self.assertRaises(ValueError):
            lcd_mean(u, -1., self.params, self.bij)

    def test_lcd_small_step(self):
        """Test the LCD mean approaches the drift for small steps."""

        rng = np.random.default_rng(7)
        dt = 1e-7
        for _ in range(20):
            u = rng.normal(size=4)

            npt.assert_allclose(
                (lcd_mean(u, dt, self.params, self.bij) - u) / dt,
                drift(u, self.params, self.bij), atol=1e-4)

    def test_lcd_cov_psd(self):
        """Test the LCD process noise is a covariance."""

        rng = np.random.default_rng(8)
        for _ in range(50):
            params = ModelParams(lam=rng.uniform(0, 2), b=rng.uniform(0, 2),
                                 ell=rng.uniform(.2, 3),
                                 sigma=rng.uniform(.5, 2))
            cov = lcd_cov(rng.uniform(0, 1), params)

            npt.assert_array_equal(cov, cov.T)
            self.assertGreaterEqual(np.linalg.eigvalsh(cov).min(),
                                    -1e-12 * max(1., np.abs(cov).max()))


if __name__ == '__main__':
    ut.main()
