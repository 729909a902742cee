#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Error Bounds
============

Mean-square error bound of the Gaussian filter's IF estimate in the
pre-image space of the bijection,

.. math::

    E_k = \mathbb{E}|g^{-1}(f_k) - H_V m_k|^2,

which satisfies the recursion :math:`E_k \le 3 z(\Delta_k) E_{k-1} +
\gamma + \zeta_k` with :math:`E_0 = e_0`, where

.. math::

    \gamma = 3 c + \frac{6 c_{\bar P}}{(c_\Sigma + \Xi)^2}, \qquad
    \zeta_k = (2 c_K)^k \frac{3 c_{\bar P} (\|m_0\|^2 + \mathrm{tr} P_0)}
    {(c_\Sigma + \Xi)^2} + \frac{3 c_{\bar P}}{(c_\Sigma + \Xi)^2}
    \Big(\frac{2 c_{\bar P} (1 + \Xi)}{(c_\Sigma + \Xi)^2} + c_P\Big)
    \sum_{j=0}^{k-1} (2 c_K)^j.

Here :math:`c_P` bounds the trace of the filtering covariances,
:math:`c_{\bar P}` bounds the squared spectral norm of the predicted
covariances, :math:`c_\Sigma` is the smallest chirp process-noise
variance and :math:`c_K` bounds :math:`\|I - K_k H\|^2`. The IF prior
enters through :math:`z` and :math:`c`, which must satisfy

.. math::

    |g^{-1}(f_k) - \bar H_V e^{\Delta_k M} x|^2 \le z(\Delta_k)
    |g^{-1}(f_{k-1}) - \bar H_V x|^2 + c

for all x.

"""
from __future__ import print_function, division

import logging

from dataclasses import dataclass, field

import numpy as np
import numpy.linalg as npl

from .bijections import Softplus
from .exceptions import PreconditionViolated
from .model import harmonic_noise_var, lcd_mean
from .quadrature import GaussHermite

__all__ = ['BoundConstants', 'BoundReport', 'gamma_const', 'zeta_k',
           'error_bound', 'bound_series', 'corollary_bound', 'lemma1_check',
           'extract_constants', 'empirical_vs_bound']

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundConstants(object):

    """Constants entering the error bound.

    Attributes
    ----------
    c_z : float
        Constant growth factor z, used when no per-step values are given
    c : float
        Offset of the IF regularity condition
    c_P : float
        Bound on tr P_k
    c_Pbar : float
        Bound on the squared spectral norm of P_k^-
    c_Sigma : float
        Smallest chirp process-noise variance over the steps
    xi : float
        Measurement-noise variance
    c_K : float or None
        Bound on the squared norm of I - K H. None to derive it from
        c_Pbar, c_Sigma and xi
    e0 : float
        Initial error
    m0_norm_sq : float
        Squared norm of the initial mean
    trace_P0 : float
        Trace of the initial covariance

    """

    c_z: float = 0.
    c: float = 0.
    c_P: float = 0.
    c_Pbar: float = 0.
    c_Sigma: float = 0.
    xi: float = 0.
    c_K: float = None
    e0: float = 0.
    m0_norm_sq: float = 0.
    trace_P0: float = 0.

    def __post_init__(self):
        for name in ('c_z', 'c', 'c_P', 'c_Pbar', 'c_Sigma', 'xi', 'c_K',
                     'e0', 'm0_norm_sq', 'trace_P0'):
            value = getattr(self, name)
            if value is None:
                continue
            value = float(value)
            if not value >= 0:
                raise ValueError('Constant {} must be nonnegative!'
                                 .format(name))
            object.__setattr__(self, name, value)

    def noise_floor(self):
        """c_Sigma + xi, the lower bound on the innovation variance."""
        floor = self.c_Sigma + self.xi
        if floor <= 0:
            raise ValueError('Need c_Sigma + xi > 0!')
        return floor

    def gain_sq(self):
        """Bound c_Pbar / (c_Sigma + xi)^2 on the squared gain norm.

        Zero when c_Pbar is zero, whatever the noise floor.

        """
        if self.c_Pbar == 0:
            return 0.
        return self.c_Pbar / self.noise_floor() ** 2

    def gain_const(self):
        """c_K, or the triangle bound (1 + ||K||)^2 when not supplied."""
        if self.c_K is not None:
            return self.c_K
        return (1 + np.sqrt(self.gain_sq())) ** 2

    def replace(self, **changes):
        values = dict(vars(self))
        values.update(changes)
        return BoundConstants(**values)

    def as_dict(self):
        return dict(vars(self))


@dataclass
class BoundReport(object):

    """Empirical mean-square IF error next to the bound.

    Attributes
    ----------
    t : (T, ) array
    empirical_mse : (T, ) array
        Mean over runs of |g^{-1}(f_k) - H_V m_k|^2
    bound : (T, ) array
        Bound at k = 1, ..., T
    constants : BoundConstants
    n_runs : int

    """

    t: np.ndarray
    empirical_mse: np.ndarray
    bound: np.ndarray
    constants: BoundConstants
    n_runs: int = 1
    holds: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        self.holds = self.empirical_mse <= self.bound

    def all_hold(self):
        return bool(np.all(self.holds))


def gamma_const(bc):
    """gamma = 3 c + 6 c_Pbar / (c_Sigma + xi)^2."""
    return 3 * bc.c + 6 * bc.gain_sq()


def _zeta_parts(bc):
    scale = 3 * bc.gain_sq()
    init = scale * (bc.m0_norm_sq + bc.trace_P0)
    drive = scale * (2 * bc.gain_sq() * (1 + bc.xi) + bc.c_P)
    return init, drive


def zeta_k(k, bc):
    """zeta_k of the error recursion, k >= 1."""
    if k < 1:
        raise ValueError('k must be at least 1!')
    init, drive = _zeta_parts(bc)
    ratio = np.float64(2 * bc.gain_const())
    out = 0.
    with np.errstate(over='ignore'):
        if init > 0:
            out += ratio ** k * init
        if drive > 0:
            out += drive * np.sum(ratio ** np.arange(k, dtype=float))
    return float(out)


def _growth(k, zs, bc):
    if zs is None:
        return np.full(k, bc.c_z)
    zs = np.asarray(zs, dtype=float)
    if zs.size < k:
        raise ValueError('Need {} growth factors, got {}'.format(k, zs.size))
    if np.any(zs < 0):
        raise ValueError('Growth factors must be nonnegative!')
    return zs[:k]


def error_bound(k, zs, bc):
    """Bound on E|g^{-1}(f_k) - H_V m_k|^2 after k steps.

    Evaluates

    .. math::

        e_0 \prod_{j=1}^k 3 z_j + \sum_{j=1}^k (\gamma + \zeta_{k-j+1})
        \prod_{i=1}^{j-1} 3 z_{k-i+1}

    with empty products equal to one.

    Parameters
    ----------
    k : int
        Step, at least 1
    zs : array_like or None
        Growth factors z(Delta_1), ..., z(Delta_k). None for the constant
        bc.c_z
    bc : BoundConstants

    Returns
    -------
    float

    """
    if k < 1:
        raise ValueError('k must be at least 1!')
    factors = 3 * _growth(k, zs, bc)
    gamma = gamma_const(bc)
    out = bc.e0 * np.prod(factors)
    prod = 1.
    for j in range(1, k + 1):
        if j > 1:
            prod *= factors[k - j + 1]
        out += (gamma + zeta_k(k - j + 1, bc)) * prod
    return float(out)


def bound_series(n, zs, bc):
    """Bounds at k = 1, ..., n through the error recursion.

    Returns
    -------
    (n, ) array

    """
    factors = 3 * _growth(n, zs, bc)
    gamma = gamma_const(bc)
    out = np.empty(n)
    prev = bc.e0
    with np.errstate(over='ignore', invalid='ignore'):
        for k in range(1, n + 1):
            prev = factors[k - 1] * prev + gamma + zeta_k(k, bc)
            out[k - 1] = prev
    return out


def corollary_bound(k, bc):
    """Contractive bound (3 c_z)^k e0 + (gamma + zeta_bar) / (1 - 3 c_z).

    Raises
    ------
    PreconditionViolated
        Unless c_K < 1/2 and c_z < 1/3

    """
    if k < 0:
        raise ValueError('k must be nonnegative!')
    if not bc.c_z < 1. / 3:
        raise PreconditionViolated('c_z < 1/3 violated (c_z = {:.6g})'
                                   .format(bc.c_z))
    c_k = bc.gain_const()
    if not c_k < .5:
        raise PreconditionViolated('c_K < 1/2 violated (c_K = {:.6g})'
                                   .format(c_k))
    gain_sq = bc.gain_sq()
    zeta_bar = 3 * gain_sq * (bc.m0_norm_sq + bc.trace_P0
                              + (2 * gain_sq * (1 + bc.xi) + bc.c_P)
                              / (1 - 2 * c_k))
    return float((3 * bc.c_z) ** k * bc.e0
                 + (gamma_const(bc) + zeta_bar) / (1 - 3 * bc.c_z))


def lemma1_check(mu, theta, params, bij=None, dt=1e-3, n_quad=5, tol=1e-8):
    """Compare E||Phi(U)||^2 under N(mu, theta) with ||mu||^2 + tr theta.

    The left side is a Gauss--Hermite sum; the squared norm of the
    conditional mean does not depend on v because the chirp block is a
    scaled rotation, so the sum is exact for n_quad >= 2.

    Parameters
    ----------
    mu : (4, ) array
    theta : (4, 4) array
        Positive semidefinite
    params : ModelParams
    bij : Bijection
    dt : float
    n_quad : int
        Quadrature points per dimension
    tol : float

    Returns
    -------
    lhs : float
    rhs : float
    holds : bool
        lhs <= rhs + tol

    """
    bij = Softplus() if bij is None else bij
    mu = np.asarray(mu, dtype=float)
    theta = np.asarray(theta, dtype=float)
    points, weights = GaussHermite(n_quad).sigma_points(mu, theta)
    phi = lcd_mean(points, dt, params, bij)
    lhs = float(weights.dot(np.sum(phi ** 2, axis=1)))
    rhs = float(mu.dot(mu) + np.trace(theta))
    holds = lhs <= rhs + tol
    if not holds:
        logger.warning('Conditional-mean norm bound fails: %.6g > %.6g '
                       '(dt=%g, ell=%g)', lhs, rhs, dt, params.ell)
    return lhs, rhs, holds


def extract_constants(runs, params, truth_if0=None, bij=None, c_z=1., c=0.,
                      c_K=None):
    """Constants observed in filter runs.

    c_P and c_Pbar are the maxima over runs and steps, c_Sigma the
    smallest chirp process-noise variance over the step lengths. The IF
    regularity constants c_z and c are not observable and are passed
    through.

    Parameters
    ----------
    runs : list of FilterRun
    params : ModelParams
        Parameters the runs were filtered with
    truth_if0 : float or None
        True IF at the time origin, for e0. None gives e0 = 0
    bij : Bijection
    c_z, c : float
    c_K : float or None

    Returns
    -------
    BoundConstants

    """
    bij = Softplus() if bij is None else bij
    if not runs:
        raise ValueError('Need at least one run!')
    c_P = max(np.trace(run.P, axis1=1, axis2=2).max() for run in runs)
    c_Pbar = max((npl.norm(run.P_pred, ord=2, axis=(1, 2)) ** 2).max()
                 for run in runs)
    c_Sigma = min(min(harmonic_noise_var(dt, params.lam, params.b)
                      for dt in run.dt) for run in runs)
    prior = runs[0].prior
    e0 = 0. if truth_if0 is None \
        else float((bij.inverse(truth_if0) - prior.mean[2]) ** 2)
    return BoundConstants(c_z=c_z, c=c, c_P=c_P, c_Pbar=c_Pbar,
                          c_Sigma=c_Sigma, xi=params.xi, c_K=c_K, e0=e0,
                          m0_norm_sq=float(prior.mean.dot(prior.mean)),
                          trace_P0=float(np.trace(prior.cov)))


def empirical_vs_bound(runs, truths, bc, bij=None, zs=None):
    """Monte-Carlo squared IF error in pre-image space against the bound.

    Parameters
    ----------
    runs : list of FilterRun
        Filter runs on a shared time grid
    truths : list of (T, ) arrays
        True IF at the run times
    bc : BoundConstants
    bij : Bijection
    zs : array_like or None
        Per-step growth factors. None for the constant bc.c_z

    Returns
    -------
    BoundReport

    """
    bij = Softplus() if bij is None else bij
    if len(runs) != len(truths) or not runs:
        raise ValueError('Need one truth per run!')
    grid = runs[0].t
    errors = []
    for run, truth in zip(runs, truths):
        if run.t.shape != grid.shape or not np.allclose(run.t, grid):
            raise ValueError('Runs must share a time grid!')
        errors.append((bij.inverse(np.asarray(truth)) - run.m[:, 2]) ** 2)
    report = BoundReport(t=grid, empirical_mse=np.mean(errors, axis=0),
                         bound=bound_series(grid.size, zs, bc),
                         constants=bc, n_runs=len(runs))
    if not report.all_hold():
        logger.warning('Empirical error exceeds the bound at %d of %d steps',
                       np.sum(~report.holds), grid.size)
    return report
