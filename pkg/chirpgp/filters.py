#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Gaussian Filters and Smoothers
==============================

Gaussian filtering and Rauch--Tung--Striebel smoothing of the joint
chirp/IF model. The Gaussian integrals are approximated by a
`QuadratureRule`; prediction either uses the LCD discretisation
(``time_mode='discrete'``) or integrates the Gaussian moment ODEs of the
SDE with a classical Runge--Kutta scheme (``time_mode='cd'``).

The negative log-likelihood accumulated by the filter is

.. math::

    -\sum_{k=1}^T \log N(y_k \mid H m_k^-, S_k).

"""
from __future__ import print_function, division

import logging

from dataclasses import dataclass

import numpy as np
import numpy.linalg as npl
import scipy.linalg as scl

from .bijections import Softplus
from .exceptions import NumericalFailure
from .gaussian import PSD_TOL, GaussianBelief, normal_logpdf, symmetrize
from .model import (H_V, dispersion_matrix, drift, drift_jacobian,
                    initial_belief, lcd_cov, lcd_jacobian, lcd_mean)
from .quadrature import GaussHermite

__all__ = ['FilterRun', 'SmootherRun', 'IfEstimate', 'predict', 'update',
           'cd_predict', 'gaussian_filter', 'gaussian_smoother',
           'extract_if', 'TIME_MODES']

logger = logging.getLogger(__name__)

TIME_MODES = ('discrete', 'cd')

# Index of the chirp in the state (H = e_2) and of V (H_V = e_3).
_CHIRP = 1
_V = int(np.argmax(H_V))


@dataclass
class FilterRun(object):

    """Output of `gaussian_filter`.

    Attributes
    ----------
    t : (T, ) array
        Measurement times
    dt : (T, ) array
        Step lengths; dt[0] spans the time origin to t[0]
    m_pred, P_pred : (T, 4), (T, 4, 4) arrays
        Predicted beliefs
    m, P : (T, 4), (T, 4, 4) arrays
        Filtered beliefs
    S : (T, ) array
        Innovation variances
    loglik : (T, ) array
        Per-step log predictive densities (zero without measurement)
    nll : float
        Negative log-likelihood
    prior : GaussianBelief
        Belief at the time origin
    time_mode : str
        'discrete' or 'cd'
    n_substeps : int
        Runge--Kutta steps per interval in 'cd' mode

    """

    t: np.ndarray
    dt: np.ndarray
    m_pred: np.ndarray
    P_pred: np.ndarray
    m: np.ndarray
    P: np.ndarray
    S: np.ndarray
    loglik: np.ndarray
    nll: float
    prior: GaussianBelief
    time_mode: str = 'discrete'
    n_substeps: int = 10

    def __len__(self):
        return self.t.size

    def predicted(self, k):
        return GaussianBelief(self.m_pred[k], self.P_pred[k])

    def filtered(self, k):
        return GaussianBelief(self.m[k], self.P[k])


@dataclass
class SmootherRun(object):

    """Output of `gaussian_smoother`.

    Attributes
    ----------
    t : (T, ) array
    m, P : (T, 4), (T, 4, 4) arrays
        Smoothed beliefs

    """

    t: np.ndarray
    m: np.ndarray
    P: np.ndarray

    def __len__(self):
        return self.t.size

    def smoothed(self, k):
        return GaussianBelief(self.m[k], self.P[k])


@dataclass
class IfEstimate(object):

    """IF and chirp estimates with a 95% band for the IF.

    Attributes
    ----------
    t : (T, ) array
    if_mean : (T, ) array
        g(H_V m)
    if_lower, if_upper : (T, ) arrays
        g(H_V m -/+ 1.96 sd)
    chirp_mean, chirp_std : (T, ) arrays
        Mean and standard deviation of H U

    """

    t: np.ndarray
    if_mean: np.ndarray
    if_lower: np.ndarray
    if_upper: np.ndarray
    chirp_mean: np.ndarray
    chirp_std: np.ndarray

    def __len__(self):
        return self.t.size


def _check_psd(cov, what):
    eigmin = npl.eigvalsh(cov).min()
    if eigmin < -PSD_TOL * max(1., np.abs(cov).max()):
        raise NumericalFailure('{} covariance lost positive '
                               'semidefiniteness (eigenvalue {:.3e})'
                               .format(what, eigmin))


def _lcd_functions(dt, params, bij):
    return (lambda u: lcd_mean(u, dt, params, bij),
            lambda u: lcd_jacobian(u, dt, params, bij))


def _drift_functions(params, bij):
    return (lambda u: drift(u, params, bij),
            lambda u: drift_jacobian(u, params, bij))


def _predict(m, P, dt, params, bij, rule):
    """Discrete LCD prediction on raw arrays.

    Returns
    -------
    (4, ) array, (4, 4) array, (4, 4) array
        Predicted mean, covariance and Cov[U_{k-1}, Phi(U_{k-1})]

    """
    func, jac = _lcd_functions(dt, params, bij)
    mp, Pp, cross = rule.moments(m, P, func, jac)
    Pp = symmetrize(Pp + lcd_cov(dt, params))
    _check_psd(Pp, 'predicted')
    return mp, Pp, cross


def _cd_propagate(m, P, dt, params, bij, rule, n_substeps, with_cross=False):
    """Integrate the Gaussian moment ODEs over dt with RK4.

    dm/dt = E[a(U)], dP/dt = C_a + C_a^T + B B^T with
    C_a = Cov[U, a(U)]. With ``with_cross`` the cross covariance
    C(t) = Cov[U(t_0), U(t)] is carried along, dC/dt = C A^T, where A is
    the rule's regression matrix of the drift.

    """
    if n_substeps < 1:
        raise ValueError('Need at least one substep!')
    func, jac = _drift_functions(params, bij)
    bbt = dispersion_matrix(params)
    bbt = bbt.dot(bbt.T)
    h = dt / n_substeps

    def rates(state):
        mean, cov, cross = state
        dm, _, cov_a = rule.moments(mean, cov, func, jac)
        dP = cov_a + cov_a.T + bbt
        if not with_cross:
            return dm, dP, None
        reg = rule.regression(mean, cov, cov_a, jac)
        return dm, dP, cross.dot(reg.T)

    def shift(state, slope, scale):
        mean, cov, cross = state
        new_cross = None if cross is None else cross + scale * slope[2]
        return (mean + scale * slope[0],
                symmetrize(cov + scale * slope[1]), new_cross)

    state = (m, P, P.copy() if with_cross else None)
    if dt == 0:
        return state
    for _ in range(n_substeps):
        k1 = rates(state)
        k2 = rates(shift(state, k1, h / 2))
        k3 = rates(shift(state, k2, h / 2))
        k4 = rates(shift(state, k3, h))
        slope = tuple(None if a is None else (a + 2 * b + 2 * c + d) / 6
                      for a, b, c, d in zip(k1, k2, k3, k4))
        state = shift(state, slope, h)
        _check_psd(state[1], 'moment ODE')
    return state


def _update(mp, Pp, y, xi):
    """Scalar Kalman update in Joseph form on raw arrays.

    Returns
    -------
    (4, ) array, (4, 4) array, float, float
        Filtered mean and covariance, innovation variance and
        log N(y | H m^-, S)

    """
    var = Pp[_CHIRP, _CHIRP]
    if var < -PSD_TOL * max(1., np.abs(Pp).max()):
        raise NumericalFailure('predicted chirp variance {:.3e} is negative'
                               .format(var))
    S = max(var, 0.) + xi
    if not S > 0:
        raise NumericalFailure('innovation variance {} is not positive'
                               .format(S))
    if np.isnan(y):
        return mp, Pp, S, 0.
    gain = Pp[:, _CHIRP] / S
    m = mp + gain * (y - mp[_CHIRP])
    joseph = np.eye(mp.size)
    joseph[:, _CHIRP] -= gain
    P = joseph.dot(Pp).dot(joseph.T) + xi * np.outer(gain, gain)
    return m, symmetrize(P), S, normal_logpdf(y, mp[_CHIRP], S)


def predict(belief, dt, params, bij, rule):
    """One LCD prediction step.

    Parameters
    ----------
    belief : GaussianBelief
        Filtered belief at the start of the step
    dt : float
        Step length
    params : ModelParams
    bij : Bijection
    rule : QuadratureRule

    Returns
    -------
    GaussianBelief

    Raises
    ------
    NumericalFailure
        If the predicted covariance is not positive semidefinite

    """
    if dt < 0:
        raise ValueError('dt must be nonnegative!')
    mp, Pp, _ = _predict(belief.mean, belief.cov, dt, params, bij, rule)
    return GaussianBelief(mp, Pp)


def cd_predict(belief, dt, params, bij, rule, n_substeps=10):
    """One continuous-discrete prediction step.

    Integrates the mean and covariance ODEs of the SDE over dt with
    n_substeps classical fourth-order Runge--Kutta steps, evaluating the
    expectations with the given rule.

    Returns
    -------
    GaussianBelief

    """
    if dt < 0:
        raise ValueError('dt must be nonnegative!')
    m, P, _ = _cd_propagate(belief.mean, belief.cov, dt, params, bij, rule,
                            n_substeps)
    return GaussianBelief(m, P)


def update(pred_belief, y, xi):
    """Measurement update with H = [0, 1, 0, 0].

    Parameters
    ----------
    pred_belief : GaussianBelief
        Predicted belief
    y : float
        Measurement
    xi : float
        Measurement-noise variance

    Returns
    -------
    GaussianBelief
        Filtered belief
    float
        log N(y | H m^-, S)

    Raises
    ------
    NumericalFailure
        If the predicted chirp variance is negative beyond `PSD_TOL`

    """
    if xi <= 0:
        raise ValueError('Noise variance must be positive!')
    m, P, _, logpdf = _update(pred_belief.mean, pred_belief.cov, y, xi)
    return GaussianBelief(m, P), logpdf


def gaussian_filter(series, params, bij=None, rule=None,
                    time_mode='discrete', n_substeps=10, prior=None, t0=0.):
    """Gaussian filter over a time series.

    Parameters
    ----------
    series : TimeSeries
        Measurements; NaN values are prediction-only steps
    params : ModelParams
    bij : Bijection
        None for `Softplus`
    rule : QuadratureRule
        None for `GaussHermite` of order 3
    time_mode : str
        'discrete' (LCD) or 'cd' (moment ODEs)
    n_substeps : int
        Runge--Kutta steps per interval in 'cd' mode
    prior : GaussianBelief or None
        Belief at t0. None for `initial_belief`
    t0 : float
        Time origin; the first prediction spans (t0, t_1]

    Returns
    -------
    FilterRun

    Raises
    ------
    NumericalFailure
        Tagged with the index of the failing step

    """
    bij = Softplus() if bij is None else bij
    rule = GaussHermite() if rule is None else rule
    if time_mode not in TIME_MODES:
        raise ValueError('Unknown time mode: {}'.format(time_mode))
    if prior is None:
        prior = initial_belief(params)
    dts = np.diff(np.concatenate(([t0], series.t)))
    if dts[0] < 0:
        raise ValueError('Measurements must not precede the time origin!')

    nobs = len(series)
    m_pred, m_filt = np.empty((nobs, 4)), np.empty((nobs, 4))
    P_pred, P_filt = np.empty((nobs, 4, 4)), np.empty((nobs, 4, 4))
    innov, loglik = np.empty(nobs), np.empty(nobs)

    m, P = prior.mean, prior.cov
    for k in range(nobs):
        try:
            if time_mode == 'discrete':
                mp, Pp, _ = _predict(m, P, dts[k], params, bij, rule)
            else:
                mp, Pp, _ = _cd_propagate(m, P, dts[k], params, bij, rule,
                                          n_substeps)
            m, P, innov[k], loglik[k] = _update(mp, Pp, series.y[k],
                                                 params.xi)
        except NumericalFailure as err:
            raise err.at_step(k)
        except (npl.LinAlgError, FloatingPointError) as err:
            raise NumericalFailure(str(err), step=k)
        m_pred[k], P_pred[k], m_filt[k], P_filt[k] = mp, Pp, m, P

    return FilterRun(t=series.t, dt=dts, m_pred=m_pred, P_pred=P_pred,
                     m=m_filt, P=P_filt, S=innov, loglik=loglik,
                     nll=-float(loglik.sum()), prior=prior,
                     time_mode=time_mode, n_substeps=n_substeps)


def _smoother_gain(cross, P_pred, step):
    """G = D (P^-)^{-1} through a symmetric factorisation."""
    try:
        factor = scl.cho_factor(P_pred)
        return scl.cho_solve(factor, cross.T).T
    except scl.LinAlgError:
        pass
    try:
        return scl.solve(P_pred, cross.T, assume_a='sym').T
    except (scl.LinAlgError, ValueError) as err:
        raise NumericalFailure('singular predicted covariance: {}'
                               .format(err), step=step)


def gaussian_smoother(filter_run, params, bij=None, rule=None):
    """Rauch--Tung--Striebel smoother on top of a filter run.

    The cross covariance D_{k+1} = Cov[U_k, Phi(U_k)] is computed with
    the same rule as the filter; for continuous-discrete runs it is
    integrated along with the moment ODEs.

    Parameters
    ----------
    filter_run : FilterRun
    params : ModelParams
    bij : Bijection
    rule : QuadratureRule

    Returns
    -------
    SmootherRun
        The last smoothed belief equals the last filtered belief

    """
    bij = Softplus() if bij is None else bij
    rule = GaussHermite() if rule is None else rule
    run = filter_run
    ms, Ps = run.m.copy(), run.P.copy()
    for k in range(len(run) - 2, -1, -1):
        dt = run.dt[k + 1]
        try:
            if run.time_mode == 'discrete':
                func, jac = _lcd_functions(dt, params, bij)
                _, _, cross = rule.moments(run.m[k], run.P[k], func, jac)
            else:
                _, _, cross = _cd_propagate(run.m[k], run.P[k], dt, params,
                                            bij, rule, run.n_substeps,
                                            with_cross=True)
        except NumericalFailure as err:
            raise err.at_step(k)
        gain = _smoother_gain(cross, run.P_pred[k + 1], k)
        ms[k] = run.m[k] + gain.dot(ms[k + 1] - run.m_pred[k + 1])
        Ps[k] = symmetrize(run.P[k] + gain.dot(
            Ps[k + 1] - run.P_pred[k + 1]).dot(gain.T))
    return SmootherRun(t=run.t, m=ms, P=Ps)


def extract_if(run, bij=None):
    """IF estimates from a filter or smoother run.

    The band maps the 95% interval of the V marginal through the
    monotone bijection.

    Parameters
    ----------
    run : FilterRun or SmootherRun
    bij : Bijection

    Returns
    -------
    IfEstimate

    """
    bij = Softplus() if bij is None else bij
    mean_v = run.m[:, _V]
    std_v = np.sqrt(np.clip(run.P[:, _V, _V], 0., None))
    return IfEstimate(t=run.t,
                      if_mean=bij.forward(mean_v),
                      if_lower=bij.forward(mean_v - 1.96 * std_v),
                      if_upper=bij.forward(mean_v + 1.96 * std_v),
                      chirp_mean=run.m[:, _CHIRP],
                      chirp_std=np.sqrt(np.clip(run.P[:, _CHIRP, _CHIRP],
                                                0., None)))
