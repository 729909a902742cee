#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Baseline IF Estimators
======================

Reference estimators for comparison with the state-space approach:

- Hilbert transform: IF as the derivative of the unwrapped phase of the
  analytic signal
- Spectrogram: IF as the first moment of the short-time power spectrum
- Legacy state space: the joint model with the chirp dispersion pinned
  to :math:`b = 0`

"""
from __future__ import print_function, division

import logging

from dataclasses import dataclass

import numpy as np

from scipy import signal

from .bijections import Softplus
from .exceptions import UnsupportedInput
from .filters import extract_if, gaussian_filter, gaussian_smoother
from .mle import fit
from .quadrature import GaussHermite

__all__ = ['BaselineEstimate', 'METHODS', 'hilbert_if', 'spectrogram_if',
           'legacy_ss_if', 'rmse']

logger = logging.getLogger(__name__)

METHODS = ('hilbert', 'spectrogram', 'legacy_ss')


@dataclass
class BaselineEstimate(object):

    """IF estimate of a baseline method.

    Attributes
    ----------
    t : (T, ) array
    if_est : (T, ) array
        Hz
    method : str
        One of METHODS
    edge : (T, ) bool array
        Samples affected by one-sided differences or clamped
        interpolation
    params : ModelParams or None
        Fitted parameters of the legacy model

    """

    t: np.ndarray
    if_est: np.ndarray
    method: str
    edge: np.ndarray = None
    params: object = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError('Unknown method: {}'.format(self.method))
        if self.edge is None:
            self.edge = np.zeros(np.shape(self.t), dtype=bool)

    def __len__(self):
        return np.size(self.t)


def _even_samples(series, fs, min_len):
    if len(series) < min_len:
        raise UnsupportedInput('Need at least {} samples, got {}'
                               .format(min_len, len(series)))
    if not series.is_even():
        raise UnsupportedInput('Spectral baselines need evenly sampled '
                               'input!')
    if np.any(np.isnan(series.y)):
        raise UnsupportedInput('Spectral baselines need every measurement!')
    return series.sampling_rate() if fs is None else float(fs)


def hilbert_if(series, fs=None):
    """IF from the analytic signal.

    Parameters
    ----------
    series : TimeSeries
        Evenly sampled, at least 8 samples
    fs : float
        Sampling rate in Hz. None to infer from the timestamps

    Returns
    -------
    BaselineEstimate

    Raises
    ------
    UnsupportedInput
        For uneven sampling or missing measurements

    """
    fs = _even_samples(series, fs, 8)
    phase = np.unwrap(np.angle(signal.hilbert(series.y)))
    if_est = np.gradient(phase) * fs / (2 * np.pi)
    edge = np.zeros(len(series), dtype=bool)
    edge[[0, -1]] = True
    return BaselineEstimate(t=series.t, if_est=if_est, method='hilbert',
                            edge=edge)


def spectrogram_if(series, fs=None, window_len=450, overlap=449):
    """IF as the first moment of the spectrogram.

    Power spectra of Hann-windowed frames; the IF of a frame is the
    power-weighted mean over the positive frequencies. Frames sit at the
    window centres and are linearly interpolated back to the
    measurement times.

    Parameters
    ----------
    series : TimeSeries
        Evenly sampled
    fs : float
        Sampling rate in Hz. None to infer from the timestamps
    window_len : int
        Frame length in samples, at most the series length
    overlap : int
        Samples shared by consecutive frames, below window_len

    Returns
    -------
    BaselineEstimate
        Samples outside the span of frame centres are flagged as edges

    """
    if not 0 <= overlap < window_len:
        raise ValueError('Need 0 <= overlap < window_len!')
    fs = _even_samples(series, fs, window_len)
    freqs, times, power = signal.spectrogram(series.y, fs=fs, window='hann',
                                             nperseg=window_len,
                                             noverlap=overlap)
    band = freqs > 0
    total = power[band].sum(axis=0)
    frame_if = np.where(total > 0, freqs[band].dot(power[band])
                        / np.where(total > 0, total, 1.), fs / 4)
    frame_t = series.t[0] + times
    if_est = np.interp(series.t, frame_t, frame_if)
    edge = (series.t < frame_t[0]) | (series.t > frame_t[-1])
    return BaselineEstimate(t=series.t, if_est=if_est, method='spectrogram',
                            edge=edge)


def legacy_ss_if(series, bij=None, rule=None, starts=None,
                 time_mode='discrete', n_workers=1):
    """Smoothed IF of the joint model with deterministic chirp dynamics.

    Fits the remaining parameters by maximum likelihood with b pinned
    to zero and smooths with the fitted parameters.

    Parameters
    ----------
    series : TimeSeries
    bij : Bijection
    rule : QuadratureRule
    starts : list of ModelParams
    time_mode : str
    n_workers : int

    Returns
    -------
    BaselineEstimate
        The fitted parameters are attached as `params`

    """
    bij = Softplus() if bij is None else bij
    rule = GaussHermite() if rule is None else rule
    result = fit(series, bij=bij, rule=rule, starts=starts, pin={'b': 0.},
                 time_mode=time_mode, n_workers=n_workers)
    run = gaussian_filter(series, result.params, bij=bij, rule=rule,
                          time_mode=time_mode)
    smoothed = gaussian_smoother(run, result.params, bij=bij, rule=rule)
    estimate = extract_if(smoothed, bij)
    return BaselineEstimate(t=series.t, if_est=estimate.if_mean,
                            method='legacy_ss', params=result.params)


def rmse(estimate, truth, mask=None):
    """Root mean squared error.

    Parameters
    ----------
    estimate, truth : (T, ) arrays
    mask : (T, ) bool array
        Samples to include. None for all

    Returns
    -------
    float
        NaN when the estimate is not finite on the included samples

    """
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError('Estimate and truth differ in shape!')
    if mask is not None:
        estimate, truth = estimate[mask], truth[mask]
    if estimate.size == 0:
        raise ValueError('Nothing to compare!')
    if not np.all(np.isfinite(estimate)):
        return float('nan')
    return float(np.sqrt(np.mean((estimate - truth) ** 2)))
