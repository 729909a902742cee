#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Simulation
==========

Synthetic benchmark chirps with the instantaneous frequency

.. math::

    f(t) = a b \cot(t) \csc(t) e^{-b \csc(t)} + c, \quad t \in (0, \pi),

sample paths of the joint chirp/IF prior via the LCD discretisation, and
Monte Carlo covariances of the chirp conditioned on a frequency path.

"""
from __future__ import print_function, division

from dataclasses import dataclass

import numpy as np

from .gaussian import psd_sqrt
from .model import (H, harmonic_noise_var, initial_belief, lcd_cov,
                    lcd_mean)

__all__ = ['TimeSeries', 'SyntheticTruth', 'AmplitudeMode', 'Constant',
           'Damped', 'OrnsteinUhlenbeck', 'get_amplitude', 'true_if',
           'true_phase', 'benchmark_grid', 'gen_benchmark',
           'sample_prior_path', 'conditional_cov_mc']


@dataclass(frozen=True)
class TimeSeries(object):

    """Scalar measurements at strictly increasing times.

    Attributes
    ----------
    t : (T, ) array
        Timestamps in seconds
    y : (T, ) array
        Measurements. NaN marks a timestamp without a measurement

    """

    t: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float).ravel()
        y = np.array(self.y, dtype=float).ravel()
        if t.size < 1 or t.size != y.size:
            raise ValueError('Need equally long, nonempty t and y!')
        if not np.all(np.isfinite(t)):
            raise ValueError('Timestamps must be finite!')
        if np.any(np.diff(t) <= 0):
            raise ValueError('Timestamps must be strictly increasing!')
        if np.any(np.isinf(y)):
            raise ValueError('Measurements must be finite or NaN!')
        t.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, 't', t)
        object.__setattr__(self, 'y', y)

    def __len__(self):
        return self.t.size

    def is_even(self, rtol=1e-6):
        """Whether the timestamps are evenly spaced."""
        if self.t.size < 2:
            return True
        steps = np.diff(self.t)
        return bool(np.allclose(steps, steps.mean(), rtol=rtol, atol=0))

    def sampling_rate(self):
        """Mean sampling frequency in Hz."""
        if self.t.size < 2:
            raise ValueError('Need two timestamps for a sampling rate!')
        return (self.t.size - 1) / (self.t[-1] - self.t[0])


@dataclass(frozen=True)
class SyntheticTruth(object):

    """Ground truth of a benchmark chirp.

    Attributes
    ----------
    t : (T, ) array
        Timestamps
    f_true : (T, ) array
        True IF in Hz
    phase : (T, ) array
        Phase in cycles
    alpha : (T, ) array
        Amplitude
    clean : (T, ) array
        Noiseless chirp alpha sin(2 pi phase)

    """

    t: np.ndarray
    f_true: np.ndarray
    phase: np.ndarray
    alpha: np.ndarray
    clean: np.ndarray


class AmplitudeMode(object):

    """Amplitude alpha(t) of a benchmark chirp."""

    name = None

    def get_name(self):
        return self.name

    def amplitude(self, t, rng):
        """Amplitude on the grid t.

        Parameters
        ----------
        t : (T, ) array
            Strictly increasing positive times
        rng : numpy.random.Generator
            Stream for random amplitudes

        Returns
        -------
        (T, ) array

        """
        raise NotImplementedError


class Constant(AmplitudeMode):

    """alpha(t) = 1."""

    name = 'constant'

    def amplitude(self, t, rng):
        return np.ones_like(t)


class Damped(AmplitudeMode):

    """alpha(t) = exp(-rate t)."""

    name = 'damped'

    def __init__(self, rate=.3):
        self.rate = rate

    def amplitude(self, t, rng):
        return np.exp(-self.rate * t)


class OrnsteinUhlenbeck(AmplitudeMode):

    """Random amplitude d alpha = -alpha dt + dW, simulated exactly.

    alpha(0) is drawn from the stationary law N(0, 1/2). Negative values
    are passed through as they are.

    Attributes
    ----------
    seed : int or None
        Own seed. None to use the stream handed in by the generator

    """

    name = 'ou'

    def __init__(self, seed=None):
        self.seed = seed

    def amplitude(self, t, rng):
        if self.seed is not None:
            rng = np.random.default_rng(self.seed)
        steps = np.diff(np.concatenate(([0.], t)))
        decay = np.exp(-steps)
        scale = np.sqrt(-np.expm1(-2 * steps) / 2)
        shocks = rng.standard_normal(t.size)
        out = np.empty_like(t)
        alpha = np.sqrt(.5) * rng.standard_normal()
        for k in range(t.size):
            alpha = decay[k] * alpha + scale[k] * shocks[k]
            out[k] = alpha
        return out


_AMPLITUDES = {'constant': Constant, 'damped': Damped,
               'ou': OrnsteinUhlenbeck}


def get_amplitude(name):
    """Amplitude mode by name ('constant', 'damped' or 'ou')."""
    try:
        return _AMPLITUDES[name.lower()]()
    except KeyError:
        raise ValueError('Unknown amplitude mode: {}'.format(name))


def _check_domain(t):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t >= np.pi):
        raise ValueError('Time must lie in the open interval (0, pi)!')
    return t


def true_if(t, a=500., b=5., c=8.):
    """Benchmark IF a b cot(t) csc(t) exp(-b csc(t)) + c in Hz."""
    t = _check_domain(t)
    csc = 1 / np.sin(t)
    return a * b * np.cos(t) * csc ** 2 * np.exp(-b * csc) + c


def true_phase(t, a=500., b=5., c=8.):
    """Benchmark phase a exp(-b / sin(t)) + c t in cycles."""
    t = _check_domain(t)
    return a * np.exp(-b / np.sin(t)) + c * t


def benchmark_grid(fs):
    """Grid k / fs for k = 1, 2, ... with k / fs < pi."""
    if fs <= 0:
        raise ValueError('Sampling frequency must be positive!')
    count = int(np.ceil(np.pi * fs)) - 1
    while count / fs >= np.pi:
        count -= 1
    return np.arange(1, count + 1) / fs


def gen_benchmark(fs=1000., mode=None, noise_var=.1, seed=0, a=500., b=5.,
                  c=8.):
    """Generate a benchmark chirp and its noisy measurements.

    Parameters
    ----------
    fs : float
        Sampling frequency in Hz
    mode : AmplitudeMode
        Amplitude. None for `Constant`
    noise_var : float
        Measurement-noise variance
    seed : int
        Seed. Noise and amplitude use independent child streams
    a, b, c : float
        IF shape parameters

    Returns
    -------
    SyntheticTruth
    TimeSeries

    """
    if noise_var < 0:
        raise ValueError('Noise variance must be nonnegative!')
    if mode is None:
        mode = Constant()
    noise_seq, amp_seq = np.random.SeedSequence(seed).spawn(2)
    t = benchmark_grid(fs)
    phase = true_phase(t, a, b, c)
    alpha = mode.amplitude(t, np.random.default_rng(amp_seq))
    clean = alpha * np.sin(2 * np.pi * phase)
    noise = np.random.default_rng(noise_seq).standard_normal(t.size)
    y = clean + np.sqrt(noise_var) * noise
    truth = SyntheticTruth(t=t, f_true=true_if(t, a, b, c), phase=phase,
                           alpha=alpha, clean=clean)
    return truth, TimeSeries(t, y)


def sample_prior_path(params, bij, t_grid, seed, size=None, prior=None,
                      t0=0.):
    """Draw paths of the chirp/IF prior with the LCD discretisation.

    Parameters
    ----------
    params : ModelParams
    bij : Bijection
    t_grid : (T, ) array
        Strictly increasing times, not before t0
    seed : int
        Seed
    size : int or None
        Number of paths. None for a single path
    prior : GaussianBelief or None
        Law of the state at t0. None for `initial_belief`
    t0 : float
        Time origin

    Returns
    -------
    (T, ) or (size, T) array
        Chirp H u
    (T, ) or (size, T) array
        IF g(v), strictly positive

    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0) or t_grid[0] < t0:
        raise ValueError('Time grid must be strictly increasing from t0!')
    if prior is None:
        prior = initial_belief(params)
    rng = np.random.default_rng(seed)
    npaths = 1 if size is None else int(size)
    state = prior.mean + rng.standard_normal((npaths, 4)).dot(
        psd_sqrt(prior.cov).T)
    chirp = np.empty((npaths, t_grid.size))
    freq = np.empty((npaths, t_grid.size))
    steps = np.diff(np.concatenate(([t0], t_grid)))
    for k, step in enumerate(steps):
        shocks = rng.standard_normal((npaths, 4))
        state = lcd_mean(state, step, params, bij) \
            + shocks.dot(psd_sqrt(lcd_cov(step, params)).T)
        chirp[:, k] = state.dot(H)
        freq[:, k] = bij.forward(state[:, 2])
    if size is None:
        return chirp[0], freq[0]
    return chirp, freq


def conditional_cov_mc(params, f_path, t_grid, n_samples, seed, p0x=None,
                       t0=0.):
    """Monte Carlo covariance of the chirp given a frequency path.

    Only the chirp block is sampled; over each step the rotation uses the
    frequency at the start of the step.

    Parameters
    ----------
    params : ModelParams
    f_path : (T, ) array
        IF on t_grid
    t_grid : (T, ) array
        Strictly increasing times, not before t0
    n_samples : int
        Number of paths. n_samples >= 2
    seed : int
        Seed
    p0x : float or None
        Chirp variance at t0. None for `ModelParams.chirp_prior_var`
    t0 : float
        Time origin

    Returns
    -------
    (T, T) array
        Estimate of Cov[H U(t), H U(t')]

    """
    if n_samples < 2:
        raise ValueError('Need at least two samples!')
    f_path = np.asarray(f_path, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if f_path.shape != t_grid.shape:
        raise ValueError('Frequency path and grid differ in length!')
    if p0x is None:
        p0x = params.chirp_prior_var()
    rng = np.random.default_rng(seed)
    x1, x2 = np.sqrt(p0x) * rng.standard_normal((2, n_samples))
    samples = np.empty((n_samples, t_grid.size))
    steps = np.diff(np.concatenate(([t0], t_grid)))
    freqs = np.concatenate((f_path[:1], f_path[:-1]))
    for k, (step, freq) in enumerate(zip(steps, freqs)):
        angle = 2 * np.pi * freq * step
        decay = np.exp(-params.lam * step)
        cos, sin = np.cos(angle), np.sin(angle)
        scale = np.sqrt(harmonic_noise_var(step, params.lam, params.b))
        shocks = rng.standard_normal((2, n_samples))
        x1, x2 = decay * (cos * x1 - sin * x2) + scale * shocks[0], \
            decay * (sin * x1 + cos * x2) + scale * shocks[1]
        samples[:, k] = x2
    return np.atleast_2d(np.cov(samples, rowvar=False))
