#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Maximum Likelihood Estimation
=============================

Parameters are fitted by minimising the prediction-error negative
log-likelihood of `gaussian_filter` with L-BFGS-B. The optimiser works in
an unconstrained space: the positive parameters enter through their
logarithm and the initial mean of V as is,

.. math::

    \theta = (\log\lambda, \log b, \log\Xi, \log\ell, \log\sigma, m_0^V).

Any subset of the parameters can be pinned to fixed values; pinned
parameters are dropped from the optimisation vector. Gradients are
central finite differences.

"""
from __future__ import print_function, division

import logging

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from scipy.optimize import minimize

from .bijections import Softplus
from .exceptions import FitFailed, NumericalFailure
from .filters import gaussian_filter
from .model import ModelParams
from .quadrature import GaussHermite

__all__ = ['NLL_SENTINEL', 'Reparam', 'FitResult', 'nll', 'fd_gradient',
           'default_starts', 'fit']

logger = logging.getLogger(__name__)

NLL_SENTINEL = 1e10

_POSITIVE = ('lam', 'b', 'xi', 'ell', 'sigma')
_DEFAULT_OPTS = {'maxiter': 400, 'gtol': 1e-6, 'ftol': 1e-10, 'maxcor': 10}


class Reparam(object):

    """Map between ModelParams and the unconstrained optimisation vector.

    Attributes
    ----------
    pin : dict
        Parameter name to fixed value
    free : tuple
        Names of the free parameters, in `ModelParams.names` order
    base : ModelParams
        Supplies values the vector does not carry (p0x)

    """

    def __init__(self, pin=None, base=None):
        self.pin = dict(pin or {})
        unknown = set(self.pin) - set(ModelParams.names)
        if unknown:
            raise ValueError('Cannot pin unknown parameters: {}'
                             .format(sorted(unknown)))
        self.free = tuple(name for name in ModelParams.names
                          if name not in self.pin)
        self.base = ModelParams() if base is None else base

    def __len__(self):
        return len(self.free)

    def to_unconstrained(self, params):
        """Vector of free parameters in unconstrained space."""
        values = params.as_dict()
        return np.array([np.log(values[name]) if name in _POSITIVE
                         else values[name] for name in self.free])

    def to_params(self, uparams):
        """ModelParams from a vector of free parameters, pins applied.

        Raises
        ------
        ValueError
            If the vector has the wrong size or maps outside the valid
            parameter range

        """
        uparams = np.atleast_1d(np.asarray(uparams, dtype=float))
        if uparams.shape != (len(self.free), ):
            raise ValueError('Expected {} free parameters, got {}'
                             .format(len(self.free), uparams.shape))
        values = {name: (np.exp(value) if name in _POSITIVE else value)
                  for name, value in zip(self.free, uparams)}
        values.update(self.pin)
        return self.base.replace(**values)

    def apply_pins(self, params):
        return params.replace(**self.pin)


@dataclass
class FitResult(object):

    """Outcome of `fit`.

    Attributes
    ----------
    params : ModelParams
        Best parameters over all starts
    nll : float
        Objective at params
    n_evaluations : int
        Objective evaluations over all starts, gradients included
    converged : bool
        Optimiser success flag of the winning start
    start_index : int
        Index of the winning start
    start_nlls : list
        Final objective of every start (NaN for failed starts)
    trace : list
        Per-iteration objective of the winning start

    """

    params: ModelParams
    nll: float
    n_evaluations: int
    converged: bool
    start_index: int
    start_nlls: list = field(default_factory=list)
    trace: list = field(default_factory=list)


def nll(uparams, series, bij=None, rule=None, reparam=None,
        time_mode='discrete', n_substeps=10):
    """Negative log-likelihood at unconstrained parameters.

    Parameters
    ----------
    uparams : array_like
        Unconstrained free parameters, see `Reparam`
    series : TimeSeries
    bij : Bijection
    rule : QuadratureRule
    reparam : Reparam
        None for no pins
    time_mode : str
    n_substeps : int

    Returns
    -------
    float
        NLL_SENTINEL when the parameters are invalid or the filter
        breaks down

    """
    if len(series) < 1:
        raise ValueError('No data given!')
    reparam = Reparam() if reparam is None else reparam
    try:
        params = reparam.to_params(uparams)
        value = gaussian_filter(series, params, bij=bij, rule=rule,
                                time_mode=time_mode,
                                n_substeps=n_substeps).nll
    except (NumericalFailure, ValueError, FloatingPointError,
            np.linalg.LinAlgError) as err:
        logger.debug('Objective failed at %s: %s', uparams, err)
        return NLL_SENTINEL
    if not np.isfinite(value):
        return NLL_SENTINEL
    return value


class _Objective(object):

    """Picklable nll closure over the data and structural choices."""

    def __init__(self, series, bij, rule, reparam, time_mode, n_substeps):
        self.series = series
        self.bij = bij
        self.rule = rule
        self.reparam = reparam
        self.time_mode = time_mode
        self.n_substeps = n_substeps

    def __call__(self, uparams):
        return nll(uparams, self.series, bij=self.bij, rule=self.rule,
                   reparam=self.reparam, time_mode=self.time_mode,
                   n_substeps=self.n_substeps)


def fd_gradient(func, x, rel_step=1e-5):
    """Central finite-difference gradient.

    The step for coordinate i is rel_step * max(1, |x_i|).

    Parameters
    ----------
    func : callable
        Scalar function of a vector
    x : (n, ) array
    rel_step : float

    Returns
    -------
    (n, ) array

    """
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        step = rel_step * max(1., abs(x[i]))
        shift = np.zeros_like(x)
        shift[i] = step
        grad[i] = (func(x + shift) - func(x - shift)) / (2 * step)
    return grad


def default_starts(bij=None):
    """Multi-start grid over the initial IF and the length scale.

    Returns
    -------
    list of ModelParams
        g^{-1}(5), g^{-1}(10), g^{-1}(20) for m0v crossed with
        ell in {0.5, 1.5}; lam = b = xi = 0.1 and sigma = 3

    """
    bij = Softplus() if bij is None else bij
    return [ModelParams(lam=.1, b=.1, xi=.1, ell=ell, sigma=3.,
                        m0v=float(bij.inverse(freq)))
            for freq in (5., 10., 20.) for ell in (.5, 1.5)]


class _CountingObjective(object):

    """Counts calls and remembers values for the iteration trace."""

    def __init__(self, func):
        self.func = func
        self.calls = 0
        self.sentinels = 0
        self.cache = {}

    def __call__(self, x):
        self.calls += 1
        value = float(self.func(x))
        if value >= NLL_SENTINEL:
            self.sentinels += 1
        self.cache[x.tobytes()] = value
        return value

    def lookup(self, x):
        key = np.asarray(x, dtype=float).tobytes()
        if key in self.cache:
            return self.cache[key]
        return self(np.asarray(x, dtype=float))


def _run_start(args):
    """Run L-BFGS-B from one start. Returns a dict of outcomes."""
    index, x0, func, opts = args
    counter = _CountingObjective(func)
    trace = []
    try:
        res = minimize(counter, x0, method='L-BFGS-B',
                       jac=lambda x: fd_gradient(counter, x),
                       options=opts,
                       callback=lambda xk: trace.append(counter.lookup(xk)))
    except (ValueError, ArithmeticError) as err:
        return {'index': index, 'ok': False, 'message': str(err),
                'calls': counter.calls, 'sentinels': counter.sentinels}
    value = float(res.fun)
    return {'index': index, 'ok': bool(np.isfinite(value)
                                       and value < NLL_SENTINEL),
            'x': res.x, 'fun': value, 'success': bool(res.success),
            'message': str(res.message), 'calls': counter.calls,
            'sentinels': counter.sentinels, 'trace': trace}


def fit(series, bij=None, rule=None, starts=None, optimizer_opts=None,
        pin=None, time_mode='discrete', n_substeps=10, objective=None,
        n_workers=1):
    """Fit ModelParams by maximum likelihood with multiple starts.

    Parameters
    ----------
    series : TimeSeries
    bij : Bijection
        None for `Softplus`
    rule : QuadratureRule
        None for `GaussHermite` of order 3
    starts : list of ModelParams
        None for `default_starts`
    optimizer_opts : dict
        Overrides of the L-BFGS-B options (maxiter 400, gtol 1e-6,
        ftol 1e-10)
    pin : dict
        Parameter name to fixed value, e.g. {'b': 0.}
    time_mode : str
        'discrete' or 'cd'
    n_substeps : int
    objective : callable
        Replaces the nll as a function of the unconstrained free
        parameters
    n_workers : int
        Starts run in a process pool when larger than one

    Returns
    -------
    FitResult

    Raises
    ------
    FitFailed
        If no start reaches a finite objective

    """
    bij = Softplus() if bij is None else bij
    rule = GaussHermite() if rule is None else rule
    starts = default_starts(bij) if starts is None else list(starts)
    if not starts:
        raise ValueError('Need at least one start!')
    reparam = Reparam(pin=pin, base=starts[0])
    if not reparam.free:
        raise ValueError('Every parameter is pinned!')
    if objective is None:
        objective = _Objective(series, bij, rule, reparam, time_mode,
                               n_substeps)
    opts = dict(_DEFAULT_OPTS)
    opts.update(optimizer_opts or {})

    jobs = [(i, reparam.to_unconstrained(reparam.apply_pins(start)),
             objective, opts) for i, start in enumerate(starts)]
    if n_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_run_start, jobs))
    else:
        outcomes = [_run_start(job) for job in jobs]

    n_evaluations = 0
    best = None
    for out in outcomes:
        n_evaluations += out['calls']
        if out['sentinels']:
            logger.warning('Start %d: %d objective evaluations hit a '
                           'numerical failure', out['index'], out['sentinels'])
        if not out['ok']:
            logger.debug('Start %d failed: %s', out['index'], out['message'])
            continue
        logger.debug('Start %d: nll %.6f after %d evaluations (%s)',
                     out['index'], out['fun'], out['calls'], out['message'])
        if best is None or out['fun'] < best['fun']:
            best = out

    start_nlls = [out['fun'] if out['ok'] else float('nan')
                  for out in outcomes]
    if best is None:
        raise FitFailed('All {} starts failed'.format(len(starts)),
                        diagnostics={'starts': [s.as_dict() for s in starts],
                                     'messages': [out['message']
                                                  for out in outcomes],
                                     'nlls': start_nlls})
    params = reparam.to_params(best['x'])
    logger.info('Fitted %s with nll %.6f (start %d)', params.as_dict(),
                best['fun'], best['index'])
    return FitResult(params=params, nll=best['fun'],
                     n_evaluations=n_evaluations,
                     converged=best['success'], start_index=best['index'],
                     start_nlls=start_nlls, trace=best['trace'])
