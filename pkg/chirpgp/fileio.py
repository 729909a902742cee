#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
File Formats
============

CSV files are comma separated with a header row and 17 significant
digits; missing values are written as ``nan``. JSON files are UTF-8 with
sorted keys; non-finite floats are written as ``null``.

"""
from __future__ import print_function, division

import json
import logging
import os

import numpy as np
import numpy.linalg as npl

from .bijections import get_bijection
from .bounds import BoundConstants
from .filters import extract_if
from .model import ModelParams
from .simulate import TimeSeries

__all__ = ['check_output', 'write_columns', 'read_columns', 'write_series',
           'read_series', 'write_truth', 'write_estimate', 'write_baseline',
           'write_filter_run', 'write_json', 'read_json', 'write_params',
           'read_params', 'read_constants', 'fit_result_dict',
           'report_dict', 'run_dict']

logger = logging.getLogger(__name__)

_FMT = '%.17g'


def check_output(path):
    """Fail early if path cannot be written.

    Raises
    ------
    OSError
        Naming the path

    """
    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(folder):
        raise OSError('Output directory does not exist: {}'.format(folder))
    if not os.access(folder, os.W_OK):
        raise OSError('Output directory is not writable: {}'.format(folder))
    return path


def write_columns(path, columns):
    """Write named equally long columns.

    Parameters
    ----------
    path : str
    columns : list of (str, array_like) pairs

    """
    names = [name for name, _ in columns]
    data = np.column_stack([np.asarray(col, dtype=float)
                            for _, col in columns])
    np.savetxt(path, data, fmt=_FMT, delimiter=',', header=','.join(names),
               comments='')
    logger.info('Wrote %d rows to %s', data.shape[0], path)


def read_columns(path):
    """Read a CSV with a header row into a dict of float arrays."""
    if not os.path.isfile(path):
        raise OSError('No such file: {}'.format(path))
    table = np.genfromtxt(path, delimiter=',', names=True, dtype=float)
    table = np.atleast_1d(table)
    return {name: np.asarray(table[name], dtype=float)
            for name in table.dtype.names}


def write_series(path, series):
    write_columns(path, [('t', series.t), ('y', series.y)])


def read_series(path):
    """TimeSeries from a CSV with columns t and y."""
    columns = read_columns(path)
    missing = {'t', 'y'} - set(columns)
    if missing:
        raise ValueError('{} lacks columns {}'.format(path, sorted(missing)))
    return TimeSeries(t=columns['t'], y=columns['y'])


def write_truth(path, truth):
    write_columns(path, [('t', truth.t), ('f_true', truth.f_true),
                         ('phase', truth.phase), ('alpha', truth.alpha),
                         ('clean', truth.clean)])


def write_estimate(path, estimate):
    write_columns(path, [('t', estimate.t), ('if_mean', estimate.if_mean),
                         ('if_lower', estimate.if_lower),
                         ('if_upper', estimate.if_upper),
                         ('chirp_mean', estimate.chirp_mean),
                         ('chirp_std', estimate.chirp_std)])


def write_baseline(path, estimate):
    write_columns(path, [('t', estimate.t), ('if_est', estimate.if_est),
                         ('edge', estimate.edge)])


def write_filter_run(path, run):
    """Per-step diagnostics of a filter run.

    Columns t, dt, S, loglik, trace_P (filtering covariance) and
    pred_norm_sq (squared spectral norm of the predicted covariance).

    """
    write_columns(path, [('t', run.t), ('dt', run.dt), ('S', run.S),
                         ('loglik', run.loglik),
                         ('trace_P', np.trace(run.P, axis1=1, axis2=2)),
                         ('pred_norm_sq',
                          npl.norm(run.P_pred, ord=2, axis=(1, 2)) ** 2)])


def _plain(value):
    """JSON-ready copy with non-finite floats as None."""
    if isinstance(value, dict):
        return {str(key): _plain(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(val) for val in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def write_json(path, content):
    with open(path, 'w', encoding='utf-8') as stream:
        json.dump(_plain(content), stream, sort_keys=True, indent=2,
                  allow_nan=False)
        stream.write('\n')
    logger.info('Wrote %s', path)


def read_json(path):
    if not os.path.isfile(path):
        raise OSError('No such file: {}'.format(path))
    with open(path, 'r', encoding='utf-8') as stream:
        return json.load(stream)


def write_params(path, params, bij=None):
    content = params.as_dict()
    if bij is not None:
        content['bijection'] = bij.get_name()
    write_json(path, content)


def read_params(path):
    """ModelParams and Bijection from a params JSON.

    Accepts either a bare parameter dict or a fit result with a 'params'
    entry. The bijection defaults to softplus.

    """
    content = read_json(path)
    values = content.get('params', content)
    bij = get_bijection(content.get('bijection',
                                    values.get('bijection', 'softplus')))
    return ModelParams.from_dict(values), bij


def read_constants(path):
    content = read_json(path)
    fields = set(vars(BoundConstants()))
    unknown = set(content) - fields
    if unknown:
        raise ValueError('Unknown bound constants: {}'.format(sorted(unknown)))
    return BoundConstants(**content)


def fit_result_dict(result, bij=None, with_trace=False):
    """JSON content of a FitResult."""
    content = {'params': result.params.as_dict(), 'nll': result.nll,
               'n_evaluations': result.n_evaluations,
               'converged': result.converged,
               'start_index': result.start_index,
               'start_nlls': result.start_nlls}
    if bij is not None:
        content['bijection'] = bij.get_name()
    if with_trace:
        content['trace'] = result.trace
    return content


def report_dict(report):
    """JSON content of a BoundReport, one record per step."""
    steps = [{'k': k + 1, 't': t, 'empirical_mse': emp, 'bound': bound,
              'holds': holds}
             for k, (t, emp, bound, holds)
             in enumerate(zip(report.t, report.empirical_mse, report.bound,
                              report.holds))]
    return {'constants': report.constants.as_dict(), 'n_runs': report.n_runs,
            'all_hold': report.all_hold(), 'steps': steps}


def run_dict(run, bij=None, nll=None):
    """JSON content of a filter or smoother run.

    Parameters
    ----------
    run : FilterRun or SmootherRun
    bij : Bijection
        None for `Softplus`
    nll : float or None
        Negative log-likelihood. None takes it from a filter run; smoother
        runs carry none of their own

    Returns
    -------
    dict
        Arrays t, m (T x 4), diag_P (T x 4), if_mean, if_lower and
        if_upper, and the scalar nll

    """
    estimate = extract_if(run, bij)
    if nll is None:
        nll = getattr(run, 'nll', None)
    return {'t': run.t, 'm': run.m,
            'diag_P': np.diagonal(run.P, axis1=1, axis2=2),
            'if_mean': estimate.if_mean, 'if_lower': estimate.if_lower,
            'if_upper': estimate.if_upper, 'nll': nll}
