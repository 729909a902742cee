#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Command Line Interface
======================

Sub-commands::

    chirpgp simulate   --output DIR --seed N [--fs --amplitude --noise-var]
    chirpgp fit        --input CSV --output JSON [--rule --time --pin ...]
    chirpgp estimate   --input CSV --params JSON --output DIR [--truth CSV
                       --baseline NAME ...]
    chirpgp benchmark  --output DIR --seed N [--mc-runs --amplitude ...]
    chirpgp gw         --input CSV --output DIR [--expect-rows 3441]
    chirpgp bounds     --constants JSON --output JSON [--input --params ...]
    chirpgp figures    --output DIR --seed N [--params JSON --paths ...]

Every command exits with status 0 iff all its outputs were written.
Stochastic commands are reproducible from --seed.

"""
from __future__ import print_function, division

import argparse
import dataclasses
import logging
import os
import sys

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import hilbert_if, legacy_ss_if, rmse, spectrogram_if
from .bijections import get_bijection
from .bounds import (BoundConstants, bound_series, corollary_bound,
                     empirical_vs_bound, extract_constants)
from .exceptions import (FitFailed, NumericalFailure, PreconditionViolated)
from .filters import (TIME_MODES, extract_if, gaussian_filter,
                      gaussian_smoother)
from .fileio import (check_output, fit_result_dict, read_columns,
                     read_constants, read_params, read_series,
                     report_dict, run_dict, write_baseline, write_columns,
                     write_estimate, write_filter_run, write_json,
                     write_params, write_series, write_truth)
from .mle import default_starts, fit
from .model import ModelParams, harmonic_kernel
from .quadrature import get_rule
from .simulate import (conditional_cov_mc, gen_benchmark, get_amplitude,
                       sample_prior_path)

__all__ = ['RunConfig', 'build_parser', 'config_from_args', 'cmd_simulate',
           'cmd_fit', 'cmd_estimate', 'cmd_benchmark', 'cmd_gw',
           'cmd_bounds', 'cmd_figures', 'benchmark_seeds', 'main']

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(module)s.%(funcName)s - %(levelname)s - ' \
    '%(message)s'
AMPLITUDES = ('constant', 'damped', 'ou')
BENCHMARK_METHODS = ('proposed', 'legacy_ss', 'hilbert', 'spectrogram')
BASELINES = BENCHMARK_METHODS[1:]
GW_ROWS = 3441
SEEDED = ('simulate', 'benchmark', 'figures')


@dataclass
class RunConfig(object):

    """Options of one command.

    Attributes
    ----------
    command : str
    input, output, params, truth, constants : str or None
        Paths
    seed : int or None
        Required by the stochastic commands
    fs : float
        Sampling frequency in Hz
    amplitudes : tuple of str
        Amplitude modes; simulate uses the first
    noise_var : float
    rule : str
        'ekf' or 'ghf'
    time_mode : str
        'discrete' or 'cd'
    bijection : str
    mc_runs : int
    methods : tuple of str
    pin : dict
        Parameter name to pinned value
    n_starts : int or None
        Number of default starts. None for all of them
    steps : int
        Steps of the bound series without a run
    corollary : bool
    expect_rows : int or None
    baselines : tuple of str
        Baseline estimators written next to the estimate
    duration : float
        Span of the figure grids from the time origin
    grid_points : int
        Points of the figure grids
    n_paths : int
        Prior sample paths
    mc_samples : int
        Paths of the conditional covariance estimate
    workers : int
    verbose : bool

    """

    command: str
    input: str = None
    output: str = None
    params: str = None
    truth: str = None
    constants: str = None
    seed: int = None
    fs: float = 1000.
    amplitudes: tuple = ('constant', )
    noise_var: float = .1
    rule: str = 'ghf'
    time_mode: str = 'discrete'
    bijection: str = 'softplus'
    mc_runs: int = 20
    methods: tuple = BENCHMARK_METHODS
    pin: dict = field(default_factory=dict)
    n_starts: int = None
    steps: int = 100
    corollary: bool = False
    expect_rows: int = None
    baselines: tuple = ()
    duration: float = 5.
    grid_points: int = 100
    n_paths: int = 10
    mc_samples: int = 1000
    workers: int = 1
    verbose: bool = False

    def validate(self):
        """Check options and input paths before any computation."""
        if self.seed is None:
            if self.command in SEEDED:
                raise ValueError('{} needs a seed!'.format(self.command))
        elif not 0 <= self.seed < 2 ** 64:
            raise ValueError('Seed must be a 64-bit unsigned integer!')
        if self.fs <= 0:
            raise ValueError('Sampling frequency must be positive!')
        if self.mc_runs < 1:
            raise ValueError('Need at least one Monte Carlo run!')
        if self.workers < 1:
            raise ValueError('Need at least one worker!')
        if self.n_starts is not None and self.n_starts < 1:
            raise ValueError('Need at least one start!')
        if self.duration <= 0 or self.grid_points < 2:
            raise ValueError('Figure grids need a positive span and at '
                             'least two points!')
        if self.n_paths < 1 or self.mc_samples < 2:
            raise ValueError('Need at least one path and two Monte Carlo '
                             'samples!')
        for name in self.amplitudes:
            if name not in AMPLITUDES:
                raise ValueError('Unknown amplitude mode: {}'.format(name))
        for name in self.methods:
            if name not in BENCHMARK_METHODS:
                raise ValueError('Unknown method: {}'.format(name))
        for name in self.baselines:
            if name not in BASELINES:
                raise ValueError('Unknown baseline: {}'.format(name))
        if self.time_mode not in TIME_MODES:
            raise ValueError('Unknown time mode: {}'.format(self.time_mode))
        get_rule(self.rule)
        get_bijection(self.bijection)
        for name in ('input', 'params', 'truth', 'constants'):
            path = getattr(self, name)
            if path is not None and not os.path.isfile(path):
                raise OSError('No such file: {}'.format(path))
        return self

    def get_rule(self):
        return get_rule(self.rule)

    def get_bijection(self):
        return get_bijection(self.bijection)

    def starts(self):
        starts = default_starts(self.get_bijection())
        return starts if self.n_starts is None else starts[:self.n_starts]


def _pin(text):
    name, sep, value = text.partition('=')
    if not sep or name not in ModelParams.names:
        raise argparse.ArgumentTypeError(
            'Expected NAME=VALUE with NAME in {}'.format(ModelParams.names))
    return name, float(value)


def default_workers():
    """Worker count from CHIRPGP_THREADS, else the available CPUs."""
    value = os.environ.get('CHIRPGP_THREADS')
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog='chirpgp',
        description='Instantaneous frequency estimation of chirp signals '
                    'with Gaussian filters and smoothers.')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    def add(name, help_text, io=('input', 'output')):
        sub = commands.add_parser(name, help=help_text)
        for opt in io:
            sub.add_argument('--' + opt, required=True)
        sub.add_argument('--verbose', action='store_true',
                         help='debug logging')
        return sub

    def add_model(sub):
        sub.add_argument('--rule', choices=('ekf', 'ghf'), default='ghf')
        sub.add_argument('--time', dest='time_mode', choices=TIME_MODES,
                         default='discrete')
        sub.add_argument('--bijection', choices=('softplus', 'exp'),
                         default='softplus')

    def add_fit(sub):
        sub.add_argument('--pin', type=_pin, action='append', default=[],
                         metavar='NAME=VALUE')
        sub.add_argument('--starts', dest='n_starts', type=int, default=None,
                         help='number of default starts to use')
        sub.add_argument('--workers', type=int, default=None)

    sub = add('simulate', 'generate a benchmark chirp', io=('output', ))
    sub.add_argument('--fs', type=float, default=1000.)
    sub.add_argument('--amplitude', choices=AMPLITUDES, default='constant')
    sub.add_argument('--noise-var', type=float, default=.1)
    sub.add_argument('--seed', type=int, required=True)

    sub = add('fit', 'maximum likelihood fit')
    add_model(sub)
    add_fit(sub)

    sub = add('estimate', 'filter and smooth with given parameters')
    sub.add_argument('--params', required=True)
    sub.add_argument('--truth', default=None)
    sub.add_argument('--baseline', dest='baselines', choices=BASELINES,
                     action='append', default=None,
                     help='also write baseline_NAME.csv')
    add_model(sub)

    sub = add('benchmark', 'Monte Carlo comparison of IF estimators',
              io=('output', ))
    sub.add_argument('--fs', type=float, default=1000.)
    sub.add_argument('--amplitude', choices=AMPLITUDES, action='append',
                     default=None)
    sub.add_argument('--methods', choices=BENCHMARK_METHODS, nargs='+',
                     default=list(BENCHMARK_METHODS))
    sub.add_argument('--noise-var', type=float, default=.1)
    sub.add_argument('--mc-runs', type=int, default=20)
    sub.add_argument('--seed', type=int, required=True)
    add_model(sub)
    add_fit(sub)

    sub = add('gw', 'IF of a gravitational-wave strain record')
    sub.add_argument('--expect-rows', type=int, default=None)
    add_model(sub)
    add_fit(sub)

    sub = add('bounds', 'error bound diagnostics', io=('constants', 'output'))
    sub.add_argument('--input', default=None,
                     help='measurements to extract constants from')
    sub.add_argument('--params', default=None)
    sub.add_argument('--truth', default=None)
    sub.add_argument('--steps', type=int, default=100)
    sub.add_argument('--corollary', action='store_true')
    add_model(sub)

    sub = add('figures', 'prior kernel, sample paths and conditional '
              'covariance grids', io=('output', ))
    sub.add_argument('--params', default=None,
                     help='model parameters, else f = 0.5 Hz, lam = 0.1, '
                          'b = 0.5 and p0x = 1.25')
    sub.add_argument('--seed', type=int, required=True)
    sub.add_argument('--duration', type=float, default=5.)
    sub.add_argument('--points', dest='grid_points', type=int,
                     default=100)
    sub.add_argument('--paths', dest='n_paths', type=int, default=10)
    sub.add_argument('--mc-samples', type=int, default=1000)
    sub.add_argument('--bijection', choices=('softplus', 'exp'),
                     default='softplus')
    return parser


def config_from_args(args):
    """RunConfig from parsed arguments."""
    values = {key: value for key, value in vars(args).items()
              if value is not None}
    amplitude = values.pop('amplitude', None)
    if isinstance(amplitude, str):
        values['amplitudes'] = (amplitude, )
    elif amplitude is not None:
        values['amplitudes'] = tuple(amplitude)
    elif args.command == 'benchmark':
        values['amplitudes'] = AMPLITUDES
    for name in ('methods', 'baselines'):
        if name in values:
            values[name] = tuple(values[name])
    values['pin'] = dict(values.pop('pin', []))
    values.setdefault('workers', default_workers())
    return RunConfig(**values).validate()


def cmd_simulate(config):
    """Write truth.csv and measurements.csv into the output directory."""
    truth_path = check_output(os.path.join(config.output, 'truth.csv'))
    meas_path = os.path.join(config.output, 'measurements.csv')
    truth, series = gen_benchmark(fs=config.fs,
                                  mode=get_amplitude(config.amplitudes[0]),
                                  noise_var=config.noise_var,
                                  seed=config.seed)
    write_truth(truth_path, truth)
    write_series(meas_path, series)
    return [truth_path, meas_path]


def _fit(config, series):
    return fit(series, bij=config.get_bijection(), rule=config.get_rule(),
               starts=config.starts(), pin=config.pin,
               time_mode=config.time_mode, n_workers=config.workers)


def cmd_fit(config):
    """Write the FitResult JSON; on failure the diagnostics instead."""
    check_output(config.output)
    series = read_series(config.input)
    bij = config.get_bijection()
    try:
        result = _fit(config, series)
    except FitFailed as err:
        write_json(config.output, {'error': str(err),
                                   'diagnostics': err.diagnostics})
        raise
    write_json(config.output, fit_result_dict(result, bij=bij,
                                              with_trace=config.verbose))
    return [config.output]


def _estimates(series, params, bij, rule, time_mode):
    """Filter and smoother runs with their IF estimates."""
    run = gaussian_filter(series, params, bij=bij, rule=rule,
                          time_mode=time_mode)
    smoothed = gaussian_smoother(run, params, bij=bij, rule=rule)
    return run, smoothed, extract_if(run, bij), extract_if(smoothed, bij)


def _baseline(method, series, config, bij, fs=None):
    """BaselineEstimate of one classical or b = 0 estimator.

    fs None infers the sampling rate from the timestamps.

    """
    if method == 'hilbert':
        return hilbert_if(series, fs)
    if method == 'spectrogram':
        return spectrogram_if(series, fs)
    return legacy_ss_if(series, bij=bij, rule=config.get_rule(),
                        starts=config.starts(), time_mode=config.time_mode)


def cmd_estimate(config):
    """Write the filtered and smoothed estimates and runs.

    filtered.csv and smoothed.csv hold the IF estimates, filtered.json and
    smoothed.json the run records, filter_run.csv the per-step filter
    diagnostics and baseline_NAME.csv each requested baseline.

    """
    names = ['filtered.csv', 'smoothed.csv', 'filter_run.csv',
             'filtered.json', 'smoothed.json']
    names += ['baseline_{}.csv'.format(name) for name in config.baselines]
    paths = [check_output(os.path.join(config.output, name))
             for name in names]
    series = read_series(config.input)
    params, bij = read_params(config.params)
    run, smoothed_run, filtered, smoothed = _estimates(
        series, params, bij, config.get_rule(), config.time_mode)
    write_estimate(paths[0], filtered)
    write_estimate(paths[1], smoothed)
    write_filter_run(paths[2], run)
    write_json(paths[3], run_dict(run, bij=bij))
    write_json(paths[4], run_dict(smoothed_run, bij=bij, nll=run.nll))
    for method, path in zip(config.baselines, paths[5:]):
        write_baseline(path, _baseline(method, series, config, bij))
    if config.truth is not None:
        f_true = read_columns(config.truth)['f_true']
        logger.info('RMSE filtered %.6f, smoothed %.6f',
                    rmse(filtered.if_mean, f_true),
                    rmse(smoothed.if_mean, f_true))
    return paths


def benchmark_seeds(base, n_runs):
    """Per-run seeds derived from the base seed and the run index."""
    return [int(np.random.SeedSequence([base, i]).generate_state(1)[0])
            for i in range(n_runs)]


def _benchmark_run(task):
    """RMSE of every method on one simulated series, NaN on failure."""
    config, amplitude, index, seed = task
    truth, series = gen_benchmark(fs=config.fs, mode=get_amplitude(amplitude),
                                  noise_var=config.noise_var, seed=seed)
    bij, rule = config.get_bijection(), config.get_rule()
    out = {}
    for method in config.methods:
        try:
            if method == 'proposed':
                result = _fit(dataclasses.replace(config, workers=1), series)
                estimate = _estimates(series, result.params, bij, rule,
                                      config.time_mode)[3].if_mean
            else:
                estimate = _baseline(method, series, config, bij,
                                     fs=config.fs).if_est
            out[method] = rmse(estimate, truth.f_true)
        except (NumericalFailure, FitFailed, ValueError) as err:
            logger.warning('Run %d (%s, %s) failed: %s', index, amplitude,
                           method, err)
            out[method] = float('nan')
    return {'amplitude': amplitude, 'index': index, 'seed': seed,
            'rmse': out}


def _summary(runs, methods, amplitudes):
    rows = []
    for amplitude in amplitudes:
        for method in methods:
            values = np.array([run['rmse'][method] for run in runs
                               if run['amplitude'] == amplitude])
            finite = values[np.isfinite(values)]
            stats = {'mean': np.nan, 'std': np.nan, 'median': np.nan}
            if finite.size:
                stats = {'mean': finite.mean(), 'std': finite.std(),
                         'median': np.median(finite)}
            rows.append(dict(stats, method=method, amplitude=amplitude,
                             n_runs=int(values.size),
                             n_failed=int(values.size - finite.size)))
    return rows


def cmd_benchmark(config):
    """Write summary.json with one row per (method, amplitude)."""
    path = check_output(os.path.join(config.output, 'summary.json'))
    seeds = benchmark_seeds(config.seed, config.mc_runs)
    tasks = [(config, amplitude, i, seed)
             for amplitude in config.amplitudes
             for i, seed in enumerate(seeds)]
    logger.info('Running %d simulations on %d workers', len(tasks),
                config.workers)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            runs = list(pool.map(_benchmark_run, tasks))
    else:
        runs = [_benchmark_run(task) for task in tasks]
    write_json(path, {'config': {'fs': config.fs, 'seed': config.seed,
                                 'mc_runs': config.mc_runs,
                                 'noise_var': config.noise_var,
                                 'rule': config.rule,
                                 'time_mode': config.time_mode,
                                 'bijection': config.bijection},
                      'rows': _summary(runs, config.methods,
                                       config.amplitudes),
                      'runs': runs})
    return [path]


def cmd_gw(config):
    """Fit and smooth a strain record; write params.json and estimate.csv."""
    params_path = check_output(os.path.join(config.output, 'params.json'))
    est_path = os.path.join(config.output, 'estimate.csv')
    series = read_series(config.input)
    if len(series) < 8:
        raise ValueError('{} holds only {} measurements'
                         .format(config.input, len(series)))
    if config.expect_rows is not None and len(series) != config.expect_rows:
        raise ValueError('Expected {} measurements in {}, found {}'.format(
            config.expect_rows, config.input, len(series)))
    if len(series) != GW_ROWS:
        logger.warning('Strain record has %d rows, the reference excerpt '
                       'has %d', len(series), GW_ROWS)
    bij = config.get_bijection()
    result = _fit(config, series)
    smoothed = _estimates(series, result.params, bij, config.get_rule(),
                          config.time_mode)[3]
    write_params(params_path, result.params, bij=bij)
    write_estimate(est_path, smoothed)
    return [params_path, est_path]


def _merge_constants(given, extracted):
    """Constants from the JSON override extracted ones when set."""
    defaults = vars(BoundConstants())
    changes = {key: value for key, value in vars(given).items()
               if value != defaults[key]}
    return extracted.replace(**changes)


def cmd_bounds(config):
    """Write the bound series, next to the empirical error with a run.

    With a run, e0 takes the first row of the truth as the IF at the time
    origin: the benchmark IF vanishes at t = 0, where the pre-image of the
    bijection is unbounded.

    """
    check_output(config.output)
    bc = read_constants(config.constants)
    content = {}
    if config.input is not None:
        if config.params is None or config.truth is None:
            raise ValueError('A run needs --params and --truth as well!')
        series = read_series(config.input)
        params, bij = read_params(config.params)
        f_true = read_columns(config.truth)['f_true']
        run = gaussian_filter(series, params, bij=bij,
                              rule=config.get_rule(),
                              time_mode=config.time_mode)
        bc = _merge_constants(bc, extract_constants(
            [run], params, truth_if0=f_true[0], bij=bij, c_z=bc.c_z, c=bc.c,
            c_K=bc.c_K))
        report = empirical_vs_bound([run], [f_true], bc, bij=bij)
        content.update(report_dict(report))
        steps = len(series)
    else:
        steps = config.steps
        content['constants'] = bc.as_dict()
        content['bound'] = bound_series(steps, None, bc)
    if config.corollary:
        content['corollary'] = [corollary_bound(k, bc)
                                for k in range(1, steps + 1)]
    write_json(config.output, content)
    return [config.output]


def _pairs(grid, values):
    """Long-format columns of a (T, T) grid of values."""
    t, t_prime = np.meshgrid(grid, grid, indexing='ij')
    return [('t', t.ravel()), ('t_prime', t_prime.ravel())] + values


def cmd_figures(config):
    """Write the prior kernel, sample paths and conditional covariance.

    kernel.csv holds Cov[X(t), X(t')] of the chirp at the frequency
    g(m0v) in long format, prior_paths.csv one chirp and one IF column per
    prior sample and conditional_cov.csv the Monte Carlo covariance of
    the chirp given the IF of the first sample path.

    """
    paths = [check_output(os.path.join(config.output, name))
             for name in ('kernel.csv', 'prior_paths.csv',
                          'conditional_cov.csv')]
    if config.params is None:
        bij = config.get_bijection()
        params = ModelParams(lam=.1, b=.5, m0v=float(bij.inverse(.5)),
                             p0x=1.25)
    else:
        params, bij = read_params(config.params)
    grid = np.linspace(0., config.duration, config.grid_points + 1)[1:]
    path_seed, mc_seed = benchmark_seeds(config.seed, 2)

    freq = float(bij.forward(params.m0v))
    p0x = params.chirp_prior_var() * np.eye(2)
    kernel = np.array([[harmonic_kernel(t, t_prime, freq, params.lam,
                                        params.b, p0x) for t_prime in grid]
                       for t in grid])
    write_columns(paths[0], _pairs(grid, [
        ('c11', kernel[..., 0, 0].ravel()), ('c12', kernel[..., 0, 1].ravel()),
        ('c21', kernel[..., 1, 0].ravel()),
        ('c22', kernel[..., 1, 1].ravel())]))

    chirps, freqs = sample_prior_path(params, bij, grid, path_seed,
                                      size=config.n_paths)
    write_columns(paths[1], [('t', grid)]
                  + [('chirp_{}'.format(i), path)
                     for i, path in enumerate(chirps)]
                  + [('if_{}'.format(i), path)
                     for i, path in enumerate(freqs)])

    cov = conditional_cov_mc(params, freqs[0], grid, config.mc_samples,
                             mc_seed)
    write_columns(paths[2], _pairs(grid, [('cov', cov.ravel())]))
    return paths


COMMANDS = {'simulate': cmd_simulate, 'fit': cmd_fit,
            'estimate': cmd_estimate, 'benchmark': cmd_benchmark,
            'gw': cmd_gw, 'bounds': cmd_bounds,
            'figures': cmd_figures}


def main(argv=None):
    """Entry point. Returns the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format=LOG_FORMAT)
    try:
        config = config_from_args(args)
        logger.info('Starting %s', config.command)
        paths = COMMANDS[config.command](config)
    except PreconditionViolated as err:
        print('chirpgp: {}'.format(err), file=sys.stderr)
        return 2
    except (OSError, ValueError, NumericalFailure, FitFailed) as err:
        print('chirpgp: {}'.format(err), file=sys.stderr)
        return 1
    logger.info('Finished %s: %s', config.command, ', '.join(paths))
    return 0
