#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Gaussian Beliefs
================

Mean/covariance pairs of the joint state
:math:`U = [X_1, X_2, V, \mathrm{d}V/\mathrm{d}t]` and the small amount of
Gaussian linear algebra the filters share.

"""
from __future__ import print_function, division

from dataclasses import dataclass

import numpy as np
import numpy.linalg as npl

from .exceptions import NumericalFailure

__all__ = ['GaussianBelief', 'as_state', 'symmetrize', 'psd_sqrt',
           'normal_logpdf', 'STATE_DIM', 'PSD_TOL']

STATE_DIM = 4
# Most negative eigenvalue tolerated in a covariance, relative to
# max(1, |P|).
PSD_TOL = 1e-6


def as_state(u):
    """Validate a state vector.

    Parameters
    ----------
    u : array_like
        Components [x1, x2, v, vdot]

    Returns
    -------
    (4, ) array

    """
    u = np.array(u, dtype=float)
    if u.shape != (STATE_DIM, ):
        raise ValueError('State must have exactly 4 components!')
    if not np.all(np.isfinite(u)):
        raise ValueError('State must be finite!')
    return u


def symmetrize(cov):
    """Return (P + P^T) / 2 over the last two axes."""
    return .5 * (cov + np.swapaxes(cov, -1, -2))


def psd_sqrt(cov, tol=PSD_TOL):
    """Square root S of a PSD matrix such that S S^T = P.

    Uses the eigen decomposition so that singular (e.g. zero) covariances
    are admissible.

    Parameters
    ----------
    cov : (ndim, ndim) array
        Symmetric covariance
    tol : float
        Most negative eigenvalue tolerated, relative to max(1, |P|)

    Returns
    -------
    (ndim, ndim) array

    Raises
    ------
    NumericalFailure
        If an eigenvalue is below -tol

    """
    # (ndim, ) and (ndim, ndim)
    eigvalues, eigvec = npl.eigh(symmetrize(cov))
    scale = max(1., np.abs(eigvalues).max())
    if eigvalues.min() < -tol * scale:
        raise NumericalFailure('covariance is not positive semidefinite '
                               '(eigenvalue {:.3e})'.format(eigvalues.min()))
    return eigvec * np.sqrt(np.clip(eigvalues, 0., None))


def normal_logpdf(x, mean, var):
    """Univariate normal log-density log N(x | mean, var)."""
    return -.5 * (np.log(2 * np.pi * var) + (x - mean) ** 2 / var)


@dataclass(frozen=True)
class GaussianBelief(object):

    """Gaussian belief N(mean, cov) over the joint state.

    Attributes
    ----------
    mean : (4, ) array
        State mean
    cov : (4, 4) array
        Symmetric positive semidefinite covariance

    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = as_state(self.mean)
        cov = np.array(self.cov, dtype=float)
        if cov.shape != (STATE_DIM, STATE_DIM):
            raise ValueError('Covariance must be 4 x 4!')
        scale = max(1., np.abs(cov).max())
        if np.abs(cov - cov.T).max() > 1e-10 * scale:
            raise ValueError('Covariance must be symmetric!')
        if npl.eigvalsh(cov).min() < -PSD_TOL * scale:
            raise ValueError('Covariance must be positive semidefinite!')
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'cov', cov)

    def marginal(self, index):
        """Mean and variance of one state component."""
        return self.mean[index], self.cov[index, index]
