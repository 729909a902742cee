#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Moment-Matching Rules
=====================

Approximations of Gaussian integrals
:math:`\int \phi(u) N(u \mid m, P) \,\mathrm{d}u` used by the Gaussian
filter and smoother: first-order linearisation (EKF) and tensor-product
Gauss--Hermite quadrature (GHF).

"""
from __future__ import print_function, division

from functools import lru_cache

import numpy as np
import numpy.linalg as npl

from numpy.polynomial.hermite_e import hermegauss

from .exceptions import UnsupportedInput
from .gaussian import psd_sqrt

__all__ = ['gh_points', 'QuadratureRule', 'Linearize', 'GaussHermite',
           'get_rule']

MAX_GH_ORDER = 20


@lru_cache(maxsize=None)
def _gh_points(dim, order):
    x, w = hermegauss(order)
    w = w / w.sum()
    grids = np.meshgrid(*([x] * dim), indexing='ij')
    nodes = np.stack([grid.ravel() for grid in grids], axis=-1)
    wgrids = np.meshgrid(*([w] * dim), indexing='ij')
    weights = np.prod(np.stack([grid.ravel() for grid in wgrids]), axis=0)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gh_points(dim, order):
    """Gauss--Hermite nodes and weights for the standard normal.

    Tensor product of the probabilists' Hermite rule in every axis.

    Parameters
    ----------
    dim : int
        Dimension. dim >= 1
    order : int
        Points per axis. 1 <= order <= 20

    Returns
    -------
    (order**dim, dim) array
        Nodes
    (order**dim, ) array
        Weights, summing to one

    """
    if dim < 1 or order < 1:
        raise ValueError('Need dim >= 1 and order >= 1!')
    if order > MAX_GH_ORDER:
        raise UnsupportedInput('Gauss-Hermite order {} is beyond {}'
                               .format(order, MAX_GH_ORDER))
    return _gh_points(int(dim), int(order))


class QuadratureRule(object):

    """Gaussian moment-matching rule.

    Methods
    -------
    moments
        Mean, covariance and cross covariance of phi(U)
    regression
        Matrix A with Cov[U, phi(U)] = P A^T

    """

    name = None

    def get_name(self):
        return self.name

    def moments(self, mean, cov, func, jac):
        """Moments of phi(U) for U ~ N(mean, cov).

        Parameters
        ----------
        mean : (n, ) array
        cov : (n, n) array
        func : callable
            phi, vectorised over the leading axis, (..., n) -> (..., k)
        jac : callable
            Jacobian of phi at a single point, (n, ) -> (k, n)

        Returns
        -------
        (k, ) array
            E[phi(U)]
        (k, k) array
            Cov[phi(U)]
        (n, k) array
            Cov[U, phi(U)]

        """
        raise NotImplementedError

    def regression(self, mean, cov, cross, jac):
        """Statistical linear regression matrix A, Cov[U, phi(U)] = P A^T.

        Parameters
        ----------
        mean, cov : array
            Moments of U
        cross : (n, k) array
            Cov[U, phi(U)] as returned by `moments`
        jac : callable
            Jacobian of phi at a single point

        Returns
        -------
        (k, n) array

        """
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and vars(self) == vars(other)

    def __hash__(self):
        return hash((type(self), tuple(sorted(vars(self).items()))))


class Linearize(QuadratureRule):

    """First-order Taylor expansion around the mean (EKF)."""

    name = 'ekf'

    def moments(self, mean, cov, func, jac):
        jmat = jac(mean)
        cross = cov.dot(jmat.T)
        return func(mean), jmat.dot(cross), cross

    def regression(self, mean, cov, cross, jac):
        return jac(mean)

    def __repr__(self):
        return 'Linearize()'


class GaussHermite(QuadratureRule):

    """Tensor-product Gauss--Hermite quadrature (GHF).

    Attributes
    ----------
    order : int
        Points per dimension

    """

    name = 'ghf'

    def __init__(self, order=3):
        if order < 1 or order > MAX_GH_ORDER:
            raise UnsupportedInput('Gauss-Hermite order {} not supported'
                                   .format(order))
        self.order = int(order)

    def sigma_points(self, mean, cov):
        """Affine-transformed nodes mean + S xi and their weights."""
        nodes, weights = gh_points(mean.size, self.order)
        return mean + nodes.dot(psd_sqrt(cov).T), weights

    def moments(self, mean, cov, func, jac):
        chi, weights = self.sigma_points(mean, cov)
        evals = func(chi)
        mean_out = weights.dot(evals)
        dev = evals - mean_out
        wdev = weights[:, np.newaxis] * dev
        return mean_out, dev.T.dot(wdev), (chi - mean).T.dot(wdev)

    def regression(self, mean, cov, cross, jac):
        # Least squares keeps singular covariances admissible.
        return npl.lstsq(cov, cross, rcond=None)[0].T

    def __repr__(self):
        return 'GaussHermite(order={})'.format(self.order)


def get_rule(name, order=3):
    """Rule instance by name ('ekf' or 'ghf')."""
    name = name.lower()
    if name == 'ekf':
        return Linearize()
    if name == 'ghf':
        return GaussHermite(order=order)
    raise ValueError('Unknown rule: {}'.format(name))
