#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Positive Bijections
===================

Maps :math:`g\colon \mathbb{R} \to \mathbb{R}_{>0}` that turn the latent
Gaussian process :math:`V` into the instantaneous frequency
:math:`f = g(V)`.

"""
from __future__ import print_function, division

import numpy as np

from scipy.special import expit

__all__ = ['Bijection', 'Softplus', 'Exp', 'get_bijection']

# Above this value log(expm1(f)) is evaluated in the log domain.
_SOFTPLUS_LARGE = 30.


class Bijection(object):

    """Positive bijection.

    Methods
    -------
    forward
        g(x)
    inverse
        g^{-1}(f)
    derivative
        g'(x)

    """

    kind = None

    def get_name(self):
        return self.kind

    def forward(self, x):
        raise NotImplementedError

    def inverse(self, f):
        raise NotImplementedError

    def derivative(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.forward(x)

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self))

    def __repr__(self):
        return '{}()'.format(type(self).__name__)


class Softplus(Bijection):

    """Softplus bijection :math:`g(x) = \log(1 + e^x)`.

    Overflow-safe for :math:`|x|` up to the float64 range.

    """

    kind = 'softplus'

    def forward(self, x):
        return np.logaddexp(0., x)

    def inverse(self, f):
        """Inverse map.

        Parameters
        ----------
        f : array_like
            Positive values

        Returns
        -------
        array_like

        """
        f = np.asarray(f, dtype=float)
        if np.any(f <= 0):
            raise ValueError('Softplus inverse needs positive input!')
        small = np.minimum(f, _SOFTPLUS_LARGE)
        large = np.maximum(f, _SOFTPLUS_LARGE)
        out = np.where(f > _SOFTPLUS_LARGE,
                       large + np.log1p(-np.exp(-large)),
                       np.log(np.expm1(small)))
        return out[()] if out.ndim == 0 else out

    def derivative(self, x):
        return expit(x)


class Exp(Bijection):

    """Exponential bijection :math:`g(x) = e^x`."""

    kind = 'exp'

    def forward(self, x):
        return np.exp(x)

    def inverse(self, f):
        f = np.asarray(f, dtype=float)
        if np.any(f <= 0):
            raise ValueError('Exp inverse needs positive input!')
        out = np.log(f)
        return out[()] if out.ndim == 0 else out

    def derivative(self, x):
        return np.exp(x)


_BIJECTIONS = {'softplus': Softplus, 'exp': Exp}


def get_bijection(name):
    """Bijection instance by name ('softplus' or 'exp')."""
    try:
        return _BIJECTIONS[name.lower()]()
    except KeyError:
        raise ValueError('Unknown bijection: {}'.format(name))
