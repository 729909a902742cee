#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Exceptions
==========

"""
from __future__ import print_function, division

__all__ = ['NumericalFailure', 'UnsupportedInput', 'PreconditionViolated',
           'FitFailed']


class NumericalFailure(ArithmeticError):

    """Filter or smoother recursion broke down.

    Attributes
    ----------
    step : int or None
        Index of the measurement at which the failure happened

    """

    def __init__(self, message, step=None):
        super(NumericalFailure, self).__init__(message)
        self.message = message
        self.step = step

    def at_step(self, step):
        """Copy of the error tagged with a step index."""
        return NumericalFailure(self.message, step=step)

    def __str__(self):
        if self.step is None:
            return self.message
        return 'step {}: {}'.format(self.step, self.message)


class UnsupportedInput(ValueError):
    """Input outside what the method can handle."""


class PreconditionViolated(ValueError):
    """A stated inequality on the inputs does not hold."""


class FitFailed(RuntimeError):

    """Every start of the likelihood optimisation failed.

    Attributes
    ----------
    diagnostics : dict
        Per-start messages and objective values

    """

    def __init__(self, message, diagnostics=None):
        super(FitFailed, self).__init__(message)
        self.diagnostics = diagnostics or {}
