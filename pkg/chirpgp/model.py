#!/usr/bin/env python
# -*- coding: utf-8 -*-
r"""
Joint Chirp and Instantaneous Frequency Model
=============================================

The chirp is carried by a damped harmonic SDE

.. math::

    \mathrm{d}X = \begin{bmatrix} -\lambda & -2\pi f \\ 2\pi f & -\lambda
    \end{bmatrix} X \,\mathrm{d}t + b \,\mathrm{d}W_X,

whose frequency is driven by a Matérn 3/2 process :math:`V` through a
positive bijection, :math:`f = g(V)`. The joint state is
:math:`U = [X_1, X_2, V, \mathrm{d}V/\mathrm{d}t]` and the measurement is
:math:`Y_k = H U(t_k) + \xi_k` with :math:`\xi_k \sim N(0, \Xi)`.

The locally conditional discretisation (LCD) freezes the frequency over
each step, which makes both blocks exactly solvable.

"""
from __future__ import print_function, division

import dataclasses
from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianBelief

__all__ = ['ModelParams', 'H', 'H_V',
           'harmonic_drift_matrix', 'harmonic_transition',
           'harmonic_noise_var', 'harmonic_noise_cov', 'harmonic_kernel',
           'matern32_drift_matrix', 'matern32_dispersion',
           'matern32_stationary_cov', 'matern32_transition',
           'matern32_noise_cov', 'matern32_kernel',
           'dispersion_matrix', 'initial_belief',
           'drift', 'drift_jacobian', 'lcd_mean', 'lcd_jacobian', 'lcd_cov']

# Measurement operator: the chirp is the second state component.
H = np.array([0., 1., 0., 0.])
# Extracts V from the joint state.
H_V = np.array([0., 0., 1., 0.])

_SQRT3 = np.sqrt(3.)


@dataclass(frozen=True)
class ModelParams(object):

    """Tunable parameters of the joint SDE.

    Attributes
    ----------
    lam : float
        Chirp damping rate. :math:`\lambda \ge 0`
    b : float
        Chirp dispersion. :math:`b \ge 0`, b = 0 gives the deterministic
        (legacy) chirp dynamics
    xi : float
        Measurement-noise variance :math:`\Xi > 0`
    ell : float
        Matérn length scale. :math:`\ell > 0`
    sigma : float
        Matérn magnitude scale. :math:`\sigma > 0`
    m0v : float
        Initial mean of V
    p0x : float or None
        Variance of the chirp block at t = 0. None for the default rule,
        see `chirp_prior_var`

    """

    lam: float = .1
    b: float = .1
    xi: float = .1
    ell: float = 1.
    sigma: float = 1.
    m0v: float = 0.
    p0x: float = None

    def __post_init__(self):
        for name in ('lam', 'b', 'xi', 'ell', 'sigma', 'm0v'):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError('Parameter {} must be finite!'.format(name))
            object.__setattr__(self, name, value)
        if self.lam < 0:
            raise ValueError('Damping lam must be nonnegative!')
        if self.b < 0:
            raise ValueError('Dispersion b must be nonnegative!')
        if self.xi <= 0:
            raise ValueError('Noise variance xi must be positive!')
        if self.ell <= 0:
            raise ValueError('Length scale ell must be positive!')
        if self.sigma <= 0:
            raise ValueError('Magnitude sigma must be positive!')
        if self.p0x is not None:
            object.__setattr__(self, 'p0x', float(self.p0x))
            if not self.p0x >= 0:
                raise ValueError('Initial chirp variance must be nonnegative!')

    names = ('lam', 'b', 'xi', 'ell', 'sigma', 'm0v')

    def replace(self, **changes):
        """Copy with some fields changed."""
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        out = dataclasses.asdict(self)
        if out['p0x'] is None:
            del out['p0x']
        return out

    @classmethod
    def from_dict(cls, values):
        fields = set(cls.names) | {'p0x'}
        return cls(**{key: value for key, value in values.items()
                      if key in fields})

    def chirp_prior_var(self):
        """Variance of each chirp component at t = 0.

        The stationary variance b^2 / (2 lam) when it exists, floored at
        one (unit-amplitude chirps) so that b = 0 does not freeze the
        chirp at zero.

        """
        if self.p0x is not None:
            return self.p0x
        if self.lam > 0:
            return max(self.b ** 2 / (2 * self.lam), 1.)
        return 1.


def _check_finite(*args):
    for arg in args:
        if not np.all(np.isfinite(arg)):
            raise ValueError('Arguments must be finite!')


def harmonic_drift_matrix(f, lam):
    """Drift matrix [[-lam, -2 pi f], [2 pi f, -lam]] of the harmonic SDE."""
    omega = 2 * np.pi * f
    return np.array([[-lam, -omega], [omega, -lam]])


def harmonic_transition(f, dt, lam):
    """Transition matrix of the harmonic SDE over a step.

    Parameters
    ----------
    f : float or array_like
        Frequency in Hz
    dt : float or array_like
        Step length. :math:`\Delta \ge 0`
    lam : float
        Damping rate

    Returns
    -------
    (..., 2, 2) array
        :math:`e^{-\lambda \Delta} R(2 \pi f \Delta)`, broadcast over f
        and dt

    """
    _check_finite(f, dt, lam)
    if np.any(np.asarray(dt) < 0) or lam < 0:
        raise ValueError('dt and lam must be nonnegative!')
    f, dt = np.broadcast_arrays(np.asarray(f, dtype=float),
                                np.asarray(dt, dtype=float))
    angle = 2 * np.pi * f * dt
    decay = np.exp(-lam * dt)
    cos, sin = decay * np.cos(angle), decay * np.sin(angle)
    out = np.empty(angle.shape + (2, 2))
    out[..., 0, 0] = cos
    out[..., 0, 1] = -sin
    out[..., 1, 0] = sin
    out[..., 1, 1] = cos
    return out


def harmonic_noise_var(dt, lam, b):
    """Scalar variance of each chirp component accumulated over dt."""
    if lam > 0:
        return b ** 2 * -np.expm1(-2 * lam * dt) / (2 * lam)
    return b ** 2 * dt


def harmonic_noise_cov(dt, lam, b):
    """Process noise covariance Sigma(dt) of the harmonic SDE.

    Returns
    -------
    (2, 2) array
        A nonnegative multiple of the identity

    """
    if dt < 0:
        raise ValueError('dt must be nonnegative!')
    return harmonic_noise_var(dt, lam, b) * np.eye(2)


def harmonic_kernel(t, t_prime, f, lam, b, p0x):
    """Cross covariance Cov[X(t), X(t')] of the constant-frequency SDE.

    Parameters
    ----------
    t, t_prime : float
        Nonnegative times
    f : float
        Frequency
    lam, b : float
        Damping and dispersion
    p0x : (2, 2) array
        Covariance of X(0)

    Returns
    -------
    (2, 2) array

    """
    if t < 0 or t_prime < 0:
        raise ValueError('Times must be nonnegative!')
    p0x = np.asarray(p0x, dtype=float)

    def marginal(s):
        trans = harmonic_transition(f, s, lam)
        return trans.dot(p0x).dot(trans.T) + harmonic_noise_cov(s, lam, b)

    if t < t_prime:
        return marginal(t).dot(harmonic_transition(f, t_prime - t, lam).T)
    return harmonic_transition(f, t - t_prime, lam).dot(marginal(t_prime))


def matern32_drift_matrix(ell):
    """Drift matrix M of the Matérn 3/2 SDE."""
    gamma = _SQRT3 / ell
    return np.array([[0., 1.], [-gamma ** 2, -2 * gamma]])


def matern32_dispersion(ell, sigma):
    """Dispersion vector L of the Matérn 3/2 SDE."""
    return np.array([0., 2 * sigma * (_SQRT3 / ell) ** 1.5])


def matern32_stationary_cov(ell, sigma):
    """Stationary covariance diag(sigma^2, 3 sigma^2 / ell^2)."""
    return np.diag([sigma ** 2, 3 * sigma ** 2 / ell ** 2])


def matern32_transition(dt, ell):
    """Closed-form exp(dt M) of the Matérn 3/2 SDE.

    Parameters
    ----------
    dt : float
        Step length
    ell : float
        Length scale

    Returns
    -------
    (2, 2) array

    """
    if dt < 0 or ell <= 0:
        raise ValueError('Need dt >= 0 and ell > 0!')
    gamma = _SQRT3 / ell
    eta = dt * gamma
    return np.exp(-eta) * np.array([[1 + eta, dt],
                                    [-dt * gamma ** 2, 1 - eta]])


def matern32_noise_cov(dt, ell, sigma):
    """Closed-form process noise covariance Lambda(dt) of the Matérn 3/2 SDE.

    Parameters
    ----------
    dt : float
        Step length
    ell, sigma : float
        Length and magnitude scales

    Returns
    -------
    (2, 2) array
        Zero at dt = 0, tends to the stationary covariance as dt grows

    """
    if dt < 0:
        raise ValueError('dt must be nonnegative!')
    gamma = _SQRT3 / ell
    eta = dt * gamma
    beta = sigma ** 2 * np.exp(-2 * eta)
    off = 2 * dt ** 2 * gamma ** 3 * beta
    return np.array([
        [sigma ** 2 - beta * (2 * eta + 2 * eta ** 2 + 1), off],
        [off,
         gamma ** 2 * (sigma ** 2 + beta * (2 * eta - 2 * eta ** 2 - 1))]])


def matern32_kernel(t, t_prime, ell, sigma):
    """Matérn 3/2 covariance sigma^2 (1 + psi) exp(-psi).

    Vectorised over t and t_prime.

    """
    if ell <= 0 or sigma <= 0:
        raise ValueError('Need ell > 0 and sigma > 0!')
    psi = _SQRT3 * np.abs(np.asarray(t) - np.asarray(t_prime)) / ell
    return sigma ** 2 * (1 + psi) * np.exp(-psi)


def dispersion_matrix(params):
    """Dispersion B (4 x 3) of the joint SDE."""
    out = np.zeros((4, 3))
    out[0, 0] = params.b
    out[1, 1] = params.b
    out[2:, 2] = matern32_dispersion(params.ell, params.sigma)
    return out


def initial_belief(params):
    """Prior N(m0, P0) of the joint state at the time origin.

    The chirp block starts at zero mean with variance
    `ModelParams.chirp_prior_var`; the V block starts at [m0v, 0] with
    the Matérn stationary covariance.

    """
    mean = np.array([0., 0., params.m0v, 0.])
    cov = np.zeros((4, 4))
    cov[:2, :2] = params.chirp_prior_var() * np.eye(2)
    cov[2:, 2:] = matern32_stationary_cov(params.ell, params.sigma)
    return GaussianBelief(mean, cov)


def _rotate(x1, x2, angle, decay):
    cos, sin = np.cos(angle), np.sin(angle)
    return decay * (cos * x1 - sin * x2), decay * (sin * x1 + cos * x2)


def drift(u, params, bij):
    """Drift A(u) u of the joint SDE.

    Parameters
    ----------
    u : (..., 4) array
        States
    params : ModelParams
    bij : Bijection

    Returns
    -------
    (..., 4) array

    """
    u = np.asarray(u, dtype=float)
    x1, x2, v, vdot = u[..., 0], u[..., 1], u[..., 2], u[..., 3]
    omega = 2 * np.pi * bij.forward(v)
    mat = matern32_drift_matrix(params.ell)
    out = np.empty_like(u)
    out[..., 0] = -params.lam * x1 - omega * x2
    out[..., 1] = omega * x1 - params.lam * x2
    out[..., 2] = vdot
    out[..., 3] = mat[1, 0] * v + mat[1, 1] * vdot
    return out


def drift_jacobian(u, params, bij):
    """Jacobian of `drift` at a single state.

    Returns
    -------
    (4, 4) array

    """
    x1, x2, v, _ = u
    omega = 2 * np.pi * bij.forward(v)
    domega = 2 * np.pi * bij.derivative(v)
    jac = np.zeros((4, 4))
    jac[:2, :2] = harmonic_drift_matrix(omega / (2 * np.pi), params.lam)
    jac[0, 2] = -domega * x2
    jac[1, 2] = domega * x1
    jac[2:, 2:] = matern32_drift_matrix(params.ell)
    return jac


def lcd_mean(u, dt, params, bij):
    """Conditional mean Phi(u) of the LCD discretisation over dt.

    The chirp block is rotated by dt 2 pi g(v) and damped by
    exp(-lam dt); the Matérn block is propagated exactly.

    Parameters
    ----------
    u : (..., 4) array
        States at the start of the step
    dt : float
        Step length
    params : ModelParams
    bij : Bijection

    Returns
    -------
    (..., 4) array

    """
    if dt < 0:
        raise ValueError('dt must be nonnegative!')
    u = np.asarray(u, dtype=float)
    angle = dt * 2 * np.pi * bij.forward(u[..., 2])
    out = np.empty_like(u)
    out[..., 0], out[..., 1] = _rotate(u[..., 0], u[..., 1], angle,
                                       np.exp(-params.lam * dt))
    out[..., 2:] = u[..., 2:].dot(matern32_transition(dt, params.ell).T)
    return out


def lcd_jacobian(u, dt, params, bij):
    """Jacobian of `lcd_mean` with respect to the state.

    The derivative of the rotation block with respect to v passes through
    the angle as 2 pi dt g'(v).

    Returns
    -------
    (4, 4) array

    """
    x1, x2, v, _ = u
    angle = dt * 2 * np.pi * bij.forward(v)
    dangle = dt * 2 * np.pi * bij.derivative(v)
    decay = np.exp(-params.lam * dt)
    cos, sin = np.cos(angle), np.sin(angle)
    jac = np.zeros((4, 4))
    jac[:2, :2] = decay * np.array([[cos, -sin], [sin, cos]])
    jac[0, 2] = decay * dangle * (-sin * x1 - cos * x2)
    jac[1, 2] = decay * dangle * (cos * x1 - sin * x2)
    jac[2:, 2:] = matern32_transition(dt, params.ell)
    return jac


def lcd_cov(dt, params):
    """Process noise covariance blkdiag(Sigma(dt), Lambda(dt))."""
    out = np.zeros((4, 4))
    out[:2, :2] = harmonic_noise_cov(dt, params.lam, params.b)
    out[2:, 2:] = matern32_noise_cov(dt, params.ell, params.sigma)
    return out
