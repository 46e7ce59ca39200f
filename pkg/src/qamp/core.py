"""Amplifier parameterization and the elementary time-dependent rate functions.

The amplifying medium switches smoothly from damping to amplification with a
hyperbolic-tangent profile.  Everything downstream consumes the dimensionless
parameters stored in :class:`AmplifierParams`:

* ``aprime`` -- asymptotic gain factor divided by the onset rate,
* ``bprime`` -- thermal floor of both rates divided by the onset rate,
* ``tau0``  -- dimensionless instant of population inversion,

with time measured as ``tau = epsilon * t``.  Physical rates enter only
through the constructors; all functions in this module are pure and accept
scalars or numpy arrays for ``tau``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


def log_cosh(x):
    """log(cosh(x)) without overflow for large ``|x|``."""
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - np.log(2.0)


@dataclass(frozen=True)
class AmplifierParams:
    """Dimensionless description of the switched gain medium.

    Parameters
    ----------
    aprime : float
        Asymptotic gain factor over the onset rate (> 0).
    bprime : float, optional
        Thermal floor of the two rates over the onset rate (>= 0).
    tau0 : float, optional
        Dimensionless inversion instant (>= 0).
    omega0 : float, optional
        Field angular frequency in rad/s.  Used only for rotating-frame
        phases and Kelvin conversion; 0 disables the rotation.
    epsilon : float, optional
        Onset rate in 1/s.  Only the ratio ``omega0 / epsilon`` enters the
        dynamics, as the phase advance per unit ``tau``.
    """

    aprime: float
    bprime: float = 0.0
    tau0: float = 0.0
    omega0: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self):
        if not self.aprime > 0.0:
            raise ValueError(f"aprime must be > 0, got {self.aprime}")
        if self.bprime < 0.0:
            raise ValueError(f"bprime must be >= 0, got {self.bprime}")
        if self.tau0 < 0.0:
            raise ValueError(f"tau0 must be >= 0, got {self.tau0}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    @classmethod
    def from_rates(cls, gain_rate, floor_rate, onset_rate, t0=0.0, omega0=0.0):
        """Build from physical rates (all in 1/s) and the inversion time t0 (s)."""
        return cls(
            aprime=gain_rate / onset_rate,
            bprime=floor_rate / onset_rate,
            tau0=onset_rate * t0,
            omega0=omega0,
            epsilon=onset_rate,
        )

    @classmethod
    def from_medium_occupation(cls, aprime, n_medium, tau0=0.0, omega0=0.0,
                               epsilon=1.0):
        """Build from the medium's mean excitation number ``n_medium = B/A``."""
        if n_medium < 0.0:
            raise ValueError(f"n_medium must be >= 0, got {n_medium}")
        return cls(aprime=aprime, bprime=aprime * n_medium, tau0=tau0,
                   omega0=omega0, epsilon=epsilon)

    @property
    def n_medium(self) -> float:
        """Mean excitation number of the medium, B/A."""
        return self.bprime / self.aprime

    @property
    def phase_rate(self) -> float:
        """Rotating-frame phase advance per unit tau, omega0 / epsilon."""
        return self.omega0 / self.epsilon


def coeff_a(params: AmplifierParams, tau):
    """Instantaneous gain-side rate at time ``tau``.

    Rises from ``bprime`` to ``aprime + bprime`` through a logistic step
    centered at ``tau0``.
    """
    # expit(2x) == e^x / (e^x + e^-x) but never overflows.
    return params.aprime * expit(2.0 * (np.asarray(tau, dtype=float) - params.tau0)) + params.bprime


def coeff_c(params: AmplifierParams, tau):
    """Instantaneous loss-side rate at time ``tau``, the mirror of :func:`coeff_a`."""
    return params.aprime * expit(-2.0 * (np.asarray(tau, dtype=float) - params.tau0)) + params.bprime


def gain_factor(params: AmplifierParams, tau):
    """Net gain factor W(tau) = coeff_a - coeff_c = aprime * tanh(tau - tau0).

    Negative while the medium still absorbs, positive after inversion.
    """
    return params.aprime * np.tanh(np.asarray(tau, dtype=float) - params.tau0)


def log_gain(params: AmplifierParams, tau):
    """log G(tau), the integral of :func:`gain_factor` from 0 to ``tau``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0):
        raise ValueError("gain is defined for tau >= 0 only")
    return params.aprime * (log_cosh(tau - params.tau0) - log_cosh(params.tau0))


def gain(params: AmplifierParams, tau):
    """Amplitude-squared gain G(tau) = [cosh(tau - tau0) / cosh(tau0)]**aprime.

    Evaluated in log space; cosh alone overflows near ``|tau - tau0| ~ 700``.
    G(0) = G(2*tau0) = 1, with the global minimum cosh(tau0)**(-aprime) at
    the inversion instant.

    Raises
    ------
    ValueError
        If any ``tau`` is negative (the evolution starts at tau = 0).
    """
    with np.errstate(over="ignore"):
        # inf is the honest answer once log G exceeds ~709; use log_gain there
        return np.exp(log_gain(params, tau))


def population_ratio(params: AmplifierParams, tau):
    """Excited-to-ground population ratio of the medium, coeff_a / coeff_c.

    Depends on the medium occupation ``n_medium`` only, not on ``aprime``
    and ``bprime`` separately.  Tends to ``n_medium / (1 + n_medium)`` far
    before inversion and to its reciprocal far after.  Returns ``inf`` where
    the loss rate underflows to zero (possible only for ``bprime = 0``).
    """
    num = coeff_a(params, tau)
    den = coeff_c(params, tau)
    with np.errstate(divide="ignore"):
        return np.where(den == 0.0, np.inf, num / np.where(den == 0.0, 1.0, den))
