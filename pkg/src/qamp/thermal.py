"""Departure from thermal equilibrium: effective temperature and entropy.

A thermal input stays thermal under the phase-insensitive channel, so its
state at any instant is fixed by the output occupation alone.  Temperature
follows from inverting the Bose occupation, entropy from the closed form for
a thermal state; both are reported either in natural units (k_B = hbar = 1,
temperature in units of hbar * omega0 / k_B) or in Kelvin when the field
frequency is supplied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_boltzmann

from .core import AmplifierParams
from .fields import InputField
from .stats import mean_photon_number

DIMENSIONLESS = "dimensionless"
KELVIN = "kelvin"


@dataclass(frozen=True)
class ThermalState:
    """Thermal input description plus the unit convention for temperatures."""

    nbar_in: float
    omega0: float = 0.0
    unit_mode: str = DIMENSIONLESS

    def __post_init__(self):
        if self.nbar_in < 0.0:
            raise ValueError(f"nbar_in must be >= 0, got {self.nbar_in}")
        if self.unit_mode not in (DIMENSIONLESS, KELVIN):
            raise ValueError(f"unknown unit mode {self.unit_mode!r}")
        if self.unit_mode == KELVIN and not self.omega0 > 0.0:
            raise ValueError("Kelvin output needs omega0 > 0")

    @classmethod
    def from_temperature(cls, temperature, omega0=0.0, unit_mode=DIMENSIONLESS):
        """Build from a temperature instead of an occupation."""
        scale = _scale(omega0, unit_mode)
        return cls(nbar_in=occupation_of_temperature(temperature, scale),
                   omega0=omega0, unit_mode=unit_mode)

    @property
    def temperature_scale(self) -> float:
        """hbar * omega0 / k_B in the selected units (1 when dimensionless)."""
        return _scale(self.omega0, self.unit_mode)


def _scale(omega0, unit_mode):
    return hbar * omega0 / k_boltzmann if unit_mode == KELVIN else 1.0


def temperature_of_occupation(n, scale: float = 1.0):
    """Temperature with Bose occupation ``n``: scale / ln(1 + 1/n); 0 at n = 0."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 0.0):
        raise ValueError("occupation must be >= 0")
    with np.errstate(divide="ignore"):
        t = scale / np.log1p(1.0 / np.where(n > 0.0, n, 1.0))
    out = np.where(n > 0.0, t, 0.0)
    return float(out) if out.ndim == 0 else out


def occupation_of_temperature(temperature, scale: float = 1.0):
    """Bose occupation at the given temperature: 1 / (exp(scale/T) - 1)."""
    temperature = np.asarray(temperature, dtype=float)
    if np.any(temperature < 0.0):
        raise ValueError("temperature must be >= 0")
    with np.errstate(divide="ignore", over="ignore"):
        n = 1.0 / np.expm1(scale / np.where(temperature > 0.0, temperature, 1.0))
    out = np.where(temperature > 0.0, n, 0.0)
    return float(out) if out.ndim == 0 else out


def entropy_of_occupation(n):
    """Thermal-state von Neumann entropy in units of k_B.

    (n+1) ln(n+1) - n ln(n), with 0 ln 0 = 0; zero iff the state is vacuum.
    """
    n = np.asarray(n, dtype=float)
    if np.any(n < 0.0):
        raise ValueError("occupation must be >= 0")
    safe = np.where(n > 0.0, n, 1.0)
    out = np.where(n > 0.0, (n + 1.0) * np.log1p(n) - n * np.log(safe), 0.0)
    return float(out) if out.ndim == 0 else out


def temperature(params: AmplifierParams, state: ThermalState, tau):
    """Effective temperature of the output field at ``tau``.

    Constant while the medium damps an input already at its equilibrium
    occupation, then rises once inversion approaches.
    """
    n_out = mean_photon_number(params, InputField.thermal(state.nbar_in), tau)
    return temperature_of_occupation(n_out, state.temperature_scale)


def entropy(params: AmplifierParams, state: ThermalState, tau):
    """Von Neumann entropy of the output field at ``tau``, in units of k_B."""
    n_out = mean_photon_number(params, InputField.thermal(state.nbar_in), tau)
    return entropy_of_occupation(n_out)


def entropy_slope(params: AmplifierParams, state: ThermalState,
                  window=(10.0, 14.0)) -> float:
    """Late-time entropy increase rate, [S(t1) - S(t0)] / (t1 - t0).

    The default window (10, 14) is the finite difference used for the
    rate-versus-aprime comparison.
    """
    t0, t1 = window
    s0 = float(entropy(params, state, t0))
    s1 = float(entropy(params, state, t1))
    return (s1 - s0) / (t1 - t0)
