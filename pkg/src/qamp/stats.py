"""Output-field statistics of the transient amplifier.

Every quantity follows from the gain ``G(tau)`` and the accumulated noise
``delta(tau)``: amplitudes scale with sqrt(G), symmetric fluctuations and
quadrature variances transform as ``G (v_in + added_noise)``, the mean photon
number picks up the spontaneous-emission width ``m = (G-1)/2 + delta``, and
the Mandel parameter follows the exact transfer law of the Gaussian channel.
All functions are pure; ``tau`` may be a scalar or an array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AmplifierParams, gain
from .fields import FOCK, SQUEEZED, InputField
from .noise import added_noise, delta, m_width


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of the output field at one instant."""

    tau: float
    mean_a: complex
    sym_fluct: float
    var_u: float
    var_v: float
    mean_n: float
    mandel_q: float


def mean_amplitude(params: AmplifierParams, field: InputField, tau):
    """<a> of the output field: sqrt(G) e^{-i (omega0/epsilon) tau} <a>_in."""
    g = gain(params, tau)
    phase = np.exp(-1j * params.phase_rate * np.asarray(tau, dtype=float))
    return np.sqrt(g) * phase * field.mean_a_in


def output_fluctuations(params: AmplifierParams, field: InputField, tau):
    """Symmetrically ordered fluctuation |Delta a|^2 of the output field.

    Equals G |Delta a|^2_in + delta.  For inputs at the vacuum noise level
    (coherent states) this is 1/2 + m(tau), which never decreases; inputs
    with excess noise shed it while the medium still damps.
    """
    return gain(params, tau) * field.sym_fluct_in + delta(params, tau)


def quadrature_variances(params: AmplifierParams, field: InputField, tau):
    """Rotating-frame quadrature variances, each G (var_in + added_noise).

    For squeezed inputs the axes follow the squeezing frame (an angle ``phi``
    relabels them), so ``var_u`` is always the initially squeezed one.
    """
    g = gain(params, tau)
    noise = added_noise(params, tau)
    return g * (field.var_u_in + noise), g * (field.var_v_in + noise)


def squeezing_retained(params: AmplifierParams, field: InputField, tau):
    """Whether the output is still squeezed, plus the margin to the vacuum level.

    True iff the smaller output quadrature variance is below 1/2; the margin
    is ``1/2 - var_u_out`` (positive while squeezing survives).  This general
    variance test also covers ``tau0 != 0``, where the closed gain inequality
    G < 1 / (s^2 + (aprime + 2 bprime) I(tau)) applies only to tau0 = 0.
    """
    var_u, _ = quadrature_variances(params, field, tau)
    margin = 0.5 - var_u
    return margin > 0.0, margin


def mean_photon_number(params: AmplifierParams, field: InputField, tau):
    """<n> of the output field: G <n>_in + (G - 1)/2 + delta."""
    return gain(params, tau) * field.mean_n_in + m_width(params, tau)


def mandel_q(params: AmplifierParams, field: InputField, tau):
    """Mandel Q of the output field.

    Q_out = [<n>_out^2 + G^2 <n>_in (Q_in - <n>_in)] / <n>_out, the exact
    transfer law of this phase-insensitive Gaussian channel (cross-checked
    against the brute-force master-equation integrator).  Negative values
    mean sub-Poissonian statistics survived.  NaN where <n>_out = 0, which
    happens only for vacuum input at tau = 0; vacuum input at later times is
    well defined (the output is then thermal, Q = m).
    """
    g = np.asarray(gain(params, tau), dtype=float)
    n_out = np.asarray(mean_photon_number(params, field, tau), dtype=float)
    n_in = field.mean_n_in
    transfer = 0.0 if n_in == 0.0 else g ** 2 * n_in * (field.mandel_q_in - n_in)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(n_out > 0.0, (n_out ** 2 + transfer) / np.where(n_out > 0.0, n_out, 1.0), math.nan)
    return float(out) if out.ndim == 0 else out


def moments(params: AmplifierParams, field: InputField, tau: float) -> MomentSet:
    """Assemble the full output moment set at one instant."""
    var_u, var_v = quadrature_variances(params, field, tau)
    return MomentSet(
        tau=float(tau),
        mean_a=complex(mean_amplitude(params, field, tau)),
        sym_fluct=float(output_fluctuations(params, field, tau)),
        var_u=float(var_u),
        var_v=float(var_v),
        mean_n=float(mean_photon_number(params, field, tau)),
        mandel_q=float(mandel_q(params, field, tau)),
    )


def _bisect(fn, lo, hi, f_lo, tol):
    # plain bisection: reproducible and immune to the function's scale
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _first_crossing(fn, tau_max, scan_points, tol):
    taus = np.linspace(0.0, tau_max, scan_points)
    vals = np.array([fn(t) for t in taus])
    sign_change = np.nonzero((vals[:-1] > 0.0) & (vals[1:] <= 0.0))[0]
    if sign_change.size == 0:
        return None
    j = int(sign_change[0])
    return _bisect(fn, taus[j], taus[j + 1], vals[j], tol)


def mandel_zero_time(params: AmplifierParams, field: InputField,
                     tau_max: float = 30.0, tol: float = 1e-8,
                     scan_points: int = 600):
    """First instant where the output Mandel Q crosses zero from below.

    Meaningful for sub-Poissonian inputs (Fock states).  Scans a grid to
    bracket the crossing, then bisects to ``tol``; returns None if Q stays
    negative up to ``tau_max``.
    """
    if field.kind != FOCK:
        raise ValueError("Mandel zero crossing is tracked for Fock inputs")
    return _first_crossing(lambda t: -mandel_q(params, field, t),
                           tau_max, scan_points, tol)


def squeezing_loss_time(params: AmplifierParams, field: InputField,
                        tau_max: float = 30.0, tol: float = 1e-8,
                        scan_points: int = 600):
    """First instant where the squeezed quadrature variance reaches 1/2.

    Returns None if squeezing survives up to ``tau_max``.
    """
    if field.kind != SQUEEZED or not field.r > 0.0:
        raise ValueError("squeezing loss time needs a squeezed input with r > 0")
    return _first_crossing(lambda t: squeezing_retained(params, field, t)[1],
                           tau_max, scan_points, tol)
