"""Spontaneous-emission noise of the switched amplifier.

The accumulated noise ``delta(tau)`` reduces to the one-parameter family of
integrals ``I(x) = integral_0^x sech(u)**aprime du`` because the two rates sum
to a constant.  ``I`` is normalized as the definite integral from zero, so it
is odd, vanishes at the origin and saturates at the gamma-function limit
:func:`noise_integral_limit`; this is the normalization that makes
``delta(0) = 0`` and the split ``I(tau - tau0) + I(tau0)`` exact.

The shipped computation path for ``delta`` is the closed combination backed
by adaptive quadrature of ``I``; :func:`delta_by_quadrature` keeps the raw
defining integral available as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .core import AmplifierParams, coeff_a, coeff_c, log_cosh, log_gain, gain
from .errors import QuadratureError

#: Default relative tolerance for the adaptive quadrature of I.
DEFAULT_RTOL = 1e-10
_ABS_TOL = 1e-14


def _sech_pow(aprime):
    return lambda u: math.exp(-aprime * (abs(u) + math.log1p(math.exp(-2.0 * abs(u))) - math.log(2.0)))


def _quad_segment(aprime, lo, hi, rtol):
    val, err, info, *msg = quad(_sech_pow(aprime), lo, hi, epsabs=_ABS_TOL,
                                epsrel=rtol, limit=200, full_output=True)
    if msg or err > 10.0 * max(rtol * abs(val), _ABS_TOL):
        raise QuadratureError(
            f"sech^{aprime} integral on [{lo}, {hi}] did not reach rtol={rtol}: "
            f"estimated error {err:.3e}" + (f" ({msg[0]})" if msg else ""))
    return val


def noise_integral(aprime: float, x, rtol: float = DEFAULT_RTOL):
    """I(x) = integral of sech(u)**aprime from 0 to x, by adaptive quadrature.

    Odd in ``x``, strictly increasing, bounded by
    ``+-noise_integral_limit(aprime)``.  Array input is evaluated
    cumulatively segment by segment, so dense time grids cost about one
    adaptive pass.

    Raises
    ------
    QuadratureError
        If the requested relative tolerance cannot be certified.
    """
    if not aprime > 0.0:
        raise ValueError(f"aprime must be > 0, got {aprime}")
    if np.isscalar(x) or np.ndim(x) == 0:
        x = float(x)
        return math.copysign(_quad_segment(aprime, 0.0, abs(x), rtol), x) if x != 0.0 else 0.0

    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    order = np.argsort(np.abs(flat))
    out = np.empty_like(flat)
    acc = 0.0
    prev = 0.0
    for idx in order:
        xi = abs(flat[idx])
        if xi != prev:
            acc += _quad_segment(aprime, prev, xi, rtol)
            prev = xi
        out[idx] = math.copysign(acc, flat[idx]) if flat[idx] != 0.0 else 0.0
    return out.reshape(x.shape)


def noise_integral_even(m: int, x):
    """Closed form of the even-exponent integral I with exponent ``2 m``.

    A tanh-weighted polynomial in 1/cosh**2; every term carries a
    non-positive power of cosh, so the expression stays finite for any x.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError(f"m must be a positive integer, got {m!r}")
    x = np.asarray(x, dtype=float)
    lc = log_cosh(x)
    total = np.zeros_like(lc)
    for k in range(m):
        if k == 0:
            coef = 1.0
        else:
            coef = math.exp(gammaln(m) + gammaln(m - k - 0.5)
                            - gammaln(m - k) - gammaln(m - 0.5))
        total += coef * np.exp((2 * k - 2 * m + 2) * lc)
    return np.tanh(x) / (2 * m - 1) * total


def _arctan_sinh(x):
    # arctan(sinh x) == gudermannian(x); sinh overflows past ~710, the
    # exponential form does not.
    x = np.asarray(x, dtype=float)
    return np.sign(x) * (np.pi / 2.0 - 2.0 * np.arctan(np.exp(-np.abs(x))))


def noise_integral_odd(m: int, x):
    """Closed form of the odd-exponent integral I with exponent ``2 m + 1``.

    Same polynomial structure as the even case plus the arctan(sinh x) term
    weighted by the double-factorial ratio (2m-1)!!/(2m)!!.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError(f"m must be a positive integer, got {m!r}")
    x = np.asarray(x, dtype=float)
    lc = log_cosh(x)
    total = np.zeros_like(lc)
    for k in range(m):
        if k == 0:
            coef = 1.0
        else:
            coef = math.exp(gammaln(m - k) + gammaln(m + 0.5)
                            - gammaln(m) - gammaln(m - k + 0.5))
        total += coef * np.exp((2 * k - 2 * m + 1) * lc)
    dfac = math.exp(gammaln(m + 0.5) - gammaln(m + 1)) / math.sqrt(math.pi)
    return np.tanh(x) / (2 * m) * total + dfac * _arctan_sinh(x)


def noise_integral_limit(aprime: float) -> float:
    """Large-argument limit of I: (sqrt(pi)/2) Gamma(a/2) / Gamma((a+1)/2).

    Strictly decreasing in ``aprime``; diverges like 1/aprime at the origin
    (``inf`` is returned below 1e-12).
    """
    if aprime < 0.0:
        raise ValueError(f"aprime must be >= 0, got {aprime}")
    if aprime < 1e-12:
        return math.inf
    return 0.5 * math.sqrt(math.pi) * math.exp(gammaln(aprime / 2.0) - gammaln((aprime + 1.0) / 2.0))


def _i_sum(params: AmplifierParams, tau, rtol):
    """I(tau - tau0) + I(tau0), evaluated without cancellation.

    Since I is odd, the sum equals the single integral of sech**aprime over
    [-tau0, tau - tau0]; summing two large near-opposite I values instead
    loses every significant digit once aprime * tau0 is large (for
    aprime = 5, tau0 = 8 the two terms agree to 17 digits at small tau).
    Array input is accumulated segment by segment in ascending tau.
    """
    lo = -params.tau0
    if np.isscalar(tau) or np.ndim(tau) == 0:
        hi = float(tau) - params.tau0
        return _quad_segment(params.aprime, lo, hi, rtol) if hi > lo else 0.0
    tau = np.asarray(tau, dtype=float)
    flat = tau.ravel()
    order = np.argsort(flat)
    out = np.empty_like(flat)
    acc = 0.0
    prev = lo
    for idx in order:
        hi = flat[idx] - params.tau0
        if hi > prev:
            acc += _quad_segment(params.aprime, prev, hi, rtol)
            prev = hi
        out[idx] = acc
    return out.reshape(tau.shape)


def delta(params: AmplifierParams, tau, rtol: float = DEFAULT_RTOL):
    """Accumulated spontaneous-emission noise delta(tau), tau >= 0.

    Evaluates the closed combination

        (aprime + 2 bprime)/2 * cosh(tau - tau0)**aprime
            * [I(tau - tau0) + I(tau0)]

    which equals G(tau) * (aprime + 2 bprime)/2 * cosh(tau0)**aprime * [...]
    with the gain folded in.  The bracket is computed as one positive
    integral (see ``_i_sum``) and the product is assembled in log space, so
    neither cancellation nor cosh overflow can corrupt it.  delta(0) = 0 and
    delta is nondecreasing.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0):
        raise ValueError("delta is defined for tau >= 0 only")
    i_sum = np.asarray(_i_sum(params, tau, rtol), dtype=float)
    pref = 0.5 * (params.aprime + 2.0 * params.bprime)
    positive = i_sum > 0.0
    log_i = np.log(np.where(positive, i_sum, 1.0))
    with np.errstate(over="ignore"):
        out = np.where(positive,
                       pref * np.exp(params.aprime * log_cosh(tau - params.tau0) + log_i),
                       0.0)
    return out if out.ndim else float(out)


def delta_by_quadrature(params: AmplifierParams, tau: float,
                        rtol: float = 1e-11) -> float:
    """delta(tau) from its defining integral, as an independent cross-check.

    Integrates (coeff_a + coeff_c) / G directly, without assuming the two
    rates sum to a constant or any normalization of I.
    """
    tau = float(tau)
    if tau < 0.0:
        raise ValueError("delta is defined for tau >= 0 only")
    if tau == 0.0:
        return 0.0

    def integrand(s):
        return float((coeff_a(params, s) + coeff_c(params, s))
                     * np.exp(-log_gain(params, s)))

    val, err, info, *msg = quad(integrand, 0.0, tau, epsabs=_ABS_TOL,
                                epsrel=rtol, limit=200, full_output=True)
    if msg:
        raise QuadratureError(f"defining integral for delta failed: {msg[0]}")
    return 0.5 * float(gain(params, tau)) * val


def added_noise(params: AmplifierParams, tau, rtol: float = DEFAULT_RTOL):
    """Amplifier added noise delta(tau) / G(tau), referred to the input.

    Computed without forming G and delta separately so that the large-cosh
    factors cancel analytically.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0):
        raise ValueError("added noise is defined for tau >= 0 only")
    i_sum = np.asarray(_i_sum(params, tau, rtol), dtype=float)
    pref = 0.5 * (params.aprime + 2.0 * params.bprime)
    positive = i_sum > 0.0
    log_i = np.log(np.where(positive, i_sum, 1.0))
    with np.errstate(over="ignore"):
        out = np.where(positive,
                       pref * np.exp(params.aprime * log_cosh(params.tau0) + log_i),
                       0.0)
    return out if out.ndim else float(out)


def added_noise_limit(params: AmplifierParams) -> float:
    """Asymptotic added noise for tau -> inf.

    Equals (1/2 + n_medium) * sqrt(pi) * Gamma(aprime/2 + 1) /
    Gamma((aprime+1)/2); minimized in the instant-switching limit
    aprime -> 0, where it reaches the floor :func:`caves_limit`.
    """
    ap = params.aprime
    ratio = math.sqrt(math.pi) * math.exp(gammaln(ap / 2.0 + 1.0) - gammaln((ap + 1.0) / 2.0))
    return (0.5 + params.n_medium) * ratio


def caves_limit(n_medium: float) -> float:
    """Minimum added noise of any phase-insensitive amplifier at infinite gain."""
    if n_medium < 0.0:
        raise ValueError(f"n_medium must be >= 0, got {n_medium}")
    return 0.5 + n_medium


def standard_added_noise(a_rate: float, c_rate: float, gain_value: float) -> float:
    """Added noise of the constant-coefficient amplifier at gain G.

    (1/2) (A + C)/(A - C) (1 - 1/G); requires the amplifying regime
    A > C >= 0 and G >= 1.
    """
    if c_rate < 0.0 or a_rate <= c_rate:
        raise ValueError("amplifier regime requires a_rate > c_rate >= 0")
    if gain_value < 1.0:
        raise ValueError(f"gain must be >= 1, got {gain_value}")
    return 0.5 * (a_rate + c_rate) / (a_rate - c_rate) * (1.0 - 1.0 / gain_value)


def m_width(params: AmplifierParams, tau, rtol: float = DEFAULT_RTOL):
    """Mean photon number of the spontaneous-emission field, (G-1)/2 + delta."""
    return 0.5 * (gain(params, tau) - 1.0) + delta(params, tau, rtol)


@dataclass(frozen=True)
class NoiseRecord:
    """Noise figures of one instant: delta, delta/G and the P-kernel width."""

    tau: float
    delta: float
    added_noise: float
    m_width: float


def noise_record(params: AmplifierParams, tau: float,
                 rtol: float = DEFAULT_RTOL) -> NoiseRecord:
    """Bundle delta, added noise and the width m at one instant."""
    g = float(gain(params, tau))
    d = float(delta(params, tau, rtol))
    return NoiseRecord(tau=float(tau), delta=d, added_noise=d / g,
                       m_width=0.5 * (g - 1.0) + d)
