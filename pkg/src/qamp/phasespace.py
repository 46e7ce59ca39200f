"""Characteristic-function solution and quasiprobability grids.

The channel acts on any input characteristic function as

    chi_tau(xi) = exp(-delta(tau) |xi|^2) * chi0(sqrt(G) e^{-i theta} xi),

with theta the rotating-frame phase.  For the shipped Gaussian input classes
the Q / Wigner / P functions follow in closed form (an ordering parameter
``p = -1 / 0 / +1`` shifts every quadrature variance by ``-p/2``), so grids
are never computed by numerical Fourier transform here; the Fourier path
exists only inside the test suite as an independent oracle.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, asdict
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .core import AmplifierParams, gain
from .errors import GridTooSmallError, IllDefinedPError
from .fields import COHERENT, SQUEEZED, THERMAL, InputField
from .noise import delta as noise_delta
from .noise import m_width


@dataclass(frozen=True)
class CharFn:
    """Output characteristic function as a callable closure.

    Satisfies chi(0) = 1 and chi(-xi) = conj(chi(xi)) by construction, and
    |chi(xi)| <= exp(-delta |xi|^2) for the shipped input classes.
    """

    gain: float
    delta: float
    phase: float
    chi0: Callable

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=complex)
        scaled = math.sqrt(self.gain) * np.exp(-1j * self.phase) * xi
        return np.exp(-self.delta * np.abs(xi) ** 2) * self.chi0(scaled)


def char_fn(params: AmplifierParams, field: InputField, tau: float,
            rotating_frame: bool = False) -> CharFn:
    """Characteristic function of the output field at ``tau``.

    ``rotating_frame=True`` freezes the optical rotation (equivalent to
    omega0 = 0), which is the frame the phase-space trajectories are usually
    drawn in.
    """
    tau = float(tau)
    phase = 0.0 if rotating_frame else params.phase_rate * tau
    return CharFn(gain=float(gain(params, tau)),
                  delta=float(noise_delta(params, tau)),
                  phase=phase, chi0=field.chi0)


def general_solution(chi0: Callable, gain_value: float, delta_value: float,
                     phase: float = 0.0) -> CharFn:
    """Channel output for arbitrary (gain, delta), e.g. from custom rate profiles."""
    if gain_value <= 0.0 or delta_value < 0.0:
        raise ValueError("need gain > 0 and delta >= 0")
    return CharFn(gain=float(gain_value), delta=float(delta_value),
                  phase=float(phase), chi0=chi0)


def solve_coefficients(a_fn: Callable, c_fn: Callable, tau: float,
                       rtol: float = 1e-11):
    """(gain, delta) for arbitrary rate callbacks a_fn(tau), c_fn(tau).

    Integrates d(log G)/ds = a - c and dJ/ds = (a + c)/G jointly, then
    delta = G J / 2.  This is the general entry point behind
    :func:`general_solution`; the shipped tanh profile has closed forms in
    :mod:`qamp.core` and :mod:`qamp.noise`.
    """
    tau = float(tau)
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        return 1.0, 0.0

    def rhs(s, y):
        a, c = float(a_fn(s)), float(c_fn(s))
        return [a - c, (a + c) * math.exp(-y[0])]

    sol = solve_ivp(rhs, (0.0, tau), [0.0, 0.0], rtol=rtol, atol=1e-14,
                    method="DOP853")
    if not sol.success:
        raise RuntimeError(f"coefficient integration failed: {sol.message}")
    log_g, j = sol.y[:, -1]
    g = math.exp(log_g)
    return g, 0.5 * g * j


# ----------------------------------------------------------------------
# moments by numerical differentiation of the characteristic function
# ----------------------------------------------------------------------

_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _mixed_partial(fn, p, q, h):
    off_x, w_x = _STENCILS[p]
    off_y, w_y = _STENCILS[q]
    total = 0.0 + 0.0j
    for i, wi in zip(off_x, w_x):
        for j, wj in zip(off_y, w_y):
            total += wi * wj * fn(complex(i * h, j * h))
    return total / h ** (p + q)


def _wirtinger(fn, m, n, h):
    # (d/dxi)^m (-d/dxi*)^n = (-1)^n 2^-(m+n) (dx - i dy)^m (dx + i dy)^n
    total = 0.0 + 0.0j
    for k in range(m + 1):
        for l in range(n + 1):
            coef = (math.comb(m, k) * math.comb(n, l)
                    * (-1j) ** (m - k) * (1j) ** (n - l))
            total += coef * _mixed_partial(fn, k + l, (m - k) + (n - l), h)
    return (-1.0) ** n * 0.5 ** (m + n) * total


def moments_from_chi(chi: CharFn, m: int, n: int,
                     step: Optional[float] = None) -> complex:
    """Normally ordered moment <a^dag^m a^n> from the characteristic function.

    Differentiates exp(|xi|^2 / 2) chi(xi) at the origin with central
    differences (Richardson extrapolated).  Orders up to m + n = 4 are
    supported; beyond m + n = 2 a larger step is used to tame roundoff, and
    results are warned about when the noise scale makes the Gaussian too
    narrow to difference reliably.
    """
    if m < 0 or n < 0 or m + n > 4:
        raise ValueError("supported orders are m, n >= 0 with m + n <= 4")
    if m + n > 2 and chi.delta > 1e3:
        warnings.warn("moment differentiation of order > 2 is ill-conditioned "
                      f"at delta = {chi.delta:.3g}", stacklevel=2)
    if step is None:
        step = 1e-4 if m + n <= 2 else 5e-2

    def fn(xi):
        return complex(np.exp(0.5 * abs(xi) ** 2) * chi(xi))

    coarse = _wirtinger(fn, m, n, step)
    fine = _wirtinger(fn, m, n, step / 2.0)
    return (4.0 * fine - coarse) / 3.0


# ----------------------------------------------------------------------
# quasiprobability grids
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Requested phase-space grid; bounds default to center +- 6 sigma."""

    points: int = 256
    half_width: Optional[float] = None
    center: Optional[complex] = None


@dataclass
class PhaseSpaceGrid:
    """Real-valued quasiprobability samples on a uniform complex-plane grid.

    ``values[j, i]`` is the function at ``re_axis[i] + 1j * im_axis[j]``;
    ``p_order`` selects Q (-1), Wigner (0) or P (+1) ordering.
    """

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray
    p_order: int
    tau: float
    params: dict

    @property
    def cell_area(self) -> float:
        return float((self.re_axis[1] - self.re_axis[0])
                     * (self.im_axis[1] - self.im_axis[0]))

    def integral(self) -> float:
        """Riemann-sum normalization; 1 within 1e-3 for covering grids."""
        return float(self.values.sum() * self.cell_area)

    def grid_moments(self):
        """(mean alpha, mean |alpha|^2) under the sampled density."""
        re, im = np.meshgrid(self.re_axis, self.im_axis)
        w = self.values * self.cell_area
        mean = complex((w * re).sum(), (w * im).sum())
        second = float((w * (re ** 2 + im ** 2)).sum())
        return mean, second

    def header(self) -> dict:
        return {
            "re_axis": {"start": float(self.re_axis[0]),
                        "stop": float(self.re_axis[-1]),
                        "points": int(self.re_axis.size)},
            "im_axis": {"start": float(self.im_axis[0]),
                        "stop": float(self.im_axis[-1]),
                        "points": int(self.im_axis.size)},
            "p_order": self.p_order,
            "tau": self.tau,
            "params": self.params,
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("alpha_re,alpha_im,value\n")
            for j, im in enumerate(self.im_axis):
                for i, re in enumerate(self.re_axis):
                    fh.write(f"{re:.17g},{im:.17g},{self.values[j, i]:.17g}\n")

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.header(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _axes(center: complex, half_width: float, points: int):
    re = np.linspace(center.real - half_width, center.real + half_width, points)
    im = np.linspace(center.imag - half_width, center.imag + half_width, points)
    return re, im


def _gaussian_grid(params, center, var_u, var_v, rotation, p_order, tau,
                   grid_spec):
    grid_spec = grid_spec or GridSpec()
    sigma = math.sqrt(max(var_u, var_v))
    if grid_spec.half_width is None:
        grid_center = center
        half_width = 6.0 * sigma
    else:
        grid_center = grid_spec.center if grid_spec.center is not None else center
        half_width = grid_spec.half_width
        reach = 5.0 * math.sqrt(max(var_u, var_v) / 2.0)
        for corner in (center.real - reach - (grid_center.real - half_width),
                       grid_center.real + half_width - (center.real + reach),
                       center.imag - reach - (grid_center.imag - half_width),
                       grid_center.imag + half_width - (center.imag + reach)):
            if corner < 0.0:
                raise GridTooSmallError(
                    f"state center {center:.4g} +- 5 sigma exceeds the grid "
                    f"({grid_center:.4g} +- {half_width:.4g})")
    re_axis, im_axis = _axes(grid_center, half_width, grid_spec.points)
    re, im = np.meshgrid(re_axis, im_axis)
    d_alpha = (re - center.real) + 1j * (im - center.imag)
    if rotation != 0.0:
        d_alpha = d_alpha * np.exp(1j * rotation)
    u = math.sqrt(2.0) * d_alpha.real
    v = math.sqrt(2.0) * d_alpha.imag
    norm = 1.0 / (math.pi * math.sqrt(var_u * var_v))
    values = norm * np.exp(-u ** 2 / (2.0 * var_u) - v ** 2 / (2.0 * var_v))
    return PhaseSpaceGrid(re_axis=re_axis, im_axis=im_axis, values=values,
                          p_order=p_order, tau=float(tau), params=asdict(params))


def _output_center(params, alpha0, tau, rotating_frame):
    theta = 0.0 if rotating_frame else params.phase_rate * tau
    return complex(math.sqrt(float(gain(params, tau))) * np.exp(-1j * theta) * alpha0), theta


def quasiprob_grid(params: AmplifierParams, field: InputField, tau: float,
                   p_order: int = 0, grid_spec: Optional[GridSpec] = None,
                   rotating_frame: bool = False) -> PhaseSpaceGrid:
    """Quasiprobability grid of the output state for a Gaussian input class.

    ``p_order``: -1 for Q, 0 for Wigner, +1 for P.  Fock inputs have no
    Gaussian quasiprobability and are served by moments only.
    """
    if p_order not in (-1, 0, 1):
        raise ValueError("p_order must be -1, 0 or +1")
    tau = float(tau)
    g = float(gain(params, tau))
    d = float(noise_delta(params, tau))
    shift = 0.5 * p_order
    if field.kind == COHERENT:
        var = d + 0.5 * g - shift
        var_u = var_v = var
        center, theta = _output_center(params, field.alpha0, tau, rotating_frame)
        rotation = 0.0
    elif field.kind == SQUEEZED:
        if field.phi != 0.0 or field.alpha0 != 0j:
            raise ValueError("grids ship for squeezed vacuum with phi = 0")
        var_u = g * 0.5 * math.exp(-2.0 * field.r) + d - shift
        var_v = g * 0.5 * math.exp(2.0 * field.r) + d - shift
        center, theta = _output_center(params, 0j, tau, rotating_frame)
        rotation = theta
    elif field.kind == THERMAL:
        var = g * (field.nbar + 0.5) + d - shift
        var_u = var_v = var
        center, rotation = 0j, 0.0
    else:
        raise ValueError(f"no Gaussian quasiprobability for input kind {field.kind!r}")
    if min(var_u, var_v) <= 0.0:
        raise IllDefinedPError(
            f"p = {p_order} ordering needs positive widths, got "
            f"({var_u:.3g}, {var_v:.3g}) at tau = {tau}")
    return _gaussian_grid(params, center, var_u, var_v, rotation, p_order,
                          tau, grid_spec)


def wigner_coherent(params: AmplifierParams, alpha0, tau: float,
                    grid_spec: Optional[GridSpec] = None,
                    rotating_frame: bool = False) -> PhaseSpaceGrid:
    """Wigner function of an amplified coherent state.

    An isotropic Gaussian of width delta + G/2 whose center spirals inward
    until the inversion instant and outward afterwards.
    """
    return quasiprob_grid(params, InputField.coherent(alpha0), tau, 0,
                          grid_spec, rotating_frame)


def wigner_squeezed_vacuum(params: AmplifierParams, r: float, tau: float,
                           grid_spec: Optional[GridSpec] = None,
                           rotating_frame: bool = False) -> PhaseSpaceGrid:
    """Wigner function of amplified squeezed vacuum (squeeze angle 0).

    Product of Gaussians with variances G exp(-+2r)/2 + delta along the
    rotating quadrature axes, so the grid marginals reproduce the closed-form
    quadrature variances exactly.
    """
    return quasiprob_grid(params, InputField.squeezed(r), tau, 0, grid_spec,
                          rotating_frame)


def wigner_thermal(params: AmplifierParams, nbar: float, tau: float,
                   grid_spec: Optional[GridSpec] = None) -> PhaseSpaceGrid:
    """Wigner function of an amplified thermal state: isotropic, width <n>_out + 1/2."""
    return quasiprob_grid(params, InputField.thermal(nbar), tau, 0, grid_spec)


def wigner_propagator(params: AmplifierParams, alpha, alpha0, tau: float,
                      rotating_frame: bool = False):
    """Wigner-function transfer kernel W_tau(alpha | alpha0).

    A normalized Gaussian of width delta(tau) around the transported center
    sqrt(G) e^{-i theta} alpha0; convolving any input Wigner function with it
    (measure d^2 alpha0) yields the output Wigner function.  At tau = 0 the
    kernel is a delta distribution, reported as inf at the center and 0
    elsewhere.
    """
    tau = float(tau)
    d = float(noise_delta(params, tau))
    center, _ = _output_center(params, 1.0, tau, rotating_frame)
    b2 = np.abs(np.asarray(alpha, dtype=complex)
                - center * np.asarray(alpha0, dtype=complex)) ** 2
    if d == 0.0:
        out = np.where(b2 == 0.0, np.inf, 0.0)
        return float(out) if out.ndim == 0 else out
    out = np.exp(-b2 / d) / (math.pi * d)
    return float(out) if out.ndim == 0 else out


def p_transfer(params: AmplifierParams, alpha, alpha0, tau: float,
               rotating_frame: bool = False):
    """P-function transfer kernel: Gaussian of width m(tau) = (G-1)/2 + delta.

    At tau = 0 the width vanishes and the kernel degenerates to a delta
    distribution (inf at the center, 0 elsewhere).  A negative width would
    mean the output P function is not a proper Gaussian kernel; the tanh
    profile never produces one for tau > 0, but the guard stays.
    """
    tau = float(tau)
    m = float(m_width(params, tau))
    center, _ = _output_center(params, 1.0, tau, rotating_frame)
    b2 = np.abs(np.asarray(alpha, dtype=complex)
                - center * np.asarray(alpha0, dtype=complex)) ** 2
    if m == 0.0:
        out = np.where(b2 == 0.0, np.inf, 0.0)
        return float(out) if out.ndim == 0 else out
    if m < 0.0:
        raise IllDefinedPError(f"P transfer width m({tau}) = {m:.3g} <= 0")
    out = np.exp(-b2 / m) / (math.pi * m)
    return float(out) if out.ndim == 0 else out
