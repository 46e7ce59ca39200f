"""Input field descriptions and their reference statistics.

Four input classes are supported: coherent, Fock, squeezed coherent and
thermal.  Each carries closed forms for the first and second moments and for
the initial characteristic function ``chi0``; the output-field statistics in
:mod:`qamp.stats` are built on top of these.

Conventions: quadratures u = (a + a^dag)/sqrt(2), v = -i (a - a^dag)/sqrt(2);
the characteristic function is chi(xi) = <exp(xi a^dag - xi* a)>.  For a
squeezed field with angle ``phi = 0`` the u quadrature is the squeezed one,
with variance exp(-2 r)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_laguerre

COHERENT = "coherent"
FOCK = "fock"
SQUEEZED = "squeezed"
THERMAL = "thermal"

_KINDS = (COHERENT, FOCK, SQUEEZED, THERMAL)


@dataclass(frozen=True)
class InputField:
    """Tagged description of the amplifier input state.

    Use the factory classmethods (:meth:`coherent`, :meth:`fock`,
    :meth:`squeezed`, :meth:`thermal`) rather than the raw constructor; only
    the fields relevant to ``kind`` are meaningful.
    """

    kind: str
    alpha0: complex = 0j
    n0: int = 0
    r: float = 0.0
    phi: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown input field kind {self.kind!r}")

    @classmethod
    def coherent(cls, alpha0) -> "InputField":
        return cls(kind=COHERENT, alpha0=complex(alpha0))

    @classmethod
    def fock(cls, n0: int) -> "InputField":
        if not (isinstance(n0, (int, np.integer)) and n0 >= 0):
            raise ValueError(f"Fock occupation must be a nonnegative integer, got {n0!r}")
        return cls(kind=FOCK, n0=int(n0))

    @classmethod
    def squeezed(cls, r: float, phi: float = 0.0, alpha0=0j) -> "InputField":
        if r < 0.0:
            raise ValueError(f"squeeze magnitude must be >= 0, got {r}")
        return cls(kind=SQUEEZED, r=float(r), phi=float(phi), alpha0=complex(alpha0))

    @classmethod
    def thermal(cls, nbar: float) -> "InputField":
        if nbar < 0.0:
            raise ValueError(f"thermal occupation must be >= 0, got {nbar}")
        return cls(kind=THERMAL, nbar=float(nbar))

    # ------------------------------------------------------------------
    # first and second moments of the input state
    # ------------------------------------------------------------------

    @property
    def mean_a_in(self) -> complex:
        """<a> of the input state."""
        if self.kind in (COHERENT, SQUEEZED):
            return self.alpha0
        return 0j

    @property
    def mean_n_in(self) -> float:
        """<n> of the input state."""
        if self.kind == COHERENT:
            return abs(self.alpha0) ** 2
        if self.kind == FOCK:
            return float(self.n0)
        if self.kind == SQUEEZED:
            return abs(self.alpha0) ** 2 + math.sinh(self.r) ** 2
        return self.nbar

    @property
    def mean_asq_in(self) -> complex:
        """<a^2> of the input state."""
        if self.kind == COHERENT:
            return self.alpha0 ** 2
        if self.kind == SQUEEZED:
            return self.alpha0 ** 2 - math.cosh(self.r) * math.sinh(self.r) * np.exp(-1j * self.phi)
        return 0j

    @property
    def var_u_in(self) -> float:
        """Variance of the u quadrature (for squeezed kinds: the squeezed axis)."""
        if self.kind == FOCK:
            return self.n0 + 0.5
        if self.kind == SQUEEZED:
            return 0.5 * math.exp(-2.0 * self.r)
        if self.kind == THERMAL:
            return self.nbar + 0.5
        return 0.5

    @property
    def var_v_in(self) -> float:
        """Variance of the v quadrature (for squeezed kinds: the stretched axis)."""
        if self.kind == SQUEEZED:
            return 0.5 * math.exp(2.0 * self.r)
        return self.var_u_in

    @property
    def sym_fluct_in(self) -> float:
        """Symmetrically ordered fluctuation |Delta a|^2 = (var_u + var_v)/2."""
        return 0.5 * (self.var_u_in + self.var_v_in)

    @property
    def mandel_q_in(self) -> float:
        """Mandel Q of the input state; NaN for vacuum (<n> = 0)."""
        n = self.mean_n_in
        if n == 0.0:
            return math.nan
        if self.kind == COHERENT:
            return 0.0
        if self.kind == FOCK:
            return -1.0
        if self.kind == THERMAL:
            return self.nbar
        return self._squeezed_var_n() / n - 1.0

    def _squeezed_var_n(self) -> float:
        # Gaussian-state photon variance: Var(n) = (Tr C^2 - 1/2)/2 + R^T C R,
        # with C diagonal in the squeeze frame and R the displacement there.
        vu = self.var_u_in
        vv = self.var_v_in
        beta = self.alpha0 * np.exp(1j * self.phi / 2.0)
        u_bar = math.sqrt(2.0) * beta.real
        v_bar = math.sqrt(2.0) * beta.imag
        return 0.5 * (vu ** 2 + vv ** 2 - 0.5) + u_bar ** 2 * vu + v_bar ** 2 * vv

    # ------------------------------------------------------------------
    # initial characteristic function
    # ------------------------------------------------------------------

    def chi0(self, xi):
        """Characteristic function of the input state at argument ``xi``.

        Accepts complex scalars or arrays.
        """
        xi = np.asarray(xi, dtype=complex)
        a2 = np.abs(xi) ** 2
        if self.kind == COHERENT:
            disp = xi * np.conj(self.alpha0) - np.conj(xi) * self.alpha0
            return np.exp(-0.5 * a2 + disp)
        if self.kind == FOCK:
            return np.exp(-0.5 * a2) * eval_laguerre(self.n0, a2)
        if self.kind == THERMAL:
            return np.exp(-(self.nbar + 0.5) * a2)
        stretched = xi * math.cosh(self.r) + np.conj(xi) * np.exp(-1j * self.phi) * math.sinh(self.r)
        disp = xi * np.conj(self.alpha0) - np.conj(xi) * self.alpha0
        return np.exp(-0.5 * np.abs(stretched) ** 2 + disp)
