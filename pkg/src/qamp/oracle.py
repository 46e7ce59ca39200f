"""Brute-force verifier: master-equation evolution in a truncated Fock basis.

Nothing here reuses the analytic gain or noise formulas.  The density matrix
is stepped with classic fixed-step fourth-order Runge-Kutta (bit-reproducible
for a given truncation and step), and scalar moment ODEs provide an even
cheaper independent check.  The right-hand side applies the two dissipators

    aprime(tau) * D[a^dag] rho + cprime(tau) * D[a] rho,

each with the standard 1/2-weighted anticommutator; with this convention
d<n>/dtau = W <n> + aprime(tau), which the tests assert explicitly because a
factor-2 slip here would silently rescale every rate in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.linalg import expm

from .core import AmplifierParams, coeff_a, coeff_c, gain_factor
from .errors import StepTooLargeError, TruncationUnsafeError
from .fields import COHERENT, FOCK, THERMAL, InputField

TRACE_DRIFT_TOL = 1e-6
LEAKAGE_TOL = 1e-6


def truncation_dim(expected_n_out: float, minimum: int = 20) -> int:
    """Heuristic Fock-space size: 8x the expected occupation plus headroom."""
    return max(minimum, int(math.ceil(8.0 * expected_n_out + 20.0)))


# ----------------------------------------------------------------------
# initial states
# ----------------------------------------------------------------------

def rho_coherent(alpha, dim: int) -> np.ndarray:
    alpha = complex(alpha)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, dim)))))
    n = np.arange(dim)
    if alpha == 0j:
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
    else:
        vec = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(complex(alpha)) - 0.5 * log_fact)
    vec /= np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


def rho_fock(n0: int, dim: int) -> np.ndarray:
    if n0 >= dim:
        raise ValueError(f"Fock level {n0} does not fit in dimension {dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n0, n0] = 1.0
    return rho


def rho_thermal(nbar: float, dim: int) -> np.ndarray:
    if nbar == 0.0:
        return rho_fock(0, dim)
    n = np.arange(dim)
    weights = np.exp(n * math.log(nbar / (nbar + 1.0)))
    weights /= weights.sum()
    return np.diag(weights).astype(complex)


def rho_squeezed(r: float, phi: float, alpha, dim: int) -> np.ndarray:
    a = ladder(dim)
    # squeeze argument chosen so the u quadrature carries exp(-2r)/2 at phi=0
    z = r * np.exp(-1j * phi)
    squeeze = expm(0.5 * (np.conj(z) * a @ a - z * a.conj().T @ a.conj().T))
    vec = squeeze[:, 0]
    if complex(alpha) != 0j:
        displace = expm(complex(alpha) * a.conj().T - np.conj(complex(alpha)) * a)
        vec = displace @ vec
    vec /= np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


def rho_from_field(field: InputField, dim: int) -> np.ndarray:
    if field.kind == COHERENT:
        return rho_coherent(field.alpha0, dim)
    if field.kind == FOCK:
        return rho_fock(field.n0, dim)
    if field.kind == THERMAL:
        return rho_thermal(field.nbar, dim)
    return rho_squeezed(field.r, field.phi, field.alpha0, dim)


def ladder(dim: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)


# ----------------------------------------------------------------------
# master equation right-hand side and moments
# ----------------------------------------------------------------------

class _Workspace:
    """Precomputed index weights for the two dissipators at a fixed dimension."""

    def __init__(self, dim: int):
        self.dim = dim
        sq = np.sqrt(np.arange(1.0, dim))
        self.up_outer = np.outer(sq, sq)          # <- a^dag rho a weights
        n = np.arange(float(dim))
        w_gain = np.append(n[1:], 0.0)            # diag(a a^dag), truncated top
        self.gain_anti = 0.5 * (w_gain[:, None] + w_gain[None, :])
        self.loss_anti = 0.5 * (n[:, None] + n[None, :])

    def gain_dissipator(self, rho, out):
        out[1:, 1:] += self.up_outer * rho[:-1, :-1]
        out -= self.gain_anti * rho
        return out

    def loss_dissipator(self, rho, out):
        out[:-1, :-1] += self.up_outer * rho[1:, 1:]
        out -= self.loss_anti * rho
        return out


def lindblad_rhs(rho: np.ndarray, params: AmplifierParams, tau: float) -> np.ndarray:
    """d rho / d tau for the switched gain/loss master equation.

    Trace-free and Hermiticity-preserving by construction, including at the
    truncation edge.
    """
    ws = _Workspace(rho.shape[0])
    a_rate = float(coeff_a(params, tau))
    c_rate = float(coeff_c(params, tau))
    gain_part = ws.gain_dissipator(rho, np.zeros_like(rho))
    loss_part = ws.loss_dissipator(rho, np.zeros_like(rho))
    return a_rate * gain_part + c_rate * loss_part


def moments_of(rho: np.ndarray) -> dict:
    """Moment dictionary of a Fock-basis density matrix."""
    dim = rho.shape[0]
    n = np.arange(float(dim))
    pop = np.real(np.diag(rho))
    sq = np.sqrt(n[1:])
    mean_a = complex(np.sum(sq * np.diagonal(rho, offset=-1)))
    sq2 = np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0))
    mean_asq = complex(np.sum(sq2 * np.diagonal(rho, offset=-2)))
    mean_n = float(np.sum(n * pop))
    mean_n2 = float(np.sum(n ** 2 * pop))
    sym = mean_n + 0.5 - abs(mean_a) ** 2
    var_u = mean_asq.real + mean_n + 0.5 - 2.0 * mean_a.real ** 2
    var_v = -mean_asq.real + mean_n + 0.5 - 2.0 * mean_a.imag ** 2
    q = (mean_n2 - mean_n ** 2) / mean_n - 1.0 if mean_n > 0.0 else math.nan
    return {"mean_a": mean_a, "mean_asq": mean_asq, "mean_n": mean_n,
            "mean_n2": mean_n2, "sym_fluct": sym, "var_u": var_u,
            "var_v": var_v, "mandel_q": q}


@dataclass
class EvolutionResult:
    """Sampled moment series of one truncated evolution."""

    dim: int
    step: float
    taus: np.ndarray
    mean_a: np.ndarray
    mean_n: np.ndarray
    mean_n2: np.ndarray
    sym_fluct: np.ndarray
    var_u: np.ndarray
    var_v: np.ndarray
    trace_drift: np.ndarray
    leakage: np.ndarray
    truncation_safe: bool
    rho_final: np.ndarray = dataclass_field(repr=False, default=None)

    @property
    def mandel_q(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.mean_n > 0.0,
                            (self.mean_n2 - self.mean_n ** 2)
                            / np.where(self.mean_n > 0.0, self.mean_n, 1.0) - 1.0,
                            math.nan)


def evolve(rho0: np.ndarray, params: AmplifierParams, tau_end: float,
           step: float, sample_interval: float = 0.01,
           on_unsafe: str = "abort") -> EvolutionResult:
    """Fixed-step fourth-order evolution of the master equation.

    Samples moments every ``sample_interval`` of tau.  Probability in the top
    10% of levels beyond ``LEAKAGE_TOL`` marks the run truncation-unsafe:
    with ``on_unsafe="abort"`` a :class:`TruncationUnsafeError` carrying the
    partial series is raised, with ``"flag"`` the run continues and only the
    flag is recorded.  Trace drift beyond ``TRACE_DRIFT_TOL`` always raises
    (the generator conserves trace exactly, so drift means the step is too
    large).
    """
    if on_unsafe not in ("abort", "flag"):
        raise ValueError("on_unsafe must be 'abort' or 'flag'")
    max_rate = max(params.aprime + 2.0 * params.bprime, 1.0)
    if step > 1e-3 / max_rate:
        raise ValueError(f"step {step} too coarse for rates ~{max_rate:.3g}; "
                         f"need <= {1e-3 / max_rate:.3e}")
    dim = rho0.shape[0]
    ws = _Workspace(dim)
    watch = slice(dim - max(1, dim // 10), dim)
    n_steps = int(round(tau_end / step))
    every = max(1, int(round(sample_interval / step)))

    def rhs(rho, tau):
        a_rate = float(coeff_a(params, tau))
        c_rate = float(coeff_c(params, tau))
        out = ws.gain_dissipator(rho, np.zeros_like(rho))
        out *= a_rate
        if c_rate != 0.0:
            out += c_rate * ws.loss_dissipator(rho, np.zeros_like(rho))
        return out

    samples = {"tau": [], "mean_a": [], "mean_n": [], "mean_n2": [],
               "sym_fluct": [], "var_u": [], "var_v": [],
               "trace_drift": [], "leakage": []}
    safe = True

    def record(tau, rho):
        mom = moments_of(rho)
        samples["tau"].append(tau)
        samples["mean_a"].append(mom["mean_a"])
        samples["mean_n"].append(mom["mean_n"])
        samples["mean_n2"].append(mom["mean_n2"])
        samples["sym_fluct"].append(mom["sym_fluct"])
        samples["var_u"].append(mom["var_u"])
        samples["var_v"].append(mom["var_v"])
        drift = abs(np.trace(rho).real - 1.0)
        leak = float(np.sum(np.real(np.diag(rho)[watch])))
        samples["trace_drift"].append(drift)
        samples["leakage"].append(leak)
        return drift, leak

    rho = rho0.astype(complex).copy()
    record(0.0, rho)
    for k in range(n_steps):
        tau = k * step
        k1 = rhs(rho, tau)
        k2 = rhs(rho + 0.5 * step * k1, tau + 0.5 * step)
        k3 = rhs(rho + 0.5 * step * k2, tau + 0.5 * step)
        k4 = rhs(rho + step * k3, tau + step)
        rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) % every == 0 or k + 1 == n_steps:
            drift, leak = record((k + 1) * step, rho)
            if drift > TRACE_DRIFT_TOL:
                raise StepTooLargeError(
                    f"trace drifted to {drift:.3e} at tau = {(k + 1) * step:.4g}")
            if leak > LEAKAGE_TOL:
                safe = False
                if on_unsafe == "abort":
                    raise TruncationUnsafeError(
                        f"top-level population {leak:.3e} at tau = "
                        f"{(k + 1) * step:.4g} (dim = {dim})",
                        partial=_pack(dim, step, samples, safe, rho))
    return _pack(dim, step, samples, safe, rho)


def _pack(dim, step, samples, safe, rho):
    return EvolutionResult(
        dim=dim, step=step,
        taus=np.array(samples["tau"]),
        mean_a=np.array(samples["mean_a"]),
        mean_n=np.array(samples["mean_n"]),
        mean_n2=np.array(samples["mean_n2"]),
        sym_fluct=np.array(samples["sym_fluct"]),
        var_u=np.array(samples["var_u"]),
        var_v=np.array(samples["var_v"]),
        trace_drift=np.array(samples["trace_drift"]),
        leakage=np.array(samples["leakage"]),
        truncation_safe=safe,
        rho_final=rho,
    )


# ----------------------------------------------------------------------
# scalar moment equations
# ----------------------------------------------------------------------

@dataclass
class MomentTrajectory:
    taus: np.ndarray
    mean_a: np.ndarray
    mean_n: np.ndarray
    mean_asq: np.ndarray
    mean_n2: np.ndarray


def scalar_moment_ode(params: AmplifierParams, field: InputField,
                      tau_end: float, step: float = 1e-3,
                      profile: str = "tanh") -> MomentTrajectory:
    """Closed moment equations integrated with the same fixed-step scheme.

    d<a>/dtau = W <a> / 2, d<n>/dtau = W <n> + aprime(tau),
    d<a^2>/dtau = W <a^2>, d<n^2>/dtau = 2 W <n^2> + (3 aprime + cprime) <n>
    + aprime.  ``profile="step"`` freezes the switching (tanh -> sign),
    which reproduces the constant-coefficient amplifier.
    """
    if profile not in ("tanh", "step"):
        raise ValueError("profile must be 'tanh' or 'step'")

    def rates(tau):
        if profile == "tanh":
            return (float(coeff_a(params, tau)), float(coeff_c(params, tau)),
                    float(gain_factor(params, tau)))
        up = 1.0 if tau >= params.tau0 else 0.0
        a_rate = params.aprime * up + params.bprime
        c_rate = params.aprime * (1.0 - up) + params.bprime
        return a_rate, c_rate, a_rate - c_rate

    q_in = field.mandel_q_in
    n_in = field.mean_n_in
    var_n0 = n_in * (q_in + 1.0) if n_in > 0.0 else 0.0
    y = np.array([field.mean_a_in, complex(n_in), field.mean_asq_in,
                  complex(var_n0 + n_in ** 2)], dtype=complex)

    def rhs(tau, y):
        a_rate, c_rate, w = rates(tau)
        return np.array([0.5 * w * y[0],
                         w * y[1] + a_rate,
                         w * y[2],
                         2.0 * w * y[3] + (3.0 * a_rate + c_rate) * y[1] + a_rate],
                        dtype=complex)

    n_steps = int(round(tau_end / step))
    taus = np.empty(n_steps + 1)
    out = np.empty((n_steps + 1, 4), dtype=complex)
    taus[0] = 0.0
    out[0] = y
    for k in range(n_steps):
        tau = k * step
        k1 = rhs(tau, y)
        k2 = rhs(tau + 0.5 * step, y + 0.5 * step * k1)
        k3 = rhs(tau + 0.5 * step, y + 0.5 * step * k2)
        k4 = rhs(tau + step, y + step * k3)
        y = y + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        taus[k + 1] = (k + 1) * step
        out[k + 1] = y
    return MomentTrajectory(taus=taus, mean_a=out[:, 0],
                            mean_n=out[:, 1].real, mean_asq=out[:, 2],
                            mean_n2=out[:, 3].real)
