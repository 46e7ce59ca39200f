"""Transient dynamics of phase-insensitive linear quantum amplifiers.

Analytic gain, noise, field statistics, quasiprobability functions and
thermal observables for a gain medium switched smoothly from damping to
amplification, together with a truncated-Fock-space master-equation
integrator that verifies every analytic quantity by brute force.
"""

from .core import (AmplifierParams, coeff_a, coeff_c, gain, gain_factor,
                   log_gain, population_ratio)
from .fields import InputField
from .noise import (NoiseRecord, added_noise, added_noise_limit, caves_limit,
                    delta, delta_by_quadrature, m_width, noise_integral,
                    noise_integral_even, noise_integral_limit,
                    noise_integral_odd, noise_record, standard_added_noise)
from .phasespace import (CharFn, GridSpec, PhaseSpaceGrid, char_fn,
                         general_solution, moments_from_chi, p_transfer,
                         quasiprob_grid, solve_coefficients, wigner_coherent,
                         wigner_propagator, wigner_squeezed_vacuum,
                         wigner_thermal)
from .stats import (MomentSet, mandel_q, mandel_zero_time, mean_amplitude,
                    mean_photon_number, moments, output_fluctuations,
                    quadrature_variances, squeezing_loss_time,
                    squeezing_retained)
from .thermal import (ThermalState, entropy, entropy_of_occupation,
                      entropy_slope, occupation_of_temperature, temperature,
                      temperature_of_occupation)

__version__ = "0.1.0"

__all__ = [
    "AmplifierParams", "InputField", "MomentSet", "NoiseRecord", "CharFn",
    "GridSpec", "PhaseSpaceGrid", "ThermalState",
    "coeff_a", "coeff_c", "gain", "gain_factor", "log_gain",
    "population_ratio",
    "noise_integral", "noise_integral_even", "noise_integral_odd",
    "noise_integral_limit", "delta", "delta_by_quadrature", "added_noise",
    "added_noise_limit", "caves_limit", "standard_added_noise", "m_width",
    "noise_record",
    "mean_amplitude", "output_fluctuations", "quadrature_variances",
    "squeezing_retained", "mean_photon_number", "mandel_q", "moments",
    "mandel_zero_time", "squeezing_loss_time",
    "char_fn", "general_solution", "solve_coefficients", "moments_from_chi",
    "quasiprob_grid", "wigner_coherent", "wigner_squeezed_vacuum",
    "wigner_thermal", "wigner_propagator", "p_transfer",
    "temperature", "entropy", "entropy_slope", "temperature_of_occupation",
    "occupation_of_temperature", "entropy_of_occupation",
    "__version__",
]
