"""Bound states of two lattice particles above the band near the coupling threshold."""
from .asymptotics import (alpha_theorem2, c0_constant, fit_power_law, leading_coefficient, phi0,
                          scan_coupling, scan_momentum, verify_theorem_1, verify_theorem_2)
from .dispersion import Quasimomentum, band, epsilon, pi_class, spectral_window
from .eigensolver import BoundState, coupling_of_offset, solve, solve_offset, threshold_offset
from .errors import ConvergenceError, DomainError, NoBoundState
from .green import (QuadratureSpec, a2_curvature, determinant, dnu_dz_edge, mu0, nu, nu_edge,
                    nu_gap, scaled_bessel_i0)
from .series import PowerSeries, i_s, invert_a1, invert_a3, leading_a2_a4, wallis

__all__ = [
    "alpha_theorem2", "c0_constant", "fit_power_law", "leading_coefficient", "phi0",
    "scan_coupling", "scan_momentum", "verify_theorem_1", "verify_theorem_2",
    "Quasimomentum", "band", "epsilon", "pi_class", "spectral_window",
    "BoundState", "coupling_of_offset", "solve", "solve_offset", "threshold_offset",
    "ConvergenceError", "DomainError", "NoBoundState",
    "QuadratureSpec", "a2_curvature", "determinant", "dnu_dz_edge", "mu0", "nu", "nu_edge",
    "nu_gap", "scaled_bessel_i0",
    "PowerSeries", "i_s", "invert_a1", "invert_a3", "leading_a2_a4", "wallis",
]
