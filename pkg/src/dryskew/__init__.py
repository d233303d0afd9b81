"""Skew Brownian motion with dry friction: closed-form laws and a lattice Monte Carlo check."""

from .errors import ConfigurationError, ConvergenceError, DivergenceError, DomainError
from .params import ModelParams
from .analytic import (
    OccupationLaw,
    f_aux,
    joint_tau_u_x_l,
    joint_tau_v_x_l,
    joint_tau_x_l,
    joint_u_l,
    joint_u_x_l,
    joint_x_l,
    local_time_cdf,
    local_time_density,
    marginal_cdf,
    marginal_density,
    occupation_density,
    skeleton_density,
)
from .quadrature import QuadratureSpec, integrate_finite, integrate_semi_infinite
from .simulate import LatticeConfig, run_monte_carlo, simulate_path
from .validate import ValidationReport, run_full_validation

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "ConvergenceError", "DivergenceError", "DomainError",
    "ModelParams", "LatticeConfig", "QuadratureSpec", "OccupationLaw", "ValidationReport",
    "f_aux", "joint_tau_u_x_l", "joint_tau_v_x_l", "joint_tau_x_l", "joint_u_l", "joint_u_x_l",
    "joint_x_l", "local_time_cdf", "local_time_density", "marginal_cdf", "marginal_density",
    "occupation_density", "skeleton_density", "integrate_finite", "integrate_semi_infinite",
    "run_monte_carlo", "simulate_path", "run_full_validation",
]
