"""Simulation toolkit for subcritical inhomogeneous random graphs of preferential attachment type."""
from .backend import BACKEND
from .params import (DerivedConstants, ModelParams, critical_beta, derived_constants,
                     deviation_rate, psi, psi_prime, rho_pm, rho_pm_bisection, t_star,
                     validate_params)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DerivedConstants",
    "ModelParams",
    "critical_beta",
    "derived_constants",
    "deviation_rate",
    "psi",
    "psi_prime",
    "rho_pm",
    "rho_pm_bisection",
    "t_star",
    "validate_params",
]
