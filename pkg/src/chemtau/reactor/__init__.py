"""Constant-pressure 0-D reactor: governing equations, BDF solver, driver."""
from .bdf import BDF, IntegrationError
from .model import ADIABATIC, ISOTHERMAL, MODES, NonFiniteRateError, ReactorSystem, rhs, species_jacobian
from .integrate import ReactorConfig, Sample, Trajectory, integrate, mole_to_mass, sample_times

__all__ = [
    "BDF",
    "IntegrationError",
    "ADIABATIC",
    "ISOTHERMAL",
    "MODES",
    "NonFiniteRateError",
    "ReactorSystem",
    "rhs",
    "species_jacobian",
    "ReactorConfig",
    "Sample",
    "Trajectory",
    "integrate",
    "mole_to_mass",
    "sample_times",
]
