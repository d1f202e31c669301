"""Zero-dimensional reacting-gas kinetics and chemical timescale analysis."""

from .mech_parser import Mechanism, MechanismError, load_gri30, parse_mechanism

__version__ = "0.1.0"

__all__ = ["Mechanism", "MechanismError", "load_gri30", "parse_mechanism", "__version__"]
