"""Relativistic Coulomb fixed-energy amplitude through its radial-oscillator image."""

__version__ = "0.1.0"

from .coulomb_chain import CoulombSystem, OscillatorParams, parameter_map, to_morse, to_oscillator
from .green_amplitude import (
    bound_spectrum,
    coulomb_green,
    coulomb_kernel,
    dk_identity_check,
    oscillator_green,
    residue_at_pole,
)
from .kg_oracle import RadialProblem, oracle_green

__all__ = [
    "CoulombSystem",
    "OscillatorParams",
    "RadialProblem",
    "bound_spectrum",
    "coulomb_green",
    "coulomb_kernel",
    "dk_identity_check",
    "oracle_green",
    "oscillator_green",
    "parameter_map",
    "residue_at_pole",
    "to_morse",
    "to_oscillator",
]
