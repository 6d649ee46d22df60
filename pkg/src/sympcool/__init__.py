"""Kinetics of sympathetic and forced evaporative cooling of a trapped
Bose-Fermi mixture: coupled quantum Boltzmann equations on the discrete
oscillator spectrum, equilibrium thermometry, a closed two-temperature
relaxation model, and stationary mean-field density profiles."""

__version__ = "0.1.0"

from .trap import TrapSpec, EnergyGrid, tau0, fermi_level, critical_temperature

__all__ = [
    "TrapSpec",
    "EnergyGrid",
    "tau0",
    "fermi_level",
    "critical_temperature",
    "__version__",
]
