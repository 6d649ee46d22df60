"""Harmonic trap unit system: level spectrum, degeneracies, reference scales.

Everything downstream works in trap units: energies in hbar*omega, times in
tau0 (the two-body collision timescale built from the boson-fermion cross
section). This module owns the conversion constants and the discrete level
structure E_n = n - 1 with degeneracy g_n = n(n+1)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23  # J/K


@dataclass(frozen=True)
class TrapSpec:
    """Physical trap + species constants fixing the unit system.

    omega is the geometric-mean angular frequency in rad/s. Scattering
    lengths in meters. sigma_convention selects how cross sections are built
    from scattering lengths:
      "standard":      sigma_bb = 8 pi a_b^2,   sigma_bf = 4 pi a_bf^2
      "paper-literal": sigma_bb = 8 pi^2 a_b^2, sigma_bf = 4 pi^2 a_bf^2
    The standard convention is the default; it is the one consistent with the
    quoted potassium timescale (see tests).
    """

    mass: float
    omega: float
    a_b: float
    a_bf: float
    sigma_convention: str = "standard"

    def __post_init__(self):
        if self.mass <= 0 or self.omega <= 0:
            raise ValueError("mass and omega must be positive")
        if self.sigma_convention not in ("standard", "paper-literal"):
            raise ValueError(f"unknown sigma_convention {self.sigma_convention!r}")

    @property
    def sigma_bb(self) -> float:
        k = 8 * math.pi if self.sigma_convention == "standard" else 8 * math.pi**2
        return k * self.a_b**2

    @property
    def sigma_bf(self) -> float:
        k = 4 * math.pi if self.sigma_convention == "standard" else 4 * math.pi**2
        return k * self.a_bf**2

    @property
    def alpha_b(self) -> float:
        """Bose-Bose to Bose-Fermi cross-section ratio."""
        return self.sigma_bb / self.sigma_bf

    @property
    def hbar_omega(self) -> float:
        """Level spacing in joules."""
        return HBAR * self.omega

    @property
    def osc_length(self) -> float:
        """Oscillator length sqrt(hbar / (M omega)) in meters."""
        return math.sqrt(HBAR / (self.mass * self.omega))


def tau0(spec: TrapSpec) -> float:
    """Collision timescale pi^2 hbar^3 / ((hbar omega)^2 m sigma_bf), seconds."""
    return math.pi**2 * HBAR**3 / (spec.hbar_omega**2 * spec.mass * spec.sigma_bf)


@dataclass(frozen=True)
class EnergyGrid:
    """Equally spaced levels E_n = n-1 (units of hbar*omega), n = 1..n_max."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def energies(self) -> np.ndarray:
        return np.arange(self.n_max, dtype=float)

    @property
    def degeneracies(self) -> np.ndarray:
        n = np.arange(1, self.n_max + 1, dtype=float)
        return n * (n + 1) / 2

    @property
    def capacity(self) -> float:
        """Total state count sum g_n = n_max (n_max+1)(n_max+2)/6."""
        m = self.n_max
        return m * (m + 1) * (m + 2) / 6


def degeneracy(n: int) -> int:
    """States in level n (1-based): n(n+1)/2."""
    if n < 1:
        raise ValueError("level index must be >= 1")
    return n * (n + 1) // 2


def density_of_states(E: float) -> float:
    """Semiclassical DOS E^2/2 (per unit hbar*omega) of the 3d oscillator."""
    if E < 0:
        raise ValueError("energy must be >= 0")
    return E * E / 2


def fermi_level(N_f: float, convention: str = "discrete") -> float:
    """Fermi energy/temperature scale T_F for N_f trapped fermions.

    "continuum": (6 N_f)^(1/3).
    "discrete": inverts the cumulative state count with its leading
    degeneracy correction, C(E) = E^3/6 + E^2 = N_f; this is the convention
    behind the quoted scenario temperatures (16.36 for 1e3 etc).
    """
    if N_f < 1:
        raise ValueError("need at least one fermion")
    if convention == "continuum":
        return (6 * N_f) ** (1 / 3)
    if convention != "discrete":
        raise ValueError(f"unknown convention {convention!r}")
    # unique positive root of the monotone cubic E^3/6 + E^2 - N_f
    lo, hi = 0.0, (6 * N_f) ** (1 / 3) + 1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid**3 / 6 + mid**2 < N_f:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_temperature(N_b: float) -> float:
    """Ideal-gas condensation temperature (N_b/zeta(3))^(1/3), trap units."""
    if N_b < 1:
        raise ValueError("need at least one boson")
    return (N_b / 1.202) ** (1 / 3)


# species constant sets addressable by name from configs
PRESET_TRAPS = {
    # potassium mixture: fermionic isotope cooled by the bosonic one
    "K40-K39": TrapSpec(mass=6.6e-26, omega=400.0, a_b=4.3e-9, a_bf=2.5e-9),
}
