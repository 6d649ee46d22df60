"""Stationary zero-temperature mean-field overlays: Thomas-Fermi condensate,
the fermion profile in the combined trap + condensate potential, and the
mean-field-strength ratio.

These are reporting-only profiles in SI units; they never feed the
kinetics. Inside the condensate the fermions see the flattened potential
V_eff = (1 - a_bf/a_b) V_ext + (a_bf/a_b) mu, which broadens the cloud for
0 < a_bf < a_b. The profile is evaluated with that effective potential
everywhere (the stationary model treats the ratio as global), with E_F
re-solved so the profile holds exactly N_f atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trap import HBAR


@dataclass(frozen=True)
class MeanFieldInput:
    N_b: float
    N_f: float
    a_b: float  # m
    a_bf: float  # m
    mass: float  # kg
    omega: float  # rad/s

    def __post_init__(self):
        if self.N_b < 0 or self.N_f < 0:
            raise ValueError("particle numbers must be nonnegative")
        if self.mass <= 0 or self.omega <= 0:
            raise ValueError("mass and omega must be positive")


def boson_coupling(inp: MeanFieldInput) -> float:
    """g_b = 4 pi hbar^2 a_b / M (J m^3)."""
    return 4.0 * math.pi * HBAR**2 * inp.a_b / inp.mass


def tf_mu(inp: MeanFieldInput) -> float:
    """Thomas-Fermi chemical potential (J) of the condensate."""
    if inp.N_b <= 0:
        return 0.0
    if inp.a_b <= 0:
        raise ValueError("attractive or ideal condensate: no Thomas-Fermi branch")
    g_b = boson_coupling(inp)
    k = 0.5 * inp.mass * inp.omega**2
    return (k**1.5 * (15.0 / (8.0 * math.pi)) * inp.N_b * g_b) ** 0.4


def tf_radius(inp: MeanFieldInput) -> float:
    """Condensate support radius (m)."""
    return math.sqrt(2.0 * tf_mu(inp) / (inp.mass * inp.omega**2))


def tf_profile(inp: MeanFieldInput, radii) -> np.ndarray:
    """Condensate density n_b(r) (m^-3) on the given radii (m)."""
    mu = tf_mu(inp)
    g_b = boson_coupling(inp)
    r = np.asarray(radii, dtype=float)
    V = 0.5 * inp.mass * inp.omega**2 * r * r
    return np.maximum(0.0, mu - V) / g_b


def ideal_fermi_energy(inp: MeanFieldInput) -> float:
    """E_F (J) of the noninteracting trapped gas."""
    return HBAR * inp.omega * (6.0 * inp.N_f) ** (1.0 / 3.0)


def fermi_radius(inp: MeanFieldInput, e_f: float | None = None) -> float:
    if e_f is None:
        e_f = ideal_fermi_energy(inp)
    return math.sqrt(2.0 * e_f / (inp.mass * inp.omega**2))


def _fermi_number(inp: MeanFieldInput, e_f: float, mu: float, ghat: float) -> float:
    """Closed-form atom count of the effective-potential profile."""
    C = e_f - ghat * mu
    if C <= 0 or ghat >= 1:
        return 0.0
    # local-density count with V_eff: N = (C/hbar w)^3 / (6 (1-ghat)^{3/2})
    return (C / (HBAR * inp.omega)) ** 3 / (6.0 * (1.0 - ghat) ** 1.5)


def mf_fermi_energy(inp: MeanFieldInput) -> float:
    """E_F (J) such that the mean-field profile integrates to N_f.

    Bisection on (0, 10 x ideal], per the reporting contract.
    """
    if inp.N_f <= 0:
        return 0.0
    ghat = inp.a_bf / inp.a_b
    if ghat >= 1.0:
        raise ValueError(
            "inverted-oscillator regime (a_bf >= a_b): the condensate repels "
            "fermions from the overlap region; profile not supported"
        )
    if ghat < -1.0:
        raise ValueError("strongly attractive a_bf: mixture may be unstable")
    mu = tf_mu(inp)
    ideal = ideal_fermi_energy(inp)
    lo, hi = 0.0, 10.0 * ideal
    if _fermi_number(inp, hi, mu, ghat) < inp.N_f:
        raise ValueError("E_F bracket exhausted; condensate mean field too large")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _fermi_number(inp, mid, mu, ghat) < inp.N_f:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    return 0.5 * (lo + hi)


def mf_fermion_profile(inp: MeanFieldInput, radii) -> np.ndarray:
    """Fermion density (m^-3) in the combined trap + condensate potential."""
    if inp.N_f <= 0:
        return np.zeros_like(np.asarray(radii, dtype=float))
    ghat = inp.a_bf / inp.a_b
    mu = tf_mu(inp)
    e_f = mf_fermi_energy(inp)
    r = np.asarray(radii, dtype=float)
    V = 0.5 * inp.mass * inp.omega**2 * r * r
    bracket = np.maximum(0.0, e_f - ghat * mu - (1.0 - ghat) * V)
    pref = (2.0 * inp.mass / HBAR**2) ** 1.5 / (6.0 * math.pi**2)
    return pref * bracket**1.5


def ideal_fermion_profile(inp: MeanFieldInput, radii) -> np.ndarray:
    """T = 0 profile of the noninteracting gas (a_bf = 0 limit)."""
    return mf_fermion_profile(
        MeanFieldInput(inp.N_b, inp.N_f, inp.a_b, 0.0, inp.mass, inp.omega), radii
    )


def mf_ratio(N0: float, a_b: float, mass: float, omega: float) -> float:
    """Mean-field strength per the condensate's quantum width l = sqrt(hbar/2Mw);
    values >= 1 mean the interaction energy rivals the level spacing."""
    if N0 < 0:
        raise ValueError("condensate count must be nonnegative")
    l = math.sqrt(HBAR / (2.0 * mass * omega))
    return (1.0 / math.sqrt(math.pi)) * (a_b / l) * N0
