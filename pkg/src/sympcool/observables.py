"""Derived quantities: entropies, condensate statistics, spatial profiles.

Profiles use the semiclassical mapping of the isotropic trap: a particle at
energy E reaches radius r (oscillator units) while E >= r^2/2, and the
density is n(r) = (1/(sqrt(2) pi^2)) integral dE F(E) sqrt(E - r^2/2) with
F the per-state occupation. On the discrete spectrum F is interpolated
linearly between levels and each segment is integrated in closed form, so
the T = 0 Fermi sea reproduces its peak value 8/pi^2 (in N/R^3 units)
to grid resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

_PROFILE_PREF = 1.0 / (np.sqrt(2.0) * np.pi**2)


@dataclass(frozen=True)
class SpatialProfile:
    """Radial density with its bookkeeping.

    radii are in oscillator lengths sqrt(hbar/M omega); density in inverse
    cubed oscillator lengths. number is 4 pi int r^2 n dr by quadrature,
    kept separate from the exact sum g_n F_n so the mapping can be audited.
    """

    radii: np.ndarray
    density: np.ndarray
    species: str
    number: float


def _xlogx(x):
    out = np.zeros_like(x)
    np.log(x, out=out, where=x > 0)
    return x * out


def entropy_bose(b, degeneracies):
    """S = sum g [(1+b) ln(1+b) - b ln b], in units of k_B."""
    b = np.asarray(b, dtype=float)
    return float(np.dot(degeneracies, _xlogx(1.0 + b) - _xlogx(b)))


def entropy_fermi(f, degeneracies):
    """S = -sum g [f ln f + (1-f) ln(1-f)], in units of k_B."""
    f = np.asarray(f, dtype=float)
    return float(-np.dot(degeneracies, _xlogx(f) + _xlogx(1.0 - f)))


def condensate_number(b):
    # single ground state, so occupation equals number
    return float(b[0])


def condensate_fraction(b, degeneracies):
    N = float(np.dot(degeneracies, b))
    if N <= 0:
        return 0.0
    return float(b[0]) / N


def spatial_profile(occupation, radii):
    """Density n(r) from per-state occupations F_k on levels k = 0,1,...

    occupation: per-state mean occupation (not per level; do not multiply
    by degeneracies). radii: array of r in oscillator lengths. Returns
    n(r) in (oscillator length)^-3; integrating 4 pi r^2 n(r) recovers
    the semiclassical number integral dE (E^2/2) F(E) of the interpolated
    occupation. The discrete sum g_n F_n exceeds that by the subleading
    density-of-states terms (3E/2 + 1 per level), relative 3/(2 T_bar)
    for a thermal cloud, so profiles are continuum-limit objects.
    """
    F = np.asarray(occupation, dtype=float)
    r = np.asarray(radii, dtype=float)
    V = 0.5 * r * r
    n = np.zeros_like(r)
    M = F.shape[0]
    for k in range(M):
        Fk = F[k]
        Fk1 = F[k + 1] if k + 1 < M else 0.0
        if Fk == 0.0 and Fk1 == 0.0:
            continue
        s = Fk1 - Fk
        lo = np.maximum(V, float(k))
        active = V < k + 1.0
        if not np.any(active):
            continue  # the active set only grows with k when r_min > 0
        u0 = np.where(active, lo - V, 0.0)
        u1 = np.where(active, k + 1.0 - V, 0.0)
        a0 = Fk + s * (V - k)  # segment occupation at E = V + u, linear in u
        n += a0 * (2.0 / 3.0) * (u1**1.5 - u0**1.5) + s * (2.0 / 5.0) * (
            u1**2.5 - u0**2.5
        )
    return _PROFILE_PREF * n


def default_radii(e_top, n_points=200, pad=1.5):
    """Radial grid out to pad times the classical turning point of e_top."""
    r_max = pad * np.sqrt(2.0 * max(float(e_top), 1.0))
    return np.linspace(0.0, r_max, n_points)


def density_profile(occupation, radii=None, species="") -> SpatialProfile:
    F = np.asarray(occupation, dtype=float)
    if radii is None:
        nz = np.nonzero(F)[0]
        e_top = int(nz[-1]) + 1 if nz.size else 1
        radii = default_radii(e_top, n_points=801)
    r = np.asarray(radii, dtype=float)
    n = spatial_profile(F, r)
    number = float(4.0 * np.pi * simpson(r * r * n, x=r))
    return SpatialProfile(radii=r, density=n, species=species, number=number)


def occupancy_curve(occupation):
    """(E_n, per-state occupation) pairs, figure-ready."""
    F = np.asarray(occupation, dtype=float)
    return np.arange(F.shape[0], dtype=float), F
