"""Equilibrium statistics on the discrete trap spectrum.

Occupancy sums, fugacity/temperature solvers, the mixture equilibrium
temperature (energy-conserving redistribution between a Bose and a Fermi gas
in the same trap), closed-form approximations for the degenerate and the
classical regimes, and (z, T) thermometry fits used to label simulation
snapshots.

All temperatures and energies are in trap units (hbar*omega). Sums run over
the physical integer-spaced spectrum; no continuum (integral) shortcuts are
taken here, so finite-size corrections of order 1/T are faithfully included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .trap import EnergyGrid, fermi_level

G4_1 = math.pi**4 / 90  # Bose-Einstein g4(1) = zeta(4) ~ 1.0823

_BRACKET_TOL = 1e-12  # bisection bracket width, design choice: robust near z=1


@dataclass(frozen=True)
class ThermoFit:
    """Fugacity/temperature pair labeling an (N, E) macrostate."""

    z: float
    T_bar: float
    species: str
    condensate_number: float = 0.0


@dataclass(frozen=True)
class EquilibriumResult:
    T_infinity: float
    z_b: float
    z_f: float
    iterations: int
    residuals: dict = field(default_factory=dict)
    condensate_number: float = 0.0


def thermal_grid(T_bar: float, mu_top: float = 0.0) -> EnergyGrid:
    """Grid large enough that the omitted tail is < 1e-8 of any occupancy sum.

    mu_top shifts the tail start for degenerate fermions (pass ~E_F).
    The Maxwell tail (E^2/2) e^{-(E-mu)/T} integrated beyond mu + 35 T is
    below 1e-9 of the total for every fugacity of interest.
    """
    return EnergyGrid(n_max=int(math.ceil(mu_top + 35.0 * max(T_bar, 1.0) + 25)))


def _occupations_ln(species: str, lnz: float, T_bar: float, grid: EnergyGrid) -> np.ndarray:
    """Occupations from log-fugacity; never exponentiates lnz on its own, so
    deeply degenerate fermi states (lnz ~ E_F/T >> 700) stay finite."""
    E = grid.energies
    x = E / T_bar - lnz
    if species == "fermi":
        out = np.empty_like(x)
        pos = x > 0
        ex = np.exp(-np.abs(x))
        out[pos] = ex[pos] / (1.0 + ex[pos])
        out[~pos] = 1.0 / (1.0 + ex[~pos])
        return out
    # bose: 1/(e^x - 1) = e^-x / (1 - e^-x); x == 0 happens only for the
    # ground level at z == 1, which is excluded (condensate candidate)
    out = np.zeros_like(x)
    nz = x > 0
    ex = np.exp(-x[nz])
    out[nz] = ex / (1.0 - ex)
    return out


def occupations(species: str, z: float, T_bar: float, grid: EnergyGrid) -> np.ndarray:
    """Per-state mean occupation on each grid level.

    Bose requires z <= 1; at z = 1 exactly the ground level diverges and is
    returned as 0 here (it is the condensate candidate, booked separately by
    the solvers).
    """
    if T_bar <= 0:
        raise ValueError("T_bar must be positive")
    if species == "fermi":
        if z <= 0:
            raise ValueError("fermi fugacity must be positive")
    elif species == "bose":
        if not 0 < z <= 1:
            raise ValueError("bose fugacity must be in (0, 1]")
    else:
        raise ValueError(f"unknown species {species!r}")
    return _occupations_ln(species, math.log(z), T_bar, grid)


def occupancy_sums(species: str, z: float, T_bar: float, grid: EnergyGrid):
    """(N, E_total) by direct summation over the grid.

    For bosons at z = 1 the divergent ground term is excluded: the result is
    the excited-state sum, and the condensate count lives with the solvers.
    """
    occ = occupations(species, z, T_bar, grid)
    g = grid.degeneracies
    E = grid.energies
    return float(np.dot(g, occ)), float(np.dot(g * E, occ))


def _bisect(f, lo, hi, tol=_BRACKET_TOL, max_iter=300):
    """Root of monotone-increasing f by plain bisection. f(lo) < 0 < f(hi)."""
    flo = f(lo)
    if flo >= 0:
        return lo
    if f(hi) <= 0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol * max(1.0, abs(mid)):
            return mid
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _fermi_sums_ln(lnz: float, T_bar: float, grid: EnergyGrid):
    occ = _occupations_ln("fermi", lnz, T_bar, grid)
    g = grid.degeneracies
    return float(np.dot(g, occ)), float(np.dot(g * grid.energies, occ))


def solve_fermi_lnz(N_f: float, T_bar: float, grid: EnergyGrid) -> float:
    """log z_f such that the Fermi occupancy sum equals N_f (bisection)."""
    if N_f < 1:
        raise ValueError("need at least one fermion")
    if N_f >= grid.capacity:
        raise ValueError(
            f"N_f = {N_f:g} exceeds grid capacity {grid.capacity:g}; enlarge the grid"
        )

    def resid(lnz):
        return _fermi_sums_ln(lnz, T_bar, grid)[0] - N_f

    lo, hi = -700.0, 1.0
    while resid(hi) < 0:
        hi = 2 * hi + 1
        if hi > 1e14:
            raise ValueError("fermi fugacity bracket failed to close")
    return _bisect(resid, lo, hi)


def solve_fermi_fugacity(N_f: float, T_bar: float, grid: EnergyGrid) -> float:
    """z_f matching N_f; may overflow to inf for T far below degeneracy
    (log z ~ E_F/T); use solve_fermi_lnz where that matters."""
    lnz = solve_fermi_lnz(N_f, T_bar, grid)
    try:
        return math.exp(lnz)
    except OverflowError:
        return math.inf


def _bose_z_from_N(N_b, T_bar, grid):
    """(z, condensate) matching N_b at fixed T_bar."""
    N_ex_at_1 = occupancy_sums("bose", 1.0, T_bar, grid)[0]
    if N_ex_at_1 < N_b:
        return 1.0, N_b - N_ex_at_1
    # below condensation the ground term z/(1-z) is already inside the sum
    def resid(lnz):
        z = math.exp(lnz)
        return occupancy_sums("bose", z, T_bar, grid)[0] - N_b

    lnz = _bisect(resid, -700.0, -1e-16)
    return math.exp(lnz), 0.0


def _bose_sums_at(N_b, T_bar, grid):
    """(z, condensate, N_check, E) for the N-constrained bose state at T_bar."""
    z, cond = _bose_z_from_N(N_b, T_bar, grid)
    n, e = occupancy_sums("bose", z, T_bar, grid)
    if z == 1.0:
        n += cond  # divergent ground term is dropped by the sum at z = 1
    return z, cond, n, e


def solve_bose_state(
    N_b: float, grid: EnergyGrid, T_bar: float | None = None, E_target: float | None = None
) -> ThermoFit:
    """Bose (z, T) state for given N_b plus either T_bar or a total energy.

    Below condensation the fugacity pins to 1 and the excess population is
    booked as condensate_number; the condensate carries zero energy (ground
    level), so the energy solve runs on the excited sum alone there.
    """
    if N_b < 1:
        raise ValueError("need at least one boson")
    if (T_bar is None) == (E_target is None):
        raise ValueError("give exactly one of T_bar, E_target")
    if T_bar is not None:
        z, cond = _bose_z_from_N(N_b, T_bar, grid)
        return ThermoFit(z=z, T_bar=T_bar, species="bose", condensate_number=cond)
    if E_target < 0:
        raise ValueError("bose energy target below the ground-state minimum 0")
    if E_target == 0:
        return ThermoFit(z=1.0, T_bar=0.0, species="bose", condensate_number=N_b)

    def resid(T):
        return _bose_sums_at(N_b, T, grid)[3] - E_target

    lo, hi = 1e-12, 1.0
    while resid(hi) < 0:
        hi *= 2
        if hi > 1e9:
            raise ValueError("bose temperature bracket failed to close")
    T = _bisect(resid, lo, hi)
    z, cond, _, _ = _bose_sums_at(N_b, T, grid)
    return ThermoFit(z=z, T_bar=T, species="bose", condensate_number=cond)


def fit_thermo(species: str, N: float, E: float, grid: EnergyGrid) -> ThermoFit:
    """Two-parameter (z, T) fit to a macrostate (N, E) on the given grid.

    Fits are labels for snapshots; nothing feeds them back into dynamics.
    """
    if N < 1:
        raise ValueError("need at least one particle to fit")
    if species == "bose":
        return solve_bose_state(N, grid, E_target=E)
    if species != "fermi":
        raise ValueError(f"unknown species {species!r}")
    if N >= grid.capacity:
        raise ValueError(f"N = {N:g} exceeds grid capacity {grid.capacity:g}")
    # T = 0 floor: fill shells from the bottom, fractional top shell
    g = grid.degeneracies
    cum = np.cumsum(g)
    k = int(np.searchsorted(cum, N))
    E_min = float(np.dot(g[:k], grid.energies[:k]))
    if k > 0:
        E_min += (N - cum[k - 1]) * grid.energies[k] if k < grid.n_max else 0.0
    else:
        E_min = 0.0
    if E < E_min - 1e-9 * max(E_min, 1.0):
        raise ValueError(
            f"energy {E:g} below the T=0 minimum {E_min:g} for N = {N:g} fermions"
        )

    def resid(T):
        lnz = solve_fermi_lnz(N, T, grid)
        return _fermi_sums_ln(lnz, T, grid)[1] - E

    lo, hi = 1e-9, 1.0
    while resid(hi) < 0:
        hi *= 2
        if hi > 1e9:
            raise ValueError("fermi temperature bracket failed to close")
    T = _bisect(resid, lo, hi)
    z = solve_fermi_fugacity(N, T, grid)
    return ThermoFit(z=z, T_bar=T, species="fermi")


def equilibrium_temperature(
    N_b: float,
    N_f: float,
    T_b0: float,
    T_f0: float,
    grid_b: EnergyGrid | None = None,
    grid_f: EnergyGrid | None = None,
    tol_T: float = 1e-4,
    max_iter: int = 10_000,
) -> EquilibriumResult:
    """Common final temperature of the mixture by energy-conserving exchange.

    Alternating scheme: assign the fermions the current bose temperature,
    re-solve their fugacity and energy, hand the energy balance to the bose
    gas, refit its temperature; repeat until the two temperatures agree to
    tol_T relative. A plain successive substitution can two-cycle when the
    two heat capacities are comparable, so after any non-decreasing residual
    the update switches to averaging (which preserves the fixed point).
    """
    if min(N_b, N_f, T_b0, T_f0) <= 0:
        raise ValueError("all inputs must be positive")
    T_top = max(T_b0, T_f0)
    if grid_f is None:
        grid_f = thermal_grid(T_top, mu_top=(6 * N_f) ** (1 / 3))
    if grid_b is None:
        grid_b = thermal_grid(T_top)

    z_f0 = solve_fermi_fugacity(N_f, T_f0, grid_f)
    E_f0 = occupancy_sums("fermi", z_f0, T_f0, grid_f)[1]
    fit_b0 = solve_bose_state(N_b, grid_b, T_bar=T_b0)
    E_b0 = occupancy_sums("bose", fit_b0.z, T_b0, grid_b)[1]
    E_tot = E_f0 + E_b0

    T_b = T_b0
    prev_resid = math.inf
    damped = False
    for it in range(1, max_iter + 1):
        T_f = T_b
        z_f = solve_fermi_fugacity(N_f, T_f, grid_f)
        E_f = occupancy_sums("fermi", z_f, T_f, grid_f)[1]
        E_b_target = max(E_tot - E_f, 0.0)
        fit_b = solve_bose_state(N_b, grid_b, E_target=E_b_target)
        T_b_new = fit_b.T_bar
        resid = abs(T_f - T_b_new) / T_f
        if resid < tol_T:
            n_chk, e_chk = occupancy_sums("bose", fit_b.z, T_b_new, grid_b)
            if fit_b.z == 1.0:
                n_chk += fit_b.condensate_number
            return EquilibriumResult(
                T_infinity=T_b_new,
                z_b=fit_b.z,
                z_f=z_f,
                iterations=it,
                residuals={
                    "N_b": abs(n_chk - N_b) / N_b,
                    "E_b": abs(e_chk - E_b_target) / max(E_b_target, 1.0),
                    "T": resid,
                },
                condensate_number=fit_b.condensate_number,
            )
        if resid >= prev_resid:
            damped = True
        prev_resid = resid
        T_b = 0.5 * (T_b + T_b_new) if damped else T_b_new
    raise RuntimeError(
        f"equilibrium iteration did not converge in {max_iter} steps; "
        f"last residual {prev_resid:.3e}"
    )


def approx_T_degenerate(T_F: float, T_b0: float, T_f0: float) -> float:
    """Common temperature in the degenerate regime (condensed bosons, cold
    fermions). With x = T_infinity/T_F, the energy balance reduces to the
    unique positive root of

        g4(1) x^4 + x/6 = g4(1) (T_b0/T_F)^4 + T_f0/(6 T_F)

    and the returned value is x * T_F. Expected validity T_f0 >~ 0.5 T_F
    with the result below the condensation temperature.
    """
    if T_F <= 0:
        raise ValueError("T_F must be positive")
    tb, tf = T_b0 / T_F, T_f0 / T_F
    rhs = G4_1 * tb**4 + tf / 6

    def resid(x):
        return G4_1 * x**4 + x / 6 - rhs

    hi = max(tb, tf, 1e-30)
    return T_F * _bisect(resid, 0.0, hi)


def approx_T_classical(N_b: float, N_f: float, T_b0: float, T_f0: float) -> float:
    """Number-weighted mean temperature; Maxwell-Boltzmann limit of the
    energy balance, valid well above both degeneracy temperatures."""
    return (N_f * T_f0 + N_b * T_b0) / (N_f + N_b)
