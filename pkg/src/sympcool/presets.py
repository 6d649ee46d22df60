"""Named scenario presets for the evolution CLI.

Each preset bundles a ready-to-run ScenarioConfig; the potassium preset
also names the trap constants used to convert results to SI units. Times
are in tau0, temperatures and cutoffs in trap quanta.
"""

from __future__ import annotations

from dataclasses import replace

from .qbe import EvaporationSchedule, ScenarioConfig
from .trap import PRESET_TRAPS, TrapSpec

# rtol 1e-6 on the figure presets: the acceptance bands there are physical
# (percent-scale), and the stabilized stepper is order 2, so the default
# 1e-8 would multiply runtime for accuracy nothing downstream consumes

# closed mixture: small fermion admixture thermalizing against the bosons
_FIG2 = ScenarioConfig(
    n_b=1e5,
    n_f=1e3,
    t_b0=43.7,
    t_f0=81.8,
    n_max=501,
    tau_end=0.05,
    rtol=1e-6,
    snapshot_times=(0.005, 0.01, 0.02, 0.03),
    label="fig2",
)

# forced cooling, both cutoffs ramped together after a hold
_FIG3 = ScenarioConfig(
    n_b=1e5,
    n_f=1e4,
    t_b0=43.7,
    t_f0=186.0,
    n_max=1001,
    tau_end=2.0,
    rtol=1e-6,
    evap_b=EvaporationSchedule(initial_cut=500.0, hold_until=0.04, e0=500.0, gamma=1.0),
    evap_f=EvaporationSchedule(initial_cut=1000.0, hold_until=0.04, e0=500.0, gamma=1.0),
    snapshot_times=(0.04, 0.1, 0.2, 0.4, 0.9, 1.4),
    label="fig3",
)

# same ramp but sympathetic only: the fermion cutoff never moves, so
# fermions are lost only by collisions that promote them past the fixed cut
_FIG5 = replace(
    _FIG3,
    tau_end=2.2,
    evap_f=EvaporationSchedule(initial_cut=1000.0),
    snapshot_times=(0.04, 0.1, 0.2, 0.4, 0.9, 1.4, 2.0),
    label="fig5",
)

# potassium mixture at experimental scale; fast deep ramp for both species
_FIG7 = ScenarioConfig(
    n_b=1e6,
    n_f=1e5,
    t_b0=94.1,
    t_f0=590.4,
    n_max=1001,
    tau_end=0.064,
    rtol=1e-6,
    alpha_b=PRESET_TRAPS["K40-K39"].alpha_b,
    evap_b=EvaporationSchedule(initial_cut=1000.0, hold_until=0.04, e0=1000.0, gamma=100.0),
    evap_f=EvaporationSchedule(initial_cut=1000.0, hold_until=0.04, e0=1000.0, gamma=100.0),
    snapshot_times=(3.6e-4, 4.7e-2, 6.1e-2),
    label="fig7-potassium",
)

SCENARIOS = {
    "fig2": _FIG2,
    "fig3": _FIG3,
    "fig5": _FIG5,
    "fig7-potassium": _FIG7,
}

# trap constants attached to presets that correspond to a physical system
SCENARIO_TRAPS = {
    "fig7-potassium": "K40-K39",
}

# equilibrium-curve preset: fermion counts swept at fixed boson cloud
EQUILIBRIUM_N_F = (1e3, 1e4, 1e5, 2e5, 4e5, 1e6)
EQUILIBRIUM_N_B = 1e6
EQUILIBRIUM_TB0_OVER_TF = 0.1


def scenario(name: str) -> ScenarioConfig:
    try:
        return SCENARIOS[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIOS))
        raise KeyError(f"unknown preset {name!r}; choose one of: {known}") from None


def trap_for(name: str) -> TrapSpec | None:
    key = SCENARIO_TRAPS.get(name)
    return PRESET_TRAPS[key] if key else None
