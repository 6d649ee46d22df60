"""Evolution engine: coupled kinetics of the trapped mixture with
time-dependent evaporation cutoffs.

State layout for the stepper is a flat vector [b, f, lost_N_b, lost_E_b,
lost_N_f, lost_E_f]; occupations live on the fixed grid 0..n_max-1 and the
cutoffs only gate which levels the kernels treat as trapped. When a
decaying cutoff sweeps through an integer level the integration stops at
the (analytic) crossing time and that level's remaining population is
moved to the lost tallies in one discrete transfer, which keeps
trapped + lost exactly conserved.

Times are in units of tau0, energies and temperatures in trap quanta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import observables, statmech
from ._rk import integrate, integrate_rkc
from .kernels import collision_rhs, level_degeneracies, total_rhs
from .trap import EnergyGrid

# occupations this far below the species maximum are treated as empty when
# picking the kernel's active window; exact zeros always trim
TRIM_RELATIVE = 1e-14


@dataclass(frozen=True)
class EvaporationSchedule:
    """Cutoff history: flat at initial_cut until hold_until, then an
    exponential ramp e0 * exp(-gamma (tau - hold_until)) if e0 is set."""

    initial_cut: float | None = None
    hold_until: float = 0.0
    e0: float | None = None
    gamma: float = 0.0

    def cutoff(self, tau: float) -> float:
        if self.e0 is None or tau < self.hold_until:
            return math.inf if self.initial_cut is None else float(self.initial_cut)
        return float(self.e0) * math.exp(-self.gamma * (tau - self.hold_until))

    def crossing_times(self, tau_end: float, n_max: int):
        """(tau, level) pairs in (0, tau_end] where the cutoff passes an
        integer level from above, sorted by time."""
        out = []
        if self.e0 is None or self.gamma <= 0:
            return out
        start = math.inf if self.initial_cut is None else float(self.initial_cut)
        top = min(int(math.floor(min(start, n_max - 1))), n_max - 1)
        for L in range(min(int(math.floor(self.e0)), top), 0, -1):
            t = self.hold_until + math.log(self.e0 / L) / self.gamma
            if t <= 0:
                continue
            if t > tau_end:
                break
            out.append((t, L))
        return out


@dataclass(frozen=True)
class ScenarioConfig:
    n_b: float
    n_f: float
    t_b0: float
    t_f0: float
    n_max: int
    tau_end: float
    alpha_b: float = 1.0
    evap_b: EvaporationSchedule | None = None
    evap_f: EvaporationSchedule | None = None
    rtol: float = 1e-8
    atol: float = 1e-12
    stepper: str = "rkc"
    snapshot_times: tuple = ()
    snapshot_every: float | None = None
    label: str = "run"

    def __post_init__(self):
        if self.stepper not in ("rkc", "dp5"):
            raise ValueError("stepper must be 'rkc' or 'dp5'")
        if self.n_b < 0 or self.n_f < 0:
            raise ValueError("particle numbers must be nonnegative")
        if self.n_max < 2:
            raise ValueError("need at least two levels")
        if self.tau_end <= 0:
            raise ValueError("tau_end must be positive")
        if self.n_f > 0 and self.t_f0 <= 0:
            raise ValueError("t_f0 must be positive")
        if self.n_b > 0 and self.t_b0 <= 0:
            raise ValueError("t_b0 must be positive")


@dataclass
class Snapshot:
    tau: float
    cut_b: float
    cut_f: float
    n_b: float
    n_f: float
    e_b: float
    e_f: float
    t_bar_b: float
    t_bar_f: float
    z_b: float
    z_f: float
    condensate: float
    lost_n_b: float
    lost_n_f: float
    lost_e_b: float
    lost_e_f: float
    entropy_b: float
    entropy_f: float
    # full occupation vectors; not part of the CSV row
    occ_b: np.ndarray | None = None
    occ_f: np.ndarray | None = None

    FIELDS = (
        "tau", "cut_b", "cut_f", "n_b", "n_f", "e_b", "e_f",
        "t_bar_b", "t_bar_f", "z_b", "z_f", "condensate",
        "lost_n_b", "lost_n_f", "lost_e_b", "lost_e_f",
        "entropy_b", "entropy_f",
    )

    def as_row(self):
        return [getattr(self, k) for k in self.FIELDS]


@dataclass
class RunResult:
    config: ScenarioConfig
    snapshots: list
    b: np.ndarray
    f: np.ndarray
    lost: dict
    n_steps: int
    n_rhs: int
    wall_time: float

    def table(self) -> np.ndarray:
        return np.array([s.as_row() for s in self.snapshots], dtype=float)


def _top_from_cut(cut: float, n_max: int) -> int:
    if cut is None or math.isinf(cut):
        return n_max - 1
    return max(0, min(int(math.floor(cut)), n_max - 1))


def init_state(config: ScenarioConfig):
    """Initial occupations on the scenario grid.

    Bosons: equilibrium at (n_b, t_b0) solved on a grid wide enough to hold
    the full distribution, sampled on the trapped levels, then rescaled so
    the trapped number is exactly n_b. Fermions are bounded by Pauli
    blocking, so their fugacity is solved on the trapped levels directly
    and no rescale is needed.
    """
    M = config.n_max
    b = np.zeros(M)
    f = np.zeros(M)
    cut_b0 = config.evap_b.cutoff(0.0) if config.evap_b else math.inf
    cut_f0 = config.evap_f.cutoff(0.0) if config.evap_f else math.inf
    tb0 = _top_from_cut(cut_b0, M)
    tf0 = _top_from_cut(cut_f0, M)

    if config.n_b > 0:
        wide = statmech.thermal_grid(config.t_b0)
        if wide.n_max < M:
            wide = EnergyGrid(M)
        fit = statmech.solve_bose_state(config.n_b, wide, T_bar=config.t_b0)
        E = np.arange(tb0 + 1, dtype=float)
        if fit.condensate_number > 0:
            x = np.exp(-E[1:] / config.t_b0)
            b[1 : tb0 + 1] = x / (1.0 - x)
            b[0] = fit.condensate_number
        else:
            x = fit.z * np.exp(-E / config.t_b0)
            b[: tb0 + 1] = x / (1.0 - x)
        g = level_degeneracies(M)
        nt = float(np.dot(g[: tb0 + 1], b[: tb0 + 1]))
        b[: tb0 + 1] *= config.n_b / nt

    if config.n_f > 0:
        grid_f = EnergyGrid(tf0 + 1)
        if config.n_f > grid_f.capacity:
            raise ValueError(
                f"{config.n_f} fermions exceed the {grid_f.capacity:.0f} "
                f"states below the cutoff"
            )
        lnz = statmech.solve_fermi_lnz(config.n_f, config.t_f0, grid_f)
        f[: tf0 + 1] = statmech._occupations_ln("fermi", lnz, config.t_f0, grid_f)
    return b, f


def _active_tops(b, f, tb, tf):
    """Shrink the kernel window to the occupied support. Rows above
    max(2 eb, eb + ef) provably receive nothing (any in-state pair with
    occupation above threshold has pair-sum below that), so skipping them
    changes rates only at the trim threshold."""
    bm = b[: tb + 1].max() if tb >= 0 else 0.0
    fm = f[: tf + 1].max() if tf >= 0 else 0.0
    if bm <= 0.0:
        return -1, -1  # no bosons: collision dynamics frozen
    nz = np.nonzero(b[: tb + 1] > TRIM_RELATIVE * bm)[0]
    eb = int(nz[-1]) if nz.size else -1
    if fm > 0.0:
        nz = np.nonzero(f[: tf + 1] > TRIM_RELATIVE * min(fm, 1.0))[0]
        ef = int(nz[-1]) if nz.size else -1
    else:
        ef = -1
    tb_call = min(tb, max(2 * eb, eb + max(ef, 0)))
    tf_call = min(tf, eb + ef) if ef >= 0 else 0
    return max(tb_call, 0), max(tf_call, 0)


def run(config: ScenarioConfig, progress=None) -> RunResult:
    import time as _time

    t_start = _time.perf_counter()
    M = config.n_max
    g = level_degeneracies(M)
    gE = g * np.arange(M, dtype=float)
    b0, f0 = init_state(config)
    evaporating = config.evap_b is not None or config.evap_f is not None

    n_rhs = [0]

    def make_rhs(tb, tf):
        # tops are fixed for a whole inter-event segment: floor(cutoff) is
        # constant there, and evaluating it per call would let the segment's
        # first evaluation (at the event time itself, where the floor still
        # includes the just-emptied level) disagree with the interior, which
        # drives that level negative under any stepper whose start-of-step
        # weight enters with both signs
        def rhs(tau, y):
            n_rhs[0] += 1
            b = y[:M]
            f = y[M : 2 * M]
            dy = np.zeros_like(y)
            tb_c, tf_c = _active_tops(b, f, tb, tf)
            if tb_c < 0:
                return dy
            if evaporating:
                dB, dF, lnb, lnf, leb, lef = total_rhs(
                    b, f, tb_c, tf_c, alpha_b=config.alpha_b
                )
                dy[2 * M + 0] = lnb
                dy[2 * M + 1] = leb
                dy[2 * M + 2] = lnf
                dy[2 * M + 3] = lef
            else:
                dB, dF = collision_rhs(b, f, alpha_b=config.alpha_b, top_b=tb_c, top_f=tf_c)
            dy[:M] = dB
            dy[M : 2 * M] = dF
            return dy

        return rhs

    def guard(y):
        b = y[:M]
        f = y[M : 2 * M]
        return bool(
            np.all(b >= 0.0) and np.all(f >= 0.0) and np.all(f <= 1.0)
        )

    # event times: cutoff-crossing levels per species, snapshots, endpoints
    crossings = []  # (tau, which, level)
    if config.evap_b:
        crossings += [(t, "b", L) for (t, L) in config.evap_b.crossing_times(config.tau_end, M)]
        if config.evap_b.e0 is not None and config.evap_b.hold_until < config.tau_end:
            crossings.append((config.evap_b.hold_until, "b", None))  # possible jump
    if config.evap_f:
        crossings += [(t, "f", L) for (t, L) in config.evap_f.crossing_times(config.tau_end, M)]
        if config.evap_f.e0 is not None and config.evap_f.hold_until < config.tau_end:
            crossings.append((config.evap_f.hold_until, "f", None))

    snap_times = set(float(t) for t in config.snapshot_times if 0 < t < config.tau_end)
    if config.snapshot_every:
        k = 1
        while k * config.snapshot_every < config.tau_end:
            snap_times.add(k * config.snapshot_every)
            k += 1

    events = {}
    for (t, which, L) in crossings:
        if t >= config.tau_end:
            continue  # a level exactly at the final cutoff is still trapped
        events.setdefault(t, {"transfers": [], "snap": False})["transfers"].append((which, L))
    for t in snap_times:
        events.setdefault(t, {"transfers": [], "snap": False})["snap"] = True
    event_times = sorted(events)

    y = np.concatenate([b0, f0, np.zeros(4)])
    snapshots = []

    def take_snapshot(tau, y):
        b = y[:M]
        f = y[M : 2 * M]
        cut_b = config.evap_b.cutoff(tau) if config.evap_b else math.inf
        cut_f = config.evap_f.cutoff(tau) if config.evap_f else math.inf
        tb = _top_from_cut(cut_b, M)
        tf = _top_from_cut(cut_f, M)
        N_b = float(np.dot(g, b))
        N_f = float(np.dot(g, f))
        E_b = float(np.dot(gE, b))
        E_f = float(np.dot(gE, f))
        tbb = zb = math.nan
        tbf = zf = math.nan
        if N_b > 0:
            try:
                fitb = statmech.fit_thermo("bose", N_b, E_b, EnergyGrid(tb + 1))
                tbb, zb = fitb.T_bar, fitb.z
            except Exception:
                pass
        if N_f > 0:
            try:
                fitf = statmech.fit_thermo("fermi", N_f, E_f, EnergyGrid(tf + 1))
                tbf, zf = fitf.T_bar, fitf.z
            except Exception:
                pass
        snapshots.append(
            Snapshot(
                tau=tau,
                cut_b=cut_b if math.isfinite(cut_b) else math.inf,
                cut_f=cut_f if math.isfinite(cut_f) else math.inf,
                n_b=N_b,
                n_f=N_f,
                e_b=E_b,
                e_f=E_f,
                t_bar_b=tbb,
                t_bar_f=tbf,
                z_b=zb,
                z_f=zf,
                condensate=observables.condensate_number(b),
                lost_n_b=float(y[2 * M]),
                lost_e_b=float(y[2 * M + 1]),
                lost_n_f=float(y[2 * M + 2]),
                lost_e_f=float(y[2 * M + 3]),
                entropy_b=observables.entropy_bose(b, g),
                entropy_f=observables.entropy_fermi(f, g),
                occ_b=b.copy(),
                occ_f=f.copy(),
            )
        )

    def apply_transfers(tau, y, items):
        b = y[:M]
        f = y[M : 2 * M]
        for which, L in items:
            sched = config.evap_b if which == "b" else config.evap_f
            if L is None:
                # ramp start: everything the cutoff jumped over leaves now
                new_top = _top_from_cut(sched.cutoff(tau), M)
                lo = new_top + 1
                hi = M
            else:
                lo, hi = L, L + 1
            if which == "b":
                dn = float(np.dot(g[lo:hi], b[lo:hi]))
                de = float(np.dot(gE[lo:hi], b[lo:hi]))
                y[2 * M + 0] += dn
                y[2 * M + 1] += de
                b[lo:hi] = 0.0
            else:
                dn = float(np.dot(g[lo:hi], f[lo:hi]))
                de = float(np.dot(gE[lo:hi], f[lo:hi]))
                y[2 * M + 2] += dn
                y[2 * M + 3] += de
                f[lo:hi] = 0.0

    take_snapshot(0.0, y)
    # occupation levels keep the configured absolute floor; the four loss
    # tallies are extensive (counts, energies up to ~N*T) and only tracked
    # relative to that magnitude.  trapped+lost totals are linear invariants
    # of the rhs, so loose tally control costs nothing in conservation, while
    # a 1e-12 absolute demand on them throttles the step size badly.
    ext = max(1.0, float(np.dot(g, b0 + f0)), float(np.dot(gE, b0 + f0)))
    atol_vec = np.full(2 * M + 4, config.atol)
    atol_vec[2 * M :] = config.rtol * ext
    tau = 0.0
    dt = None
    n_steps = 0
    rho_keep = {}
    for t_next in list(event_times) + [config.tau_end]:
        if t_next <= tau:
            if t_next in events:
                apply_transfers(t_next, y, events[t_next]["transfers"])
                if events[t_next]["snap"]:
                    take_snapshot(t_next, y)
            continue
        t_mid = 0.5 * (tau + t_next)
        cut_b = config.evap_b.cutoff(t_mid) if config.evap_b else math.inf
        cut_f = config.evap_f.cutoff(t_mid) if config.evap_f else math.inf
        rhs = make_rhs(_top_from_cut(cut_b, M), _top_from_cut(cut_f, M))
        if config.stepper == "rkc":
            seg = integrate_rkc(
                rhs, tau, y, t_next,
                rtol=config.rtol, atol=atol_vec,
                guard=guard, dt0=dt, rho_keep=rho_keep,
            )
        else:
            seg = integrate(
                rhs, tau, y, t_next,
                rtol=config.rtol, atol=atol_vec,
                guard=guard, dt0=dt,
            )
        y = seg.y_end
        tau = t_next
        dt = seg.dt_last
        n_steps += seg.n_steps
        if t_next in events:
            apply_transfers(t_next, y, events[t_next]["transfers"])
            if events[t_next]["snap"]:
                take_snapshot(t_next, y)
        if progress:
            progress(tau, y)
    take_snapshot(config.tau_end, y)

    return RunResult(
        config=config,
        snapshots=snapshots,
        b=y[:M].copy(),
        f=y[M : 2 * M].copy(),
        lost={
            "n_b": float(y[2 * M]),
            "e_b": float(y[2 * M + 1]),
            "n_f": float(y[2 * M + 2]),
            "e_f": float(y[2 * M + 3]),
        },
        n_steps=n_steps,
        n_rhs=n_rhs[0],
        wall_time=_time.perf_counter() - t_start,
    )
