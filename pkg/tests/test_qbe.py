import math

import numpy as np
import pytest

from sympcool import qbe, statmech
from sympcool.kernels import level_degeneracies
from sympcool.qbe import EvaporationSchedule, ScenarioConfig, init_state, run
from sympcool.trap import EnergyGrid


def closed_config(**kw):
    base = dict(
        n_b=2000.0, n_f=200.0, t_b0=6.0, t_f0=10.0,
        n_max=60, tau_end=0.01, rtol=1e-8,
    )
    base.update(kw)
    return ScenarioConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        closed_config(stepper="euler")
    with pytest.raises(ValueError):
        closed_config(n_b=-1.0)
    with pytest.raises(ValueError):
        closed_config(n_max=1)
    with pytest.raises(ValueError):
        closed_config(tau_end=0.0)
    with pytest.raises(ValueError):
        closed_config(t_f0=0.0)
    with pytest.raises(ValueError):
        closed_config(t_b0=-2.0)


def test_schedule_cutoff_shape():
    sched = EvaporationSchedule(initial_cut=100.0, hold_until=0.5, e0=100.0, gamma=1.0)
    assert sched.cutoff(0.0) == 100.0
    assert sched.cutoff(0.49999) == 100.0
    # one ramp e-fold of ln 2 halves the cutoff
    assert sched.cutoff(0.5 + math.log(2.0)) == pytest.approx(50.0, rel=1e-12)
    flat = EvaporationSchedule(initial_cut=80.0)
    assert flat.cutoff(1e9) == 80.0
    assert EvaporationSchedule().cutoff(0.0) == math.inf


def test_schedule_crossing_times_analytic():
    sched = EvaporationSchedule(initial_cut=8.0, hold_until=0.1, e0=8.0, gamma=2.0)
    got = sched.crossing_times(10.0, 100)
    # the ramp starts exactly at level 8, so that level empties at the hold end
    want = [(0.1 + math.log(8.0 / L) / 2.0, L) for L in range(8, 0, -1)]
    assert [L for _, L in got] == [L for _, L in want]
    for (t, _), (tw, _) in zip(got, want):
        assert t == pytest.approx(tw, rel=1e-12)
    # horizon clips the tail
    short = sched.crossing_times(0.1 + math.log(8.0 / 5.0) / 2.0, 100)
    assert [L for _, L in short] == [8, 7, 6, 5]
    assert EvaporationSchedule(initial_cut=50.0).crossing_times(1.0, 100) == []


def test_init_state_matches_requested_totals():
    cfg = closed_config()
    b, f = init_state(cfg)
    g = level_degeneracies(cfg.n_max)
    assert float(np.dot(g, b)) == pytest.approx(cfg.n_b, rel=1e-12)
    assert float(np.dot(g, f)) == pytest.approx(cfg.n_f, rel=1e-9)
    assert np.all(b >= 0) and np.all(f >= 0) and np.all(f <= 1)


def test_init_state_cold_fermi_sea_is_sharp():
    # at t_f0 far below the Fermi temperature the occupation is a step
    cfg = closed_config(n_f=220.0, t_f0=0.05)
    _, f = init_state(cfg)
    # 220 = capacity of 10 shells exactly
    assert np.all(f[:10] > 0.999)
    assert np.all(f[11:] < 1e-3)


def test_init_state_capacity_error():
    with pytest.raises(ValueError, match="exceed"):
        sched = EvaporationSchedule(initial_cut=4.0)
        init_state(closed_config(n_f=100.0, evap_f=sched))


def test_closed_run_conserves_and_equilibrates():
    cfg = closed_config(tau_end=0.5)
    res = run(cfg)
    g = level_degeneracies(cfg.n_max)
    gE = g * np.arange(cfg.n_max)
    first, last = res.snapshots[0], res.snapshots[-1]
    assert last.n_b == pytest.approx(first.n_b, rel=1e-8)
    assert last.n_f == pytest.approx(first.n_f, rel=1e-8)
    e_tot0 = first.e_b + first.e_f
    assert last.e_b + last.e_f == pytest.approx(e_tot0, rel=1e-8)
    # species thermalize to a common temperature
    assert last.t_bar_b == pytest.approx(last.t_bar_f, rel=2e-3)
    # and the final state matches the closed equilibrium prediction on the
    # same truncated grid (the wide default grid holds a few percent more
    # energy at these temperatures, mostly in the fermion tail)
    run_grid = EnergyGrid(cfg.n_max)
    eq = statmech.equilibrium_temperature(
        cfg.n_b, cfg.n_f, cfg.t_b0, cfg.t_f0, grid_b=run_grid, grid_f=run_grid
    )
    assert last.t_bar_b == pytest.approx(eq.T_infinity, rel=5e-3)


def test_common_temperature_start_is_stationary():
    # uncondensed on purpose: a finite condensate is only a fixed point in
    # the thermodynamic limit. The grid is wide because the init rescale
    # perturbs the whole distribution by the truncated tail weight
    # (~e^{-250/8} here) and collision rates amplify that into the drift.
    cfg = ScenarioConfig(
        n_b=500.0, n_f=50.0, t_b0=8.0, t_f0=8.0,
        n_max=250, tau_end=0.01, rtol=1e-10,
    )
    b0, f0 = init_state(cfg)
    res = run(cfg)
    # detailed balance holds level by level, so occupations must not drift
    drift = max(np.max(np.abs(res.b - b0)), np.max(np.abs(res.f - f0)))
    assert drift < 1e-9


def test_no_bosons_freezes_fermions():
    cfg = closed_config(n_b=0.0, t_b0=0.0, tau_end=0.05)
    b0, f0 = init_state(cfg)
    res = run(cfg)
    assert np.array_equal(res.b, b0)
    # fermions need bosons to scatter off; stage recombination of the
    # unchanged state leaves ulp-level noise, nothing physical
    assert np.allclose(res.f, f0, rtol=1e-12, atol=0.0)
    assert res.snapshots[-1].n_f == pytest.approx(200.0, rel=1e-12)


def test_steppers_agree_on_closed_run():
    kw = dict(tau_end=0.05)
    res_rkc = run(closed_config(stepper="rkc", **kw))
    res_dp5 = run(closed_config(stepper="dp5", **kw))
    assert np.allclose(res_rkc.b, res_dp5.b, rtol=1e-4, atol=1e-10)
    assert np.allclose(res_rkc.f, res_dp5.f, rtol=1e-4, atol=1e-10)


def evap_config(**kw):
    base = dict(
        n_b=2000.0, n_f=200.0, t_b0=6.0, t_f0=10.0,
        n_max=60, tau_end=0.3, rtol=1e-8,
        evap_b=EvaporationSchedule(initial_cut=40.0, hold_until=0.05, e0=40.0, gamma=2.0),
        evap_f=EvaporationSchedule(initial_cut=59.0, hold_until=0.05, e0=40.0, gamma=2.0),
    )
    base.update(kw)
    return ScenarioConfig(**base)


def test_evaporative_run_closure_and_monotone_losses():
    cfg = evap_config()
    res = run(cfg)
    first = res.snapshots[0]
    n_b0, n_f0 = first.n_b, first.n_f
    e_tot0 = first.e_b + first.e_f
    tab = res.table()
    cols = {k: i for i, k in enumerate(qbe.Snapshot.FIELDS)}
    n_b_t = tab[:, cols["n_b"]] + tab[:, cols["lost_n_b"]]
    n_f_t = tab[:, cols["n_f"]] + tab[:, cols["lost_n_f"]]
    e_t = (tab[:, cols["e_b"]] + tab[:, cols["e_f"]]
           + tab[:, cols["lost_e_b"]] + tab[:, cols["lost_e_f"]])
    assert np.allclose(n_b_t, n_b0, rtol=1e-8)
    assert np.allclose(n_f_t, n_f0, rtol=1e-8)
    assert np.allclose(e_t, e_tot0, rtol=1e-8)
    # loss tallies never decrease
    for k in ("lost_n_b", "lost_n_f", "lost_e_b", "lost_e_f"):
        assert np.all(np.diff(tab[:, cols[k]]) >= -1e-10)
    # evaporation actually removed something
    assert res.lost["n_b"] > 0.0
    assert res.snapshots[-1].n_b < n_b0


def test_ramp_start_jump_empties_levels_above_cutoff():
    # cutoff jumps from 59 to 40 at the hold end: everything in (40, 59]
    # moves to the loss tallies at that instant
    cfg = evap_config(
        tau_end=0.0500001,
        evap_b=EvaporationSchedule(initial_cut=59.0, hold_until=0.05, e0=40.0, gamma=2.0),
        evap_f=None,
        snapshot_times=(0.05,),
    )
    res = run(cfg)
    snaps = {round(s.tau, 7): s for s in res.snapshots}
    at_jump = snaps[0.05]
    assert np.all(res.b[41:] == 0.0)
    assert at_jump.lost_n_b > 0.0


def test_crossing_transfer_zeroes_level():
    # first crossing after the hold: level 40 empties exactly at
    # hold + ln(e0/40)/gamma; run just past it and look at the state
    cfg = evap_config(evap_f=None)
    t_cross = 0.05 + math.log(40.0 / 39.0) / 2.0
    cfg = evap_config(evap_f=None, tau_end=t_cross + 1e-6)
    res = run(cfg)
    assert np.all(res.b[40:] == 0.0)  # 40 jumped at the ramp start? no: cut starts at 40
    assert res.b[39] == 0.0  # emptied by the crossing event
    assert res.b[38] > 0.0


def test_snapshots_carry_occupations_and_times():
    cfg = closed_config(tau_end=0.02, snapshot_times=(0.005, 0.015))
    res = run(cfg)
    taus = [s.tau for s in res.snapshots]
    assert taus[0] == 0.0 and taus[-1] == pytest.approx(0.02)
    assert 0.005 in taus and 0.015 in taus
    for s in res.snapshots:
        assert s.occ_b is not None and s.occ_b.shape == (cfg.n_max,)
        g = level_degeneracies(cfg.n_max)
        assert float(np.dot(g, s.occ_b)) == pytest.approx(s.n_b, rel=1e-12)
    # 2000 bosons at t_bar = 6 sit well below the condensation point near
    # 11.9, so the fitted condensate has to be macroscopic
    frac = res.snapshots[-1].condensate / res.snapshots[-1].n_b
    assert 0.6 < frac < 0.95


def test_snapshot_every_grid():
    cfg = closed_config(tau_end=0.02, snapshot_every=0.005)
    res = run(cfg)
    taus = [s.tau for s in res.snapshots]
    for t in (0.005, 0.01, 0.015):
        assert any(abs(x - t) < 1e-12 for x in taus)


def test_positivity_and_pauli_at_end(rng):
    res = run(evap_config(tau_end=0.2))
    assert np.all(res.b >= 0.0)
    assert np.all(res.f >= -1e-15) and np.all(res.f <= 1.0 + 1e-15)
