"""Command line interface.

Subcommands: equilibrium, mbmodel, run, sweep, meanfield, presets.
Configuration comes from a YAML file (--config) or a named preset
(--preset). Every invocation writes a manifest JSON recording the config
digest, engine version and unit constants; every CSV opens with the digest
so outputs can be traced back to the exact configuration that produced
them. All numeric columns are written at full round-trip precision and the
pipeline is deterministic: identical config, identical bytes (the manifest
additionally records wall-clock time, which is informational only).

Exit codes: 0 success, 2 configuration error (message names the offending
key), 3 numerical failure (diagnostics file written next to the outputs).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import yaml

from . import __version__, meanfield, mbmodel, observables, presets, qbe, statmech, trap
from ._rk import StepUnderflow
from .trap import KB, PRESET_TRAPS, TrapSpec, tau0

SCHEMA_VERSION = 1


class ConfigError(Exception):
    """Bad configuration; the message names the offending key."""


# ---------------------------------------------------------------- config


def _require_mapping(obj, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(obj).__name__}")
    return obj


def _check_keys(d, allowed, where):
    for k in d:
        if k not in allowed:
            raise ConfigError(f"unknown config key {where}.{k}" if where else f"unknown config key {k}")


def _as_float(v, key):
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {v!r}") from None


def _as_int(v, key):
    f = _as_float(v, key)
    if f != int(f):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    return int(f)


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"config parse error: {e}") from None
    doc = _require_mapping(doc, "config")
    if "schema_version" not in doc:
        raise ConfigError("missing config key schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {doc['schema_version']!r}"
        )
    return doc


_SCHEDULE_KEYS = ("initial_cut", "hold_until", "e0", "gamma")
_SCENARIO_KEYS = tuple(f.name for f in dataclasses.fields(qbe.ScenarioConfig))
_TRAP_KEYS = tuple(f.name for f in dataclasses.fields(TrapSpec))


def _schedule_from_dict(d, where):
    d = _require_mapping(d, where)
    _check_keys(d, _SCHEDULE_KEYS, where)
    kw = {}
    for k in ("initial_cut", "e0"):
        if d.get(k) is not None:
            kw[k] = _as_float(d[k], f"{where}.{k}")
    for k in ("hold_until", "gamma"):
        if k in d:
            kw[k] = _as_float(d[k], f"{where}.{k}")
    return qbe.EvaporationSchedule(**kw)


def scenario_from_dict(d, where="scenario") -> qbe.ScenarioConfig:
    d = _require_mapping(d, where)
    _check_keys(d, _SCENARIO_KEYS, where)
    for k in ("n_b", "n_f", "t_b0", "t_f0", "n_max", "tau_end"):
        if k not in d:
            raise ConfigError(f"missing config key {where}.{k}")
    kw = {
        "n_b": _as_float(d["n_b"], f"{where}.n_b"),
        "n_f": _as_float(d["n_f"], f"{where}.n_f"),
        "t_b0": _as_float(d["t_b0"], f"{where}.t_b0"),
        "t_f0": _as_float(d["t_f0"], f"{where}.t_f0"),
        "n_max": _as_int(d["n_max"], f"{where}.n_max"),
        "tau_end": _as_float(d["tau_end"], f"{where}.tau_end"),
    }
    for k in ("alpha_b", "rtol", "atol", "snapshot_every"):
        if d.get(k) is not None:
            kw[k] = _as_float(d[k], f"{where}.{k}")
    if "stepper" in d:
        kw["stepper"] = str(d["stepper"])
    if "label" in d:
        kw["label"] = str(d["label"])
    if "snapshot_times" in d:
        ts = d["snapshot_times"]
        if not isinstance(ts, (list, tuple)):
            raise ConfigError(f"{where}.snapshot_times: expected a list")
        kw["snapshot_times"] = tuple(
            _as_float(t, f"{where}.snapshot_times") for t in ts
        )
    for k in ("evap_b", "evap_f"):
        if d.get(k) is not None:
            kw[k] = _schedule_from_dict(d[k], f"{where}.{k}")
    try:
        return qbe.ScenarioConfig(**kw)
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from None


def trap_from_config(v, where="trap") -> TrapSpec | None:
    if v is None:
        return None
    if isinstance(v, str):
        if v not in PRESET_TRAPS:
            known = ", ".join(sorted(PRESET_TRAPS))
            raise ConfigError(f"{where}: unknown trap preset {v!r}; known: {known}")
        return PRESET_TRAPS[v]
    v = _require_mapping(v, where)
    _check_keys(v, _TRAP_KEYS, where)
    for k in ("mass", "omega", "a_b", "a_bf"):
        if k not in v:
            raise ConfigError(f"missing config key {where}.{k}")
    kw = {k: _as_float(v[k], f"{where}.{k}") for k in ("mass", "omega", "a_b", "a_bf")}
    if "sigma_convention" in v:
        kw["sigma_convention"] = str(v["sigma_convention"])
    try:
        return TrapSpec(**kw)
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from None


# -------------------------------------------------------------- manifest


def _canonical(obj):
    """Plain-python form with deterministic ordering for digesting."""
    if isinstance(obj, dict):
        return {str(k): _canonical(obj[k]) for k in sorted(obj, key=str)}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def config_digest(resolved: dict) -> str:
    blob = json.dumps(_canonical(resolved), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def scenario_to_dict(cfg: qbe.ScenarioConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["snapshot_times"] = list(cfg.snapshot_times)
    return d


def trap_to_dict(spec: TrapSpec | None):
    return dataclasses.asdict(spec) if spec else None


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, digest: str, columns, rows):
    with open(path, "w") as fh:
        fh.write(f"# manifest sha256:{digest}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(out_dir: Path, name: str, resolved: dict, digest: str,
                   outputs, wall: float, spec: TrapSpec | None):
    manifest = {
        "digest": f"sha256:{digest}",
        "engine_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "tau0_seconds": tau0(spec) if spec else None,
        "hbar_omega_joules": spec.hbar_omega if spec else None,
        "wall_seconds": wall,
        "outputs": sorted(outputs),
        "config": _canonical(resolved),
    }
    path = out_dir / name
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _ensure_out(out: str) -> Path:
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


# ------------------------------------------------------------------- run


def _si_columns(spec: TrapSpec):
    t0 = tau0(spec)
    quantum_uK = spec.hbar_omega / KB * 1e6
    return t0, quantum_uK


def cmd_run(args) -> int:
    if args.config:
        doc = load_config(args.config)
        _check_keys(doc, ("schema_version", "scenario", "trap"), "")
        if "scenario" not in doc:
            raise ConfigError("missing config key scenario")
        cfg = scenario_from_dict(doc["scenario"])
        spec = trap_from_config(doc.get("trap"))
    elif args.preset:
        try:
            cfg = presets.scenario(args.preset)
        except KeyError as e:
            raise ConfigError(str(e.args[0])) from None
        spec = presets.trap_for(args.preset)
    else:
        raise ConfigError("run needs --config or --preset")
    if args.snapshot_every is not None:
        cfg = dataclasses.replace(cfg, snapshot_every=args.snapshot_every)

    resolved = {
        "command": "run",
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario_to_dict(cfg),
        "trap": trap_to_dict(spec),
    }
    digest = config_digest(resolved)
    out = _ensure_out(args.out)
    t_wall = time.perf_counter()
    try:
        res = qbe.run(cfg)
    except StepUnderflow as e:
        return _numerical_failure(out, cfg.label, digest, e)

    columns = list(qbe.Snapshot.FIELDS)
    rows = [s.as_row() for s in res.snapshots]
    if spec:
        t0, uk = _si_columns(spec)
        columns += ["tau_seconds", "t_b_uK", "t_f_uK"]
        for row in rows:
            row += [row[0] * t0, row[7] * uk, row[8] * uk]
    ts_name = f"{cfg.label}_timeseries.csv"
    write_csv(out / ts_name, digest, columns, rows)

    lv_name = f"{cfg.label}_levels.csv"
    g = qbe.level_degeneracies(cfg.n_max)
    write_csv(
        out / lv_name, digest,
        ["level", "degeneracy", "b", "f"],
        [(i, int(g[i]), res.b[i], res.f[i]) for i in range(cfg.n_max)],
    )
    outputs = [ts_name, lv_name]

    if args.dump_levels:
        for k, s in enumerate(res.snapshots):
            name = f"{cfg.label}_levels_{k:03d}.csv"
            write_csv(
                out / name, digest,
                ["tau", "level", "degeneracy", "b", "f"],
                [(s.tau, i, int(g[i]), s.occ_b[i], s.occ_f[i])
                 for i in range(cfg.n_max)],
            )
            outputs.append(name)

    if args.profile:
        last = res.snapshots[-1]
        radii = observables.default_radii(cfg.n_max - 1, n_points=400)
        n_b_r = observables.spatial_profile(res.b, radii)
        n_f_r = observables.spatial_profile(res.f, radii)
        if last.n_f > 0:
            # instantaneous Fermi radius: turning point of (6 N_f)^(1/3)
            r_f = math.sqrt(2.0 * (6.0 * last.n_f) ** (1.0 / 3.0))
            scaled = n_f_r * r_f**3 / last.n_f
        else:
            r_f = math.nan
            scaled = np.full_like(n_f_r, math.nan)
        pr_name = f"{cfg.label}_profile.csv"
        write_csv(
            out / pr_name, digest,
            ["r_osc", "r_over_rf", "n_b", "n_f", "n_f_scaled"],
            zip(radii, radii / r_f, n_b_r, n_f_r, scaled),
        )
        outputs.append(pr_name)

    wall = time.perf_counter() - t_wall
    write_manifest(out, f"{cfg.label}_manifest.json", resolved, digest,
                   outputs, wall, spec)
    last = res.snapshots[-1]
    print(f"{cfg.label}: tau={last.tau:g} N_b={last.n_b:.4g} N_f={last.n_f:.4g} "
          f"T_b={last.t_bar_b:.4g} T_f={last.t_bar_f:.4g} "
          f"condensate={last.condensate:.4g} ({res.n_steps} steps, {wall:.1f}s)")
    print(f"wrote {out / ts_name}, {out / lv_name}")
    return 0


def _numerical_failure(out: Path, label: str, digest: str, err) -> int:
    diag = {
        "digest": f"sha256:{digest}",
        "error": type(err).__name__,
        "message": str(err),
        "t": getattr(err, "t", None),
        "dt": getattr(err, "dt", None),
    }
    path = out / f"{label}_failure.json"
    with open(path, "w") as fh:
        json.dump(diag, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"numerical failure: {err}\ndiagnostics: {path}", file=sys.stderr)
    return 3


# ----------------------------------------------------------------- sweep


def _apply_override(scen: dict, path: str, value):
    keys = path.split(".")
    d = scen
    for k in keys[:-1]:
        if not isinstance(d.get(k), dict):
            d[k] = {}
        d = d[k]
    d[keys[-1]] = value


def _sweep_point(payload):
    scen_dict, overrides = payload
    scen = json.loads(json.dumps(scen_dict))  # deep copy
    for path, value in overrides:
        _apply_override(scen, path, value)
    cfg = scenario_from_dict(scen)
    res = qbe.run(cfg)
    last = res.snapshots[-1]
    t_f_level = (6.0 * last.n_f) ** (1.0 / 3.0) if last.n_f > 0 else math.nan
    g = qbe.level_degeneracies(cfg.n_max)
    return {
        "n_b_end": last.n_b,
        "n_f_end": last.n_f,
        "t_bar_b_end": last.t_bar_b,
        "t_bar_f_end": last.t_bar_f,
        "t_f_over_tf_end": last.t_bar_f / t_f_level if last.n_f > 0 else math.nan,
        "condensate_fraction": observables.condensate_fraction(res.b, g),
        "lost_n_b": res.lost["n_b"],
        "lost_n_f": res.lost["n_f"],
    }


_END_COLUMNS = (
    "n_b_end", "n_f_end", "t_bar_b_end", "t_bar_f_end",
    "t_f_over_tf_end", "condensate_fraction", "lost_n_b", "lost_n_f",
)


def cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigError("sweep needs --config (a scenario plus an axes mapping)")
    doc = load_config(args.config)
    _check_keys(doc, ("schema_version", "scenario", "trap", "axes"), "")
    for k in ("scenario", "axes"):
        if k not in doc:
            raise ConfigError(f"missing config key {k}")
    axes = _require_mapping(doc["axes"], "axes")
    if not axes:
        raise ConfigError("axes: need at least one axis")
    for name, values in axes.items():
        if not isinstance(values, (list, tuple)) or not values:
            raise ConfigError(f"axes.{name}: expected a non-empty list")
    scen_dict = _require_mapping(doc["scenario"], "scenario")
    spec = trap_from_config(doc.get("trap"))
    scenario_from_dict(json.loads(json.dumps(scen_dict)))  # validate base early

    axis_names = list(axes)
    grids = [list(axes[k]) for k in axis_names]
    points = []
    idx = [0] * len(grids)
    while True:
        points.append([(axis_names[i], grids[i][idx[i]]) for i in range(len(grids))])
        for i in range(len(grids) - 1, -1, -1):
            idx[i] += 1
            if idx[i] < len(grids[i]):
                break
            idx[i] = 0
        else:
            break

    resolved = {
        "command": "sweep",
        "schema_version": SCHEMA_VERSION,
        "scenario": scen_dict,
        "trap": trap_to_dict(spec),
        "axes": {k: list(v) for k, v in axes.items()},
    }
    digest = config_digest(resolved)
    out = _ensure_out(args.out)
    t_wall = time.perf_counter()

    payloads = [(scen_dict, ov) for ov in points]
    workers = max(1, args.workers)
    try:
        if workers == 1:
            results = [_sweep_point(p) for p in payloads]
        else:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(_sweep_point, payloads))
    except StepUnderflow as e:
        return _numerical_failure(out, "sweep", digest, e)

    columns = axis_names + list(_END_COLUMNS)
    rows = []
    for overrides, metrics in zip(points, results):
        rows.append([v for (_, v) in overrides] + [metrics[c] for c in _END_COLUMNS])
    write_csv(out / "sweep.csv", digest, columns, rows)
    wall = time.perf_counter() - t_wall
    write_manifest(out, "sweep_manifest.json", resolved, digest,
                   ["sweep.csv"], wall, spec)
    print(f"sweep: {len(rows)} points -> {out / 'sweep.csv'} ({wall:.1f}s)")
    return 0


# ----------------------------------------------------------- equilibrium

_EQ_RATIOS = tuple(round(0.25 * k, 2) for k in range(2, 13))  # 0.5 .. 3.0


def cmd_equilibrium(args) -> int:
    n_b = presets.EQUILIBRIUM_N_B
    n_f_list = list(presets.EQUILIBRIUM_N_F)
    tb_over_tf = presets.EQUILIBRIUM_TB0_OVER_TF
    ratios = list(_EQ_RATIOS)
    if args.config:
        doc = load_config(args.config)
        _check_keys(doc, ("schema_version", "equilibrium"), "")
        eq = _require_mapping(doc.get("equilibrium", {}), "equilibrium")
        _check_keys(eq, ("n_b", "n_f", "t_b0_over_tf", "t_f0_over_tf"), "equilibrium")
        if "n_b" in eq:
            n_b = _as_float(eq["n_b"], "equilibrium.n_b")
        if "n_f" in eq:
            if not isinstance(eq["n_f"], (list, tuple)):
                raise ConfigError("equilibrium.n_f: expected a list")
            n_f_list = [_as_float(v, "equilibrium.n_f") for v in eq["n_f"]]
        if "t_b0_over_tf" in eq:
            tb_over_tf = _as_float(eq["t_b0_over_tf"], "equilibrium.t_b0_over_tf")
        if "t_f0_over_tf" in eq:
            if not isinstance(eq["t_f0_over_tf"], (list, tuple)):
                raise ConfigError("equilibrium.t_f0_over_tf: expected a list")
            ratios = [_as_float(v, "equilibrium.t_f0_over_tf") for v in eq["t_f0_over_tf"]]

    resolved = {
        "command": "equilibrium",
        "schema_version": SCHEMA_VERSION,
        "equilibrium": {
            "n_b": n_b, "n_f": n_f_list,
            "t_b0_over_tf": tb_over_tf, "t_f0_over_tf": ratios,
        },
    }
    digest = config_digest(resolved)
    out = _ensure_out(args.out)
    t_wall = time.perf_counter()
    rows = []
    for n_f in n_f_list:
        t_fermi = (6.0 * n_f) ** (1.0 / 3.0)
        t_b0 = tb_over_tf * t_fermi
        for r in ratios:
            t_f0 = r * t_fermi
            eqr = statmech.equilibrium_temperature(n_b, n_f, t_b0, t_f0)
            t_deg = statmech.approx_T_degenerate(t_fermi, t_b0, t_f0)
            t_cls = statmech.approx_T_classical(n_b, n_f, t_b0, t_f0)
            rows.append([
                n_f, r, eqr.T_infinity / t_fermi, eqr.T_infinity,
                t_deg / t_fermi, t_cls / t_fermi,
            ])
    write_csv(
        out / "equilibrium.csv", digest,
        ["n_f", "t_f0_over_tf", "t_inf_over_tf", "t_inf",
         "t_approx_degenerate_over_tf", "t_approx_classical_over_tf"],
        rows,
    )
    wall = time.perf_counter() - t_wall
    write_manifest(out, "equilibrium_manifest.json", resolved, digest,
                   ["equilibrium.csv"], wall, None)
    print(f"equilibrium: {len(rows)} points -> {out / 'equilibrium.csv'} ({wall:.1f}s)")
    return 0


# --------------------------------------------------------------- mbmodel


def cmd_mbmodel(args) -> int:
    n_b, n_f, t_b0, t_f0, tau_end = 1e5, 1e3, 43.7, 81.8, 0.3
    if args.config:
        doc = load_config(args.config)
        _check_keys(doc, ("schema_version", "mbmodel"), "")
        mb = _require_mapping(doc.get("mbmodel", {}), "mbmodel")
        _check_keys(mb, ("n_b", "n_f", "t_b0", "t_f0", "tau_end"), "mbmodel")
        n_b = _as_float(mb.get("n_b", n_b), "mbmodel.n_b")
        n_f = _as_float(mb.get("n_f", n_f), "mbmodel.n_f")
        t_b0 = _as_float(mb.get("t_b0", t_b0), "mbmodel.t_b0")
        t_f0 = _as_float(mb.get("t_f0", t_f0), "mbmodel.t_f0")
        tau_end = _as_float(mb.get("tau_end", tau_end), "mbmodel.tau_end")

    resolved = {
        "command": "mbmodel",
        "schema_version": SCHEMA_VERSION,
        "mbmodel": {"n_b": n_b, "n_f": n_f, "t_b0": t_b0, "t_f0": t_f0,
                    "tau_end": tau_end},
    }
    digest = config_digest(resolved)
    out = _ensure_out(args.out)
    t_wall = time.perf_counter()
    try:
        state0 = mbmodel.TwoTempState(T_bar_f=t_f0, T_bar_b=t_b0, N_f=n_f, N_b=n_b)
    except ValueError as e:
        raise ConfigError(f"mbmodel: {e}") from None
    try:
        table = mbmodel.integrate_two_temperature(state0, tau_end)
    except StepUnderflow as e:
        return _numerical_failure(out, "mbmodel", digest, e)
    write_csv(out / "mbmodel.csv", digest,
              ["tau", "t_bar_f", "t_bar_b"],
              [list(row) for row in table])
    wall = time.perf_counter() - t_wall
    write_manifest(out, "mbmodel_manifest.json", resolved, digest,
                   ["mbmodel.csv"], wall, None)
    print(f"mbmodel: {table.shape[0]} samples -> {out / 'mbmodel.csv'} ({wall:.1f}s)")
    return 0


# ------------------------------------------------------------- meanfield


def cmd_meanfield(args) -> int:
    n_b, n_f = 1e5, 1e4
    spec = PRESET_TRAPS["K40-K39"]
    n_points = 400
    if args.config:
        doc = load_config(args.config)
        _check_keys(doc, ("schema_version", "meanfield", "trap"), "")
        mf = _require_mapping(doc.get("meanfield", {}), "meanfield")
        _check_keys(mf, ("n_b", "n_f", "n_points"), "meanfield")
        n_b = _as_float(mf.get("n_b", n_b), "meanfield.n_b")
        n_f = _as_float(mf.get("n_f", n_f), "meanfield.n_f")
        if "n_points" in mf:
            n_points = _as_int(mf["n_points"], "meanfield.n_points")
        if "trap" in doc:
            spec = trap_from_config(doc["trap"])

    try:
        inp = meanfield.MeanFieldInput(
            N_b=n_b, N_f=n_f, a_b=spec.a_b, a_bf=spec.a_bf,
            mass=spec.mass, omega=spec.omega,
        )
    except ValueError as e:
        raise ConfigError(f"meanfield: {e}") from None

    resolved = {
        "command": "meanfield",
        "schema_version": SCHEMA_VERSION,
        "meanfield": {"n_b": n_b, "n_f": n_f, "n_points": n_points},
        "trap": trap_to_dict(spec),
    }
    digest = config_digest(resolved)
    out = _ensure_out(args.out)
    t_wall = time.perf_counter()
    r_max = 1.2 * max(meanfield.tf_radius(inp), meanfield.fermi_radius(inp))
    radii = np.linspace(0.0, r_max, n_points)
    nb = meanfield.tf_profile(inp, radii)
    nf_ideal = meanfield.ideal_fermion_profile(inp, radii)
    nf_mf = meanfield.mf_fermion_profile(inp, radii)
    write_csv(out / "meanfield_profiles.csv", digest,
              ["r_m", "n_b_tf_m3", "n_f_ideal_m3", "n_f_meanfield_m3"],
              zip(radii, nb, nf_ideal, nf_mf))
    wall = time.perf_counter() - t_wall
    write_manifest(out, "meanfield_manifest.json", resolved, digest,
                   ["meanfield_profiles.csv"], wall, spec)
    print(f"meanfield: {n_points} radii -> {out / 'meanfield_profiles.csv'} ({wall:.1f}s)")
    return 0


# --------------------------------------------------------------- presets


def cmd_presets(args) -> int:
    if args.action != "list":
        raise ConfigError(f"presets: unknown action {args.action!r} (try 'list')")
    print("scenario presets:")
    for name in sorted(presets.SCENARIOS):
        c = presets.SCENARIOS[name]
        ramps = []
        if c.evap_b and c.evap_b.e0 is not None:
            ramps.append(f"bose cut {c.evap_b.initial_cut:g}->ramp g={c.evap_b.gamma:g}")
        elif c.evap_b:
            ramps.append(f"bose cut {c.evap_b.initial_cut:g} fixed")
        if c.evap_f and c.evap_f.e0 is not None:
            ramps.append(f"fermi cut {c.evap_f.initial_cut:g}->ramp g={c.evap_f.gamma:g}")
        elif c.evap_f:
            ramps.append(f"fermi cut {c.evap_f.initial_cut:g} fixed")
        evap = "; ".join(ramps) if ramps else "closed"
        print(f"  {name:16s} N_b={c.n_b:g} N_f={c.n_f:g} T_b0={c.t_b0:g} "
              f"T_f0={c.t_f0:g} n_max={c.n_max} tau_end={c.tau_end:g} [{evap}]")
    print("trap presets:")
    for name in sorted(PRESET_TRAPS):
        t = PRESET_TRAPS[name]
        print(f"  {name:16s} mass={t.mass:g} kg omega={t.omega:g} rad/s "
              f"a_b={t.a_b:g} m a_bf={t.a_bf:g} m (tau0={tau0(t):.4g} s)")
    return 0


# ------------------------------------------------------------------ main


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sympcool",
        description="Cooling kinetics of a trapped Bose-Fermi mixture.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="YAML configuration file")
        sp.add_argument("--out", default="out", help="output directory (default: out)")

    sp = sub.add_parser("run", help="evolve a cooling scenario")
    common(sp)
    sp.add_argument("--preset", help="named scenario preset (see 'presets list')")
    sp.add_argument("--snapshot-every", type=float, metavar="TAU",
                    help="extra snapshots at this interval")
    sp.add_argument("--dump-levels", action="store_true",
                    help="write full occupation vectors for every snapshot")
    sp.add_argument("--profile", action="store_true",
                    help="write the end-state radial density profile")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("sweep", help="Cartesian parameter sweep of run scenarios")
    common(sp)
    sp.add_argument("--workers", type=int, default=1, help="concurrent runs")
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("equilibrium", help="common-temperature curves after thermal contact")
    common(sp)
    sp.set_defaults(fn=cmd_equilibrium)

    sp = sub.add_parser("mbmodel", help="closed two-temperature relaxation model")
    common(sp)
    sp.set_defaults(fn=cmd_mbmodel)

    sp = sub.add_parser("meanfield", help="stationary density profiles with boson back-action")
    common(sp)
    sp.set_defaults(fn=cmd_meanfield)

    sp = sub.add_parser("presets", help="inspect built-in presets")
    sp.add_argument("action", nargs="?", default="list")
    sp.set_defaults(fn=cmd_presets)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
