"""Experiment plumbing behind the command line: runs, law suites, sweeps.

Everything here returns plain dicts (JSON-ready through :mod:`serialize`)
and never reads the clock, so identical configs give identical summaries.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config as cfgmod
from . import serialize
from .claws import (fields_from_history, hamilton_check, noether_flux, observed_order,
                    pullback_laws, symplecticity_laws)
from .covariant import (cartesian, covariant_noether_flux, covariant_structural_check,
                        get_metric, interior_mask, radial_fields, radial_initial_state,
                        simulate_radial)
from .dynamics import initial_state, max_signal_speed, simulate
from .errors import ConfigError, UsageError
from .grid import Grid1D, RadialGrid
from .history import FieldHistory
from .systems import get_system

# interior band used for radial runs, as fractions of [r_min, r_max]
RADIAL_BAND = (0.15, 0.85)


# ------------------------------------------------------------------ runs

def simulate_config(cfg: dict, n_cells: int) -> FieldHistory:
    """One simulation at ``n_cells`` following the time and IC settings of ``cfg``."""
    params = cfgmod.eos_params(cfg)
    t = cfg["time"]
    if cfg["metric"] == "cylindrical-slab":
        if cfg["system"] != "gas1d":
            raise ConfigError("the cylindrical-slab metric is only wired up for gas1d")
        g = cfg["grid"]
        grid = RadialGrid(n_cells, g["r_min"], g["r_max"])
        ic = dict(cfg["ic"]["params"])
        if cfg["ic"]["family"] != "acoustic" or ic:
            raise ConfigError("radial runs use the built-in acoustic bump without parameters")
        hist = simulate_radial(grid, radial_initial_state(grid), t["t_end"], params, t["cfl"])
        hist.meta.update(config=cfg)
        return hist
    grid = Grid1D(n_cells, cfg["grid"]["length"])
    state = initial_state(cfg["system"], cfg["ic"]["family"], grid, params, **cfg["ic"]["params"])
    meta = {"magnetic_energy": cfg["magnetic_energy"], "config": cfg}
    if t["n_steps"] is not None:
        dt = t["dt"] if t["dt"] is not None else t["cfl"] * grid.dx / max_signal_speed(state)
        return simulate(state, t["n_steps"] * dt, dt=dt, magnetic_energy=cfg["magnetic_energy"], meta=meta)
    return simulate(state, t["t_end"], t["cfl"], t["dt"], t["dt_out"],
                    magnetic_energy=cfg["magnetic_energy"], meta=meta)


# ------------------------------------------------------------------ laws

def _radial_mask(fields, r):
    lo, hi = r[0], r[-1]
    span = hi - lo
    return interior_mask(fields, r, lo + RADIAL_BAND[0] * span, lo + RADIAL_BAND[1] * span)


def evaluate_laws(history: FieldHistory, cfg: dict) -> tuple:
    """Evaluate ``cfg["laws"]`` on a stored history.

    Returns ``(reports, scalars, skipped)``: named ConservationReports,
    named scalar diagnostics and ``{law: reason}`` for laws that do not
    apply to this history.
    """
    params = cfgmod.eos_params(cfg)
    laws = cfg["laws"]
    reports, scalars, skipped = {}, {}, {}
    if isinstance(history.grid, RadialGrid):
        fields = radial_fields(history, params)
        r = history.grid.x
        mask = _radial_mask(fields, r)
        metric = get_metric("cylindrical-slab")
        for law in laws:
            if law == "covariant_noether":
                reports["covariant_noether[0]"] = covariant_noether_flux(fields.system, metric, fields, r, 0, mask)
            elif law == "covariant_structural":
                for corr in (False, True):
                    rep = covariant_structural_check(fields.system, metric, fields, r, corrected=corr, mask=mask)
                    reports[rep.law_name] = rep
            else:
                skipped[law] = "flat-space law; not defined on a curved radial history"
        return reports, scalars, skipped

    if not history.system:
        raise UsageError("history does not record its system")
    system = get_system(history.system, params)
    needs_flat = {"pullback", "energy", "momentum", "symplecticity", "noether",
                  "covariant_noether", "covariant_structural"}
    if np.any(history.slope) and needs_flat & set(laws):
        for law in sorted(needs_flat & set(laws)):
            skipped[law] = "needs a history with zero mean potential gradient"
        laws = [l for l in laws if l not in needs_flat]
    fields = fields_from_history(system, history) if laws else None
    if {"pullback", "energy", "momentum"} & set(laws):
        pb = pullback_laws(system, fields)
        for name, rep in pb.items():
            base = name.split("[")[0]
            if base in laws:
                reports[name] = rep
        for law in ("energy", "momentum"):
            if law in laws and not any(n.split("[")[0] == law for n in pb):
                skipped[law] = f"no reduced {law} law for {system.name}"
    if "symplecticity" in laws:
        # pairs along y or z are exact zeros on 1.5D runs; they stay in the report
        gap = 0.0
        for rep in symplecticity_laws(system, fields).values():
            reports[rep.law_name] = rep
            gap = max(gap, rep.extra["representation_gap"])
        scalars["representation_gap"] = gap
    if "noether" in laws:
        worst = 0.0
        for beta in (0, 1):
            rep = noether_flux(system, fields, beta)
            reports[rep.law_name] = rep
            worst = max(worst, rep.extra["max_abs_vs_pullback"] / max(1.0, rep.extra["scale"]))
        scalars["noether_vs_pullback"] = worst
    if "hamilton" in laws:
        try:
            scalars["hamilton"] = hamilton_check(history, params)["max"]
        except UsageError as exc:
            skipped["hamilton"] = str(exc)
    metric = cartesian(2)
    x = history.grid.x
    if "covariant_noether" in laws:
        reports["covariant_noether[0]"] = covariant_noether_flux(system, metric, fields, x, 0)
    if "covariant_structural" in laws:
        reports["covariant_structural[0,1]"] = covariant_structural_check(system, metric, fields, x)
    return reports, scalars, skipped


def _check(name, value, tol, kind="max"):
    ok = bool(np.isfinite(value) and (value <= tol if kind == "max" else value >= tol))
    return {"name": name, "value": value, "tolerance": tol, "kind": kind, "pass": ok}


def run_checks(cfg, reports, scalars) -> list:
    tol = cfg["tolerances"]
    checks = []
    if "representation_gap" in scalars:
        checks.append(_check("representation_gap", scalars["representation_gap"], tol["representation"]))
    if "noether_vs_pullback" in scalars:
        checks.append(_check("noether_vs_pullback", scalars["noether_vs_pullback"], tol["noether"]))
    if cfg["ic"]["family"] == "uniform":
        for name, rep in reports.items():
            checks.append(_check(f"{name}.residual_linf", rep.residual_linf, tol["residual"]))
        if "hamilton" in scalars:
            checks.append(_check("hamilton", scalars["hamilton"], tol["residual"]))
    return checks


def write_reports(reports: dict, directory: str, x) -> None:
    """One JSON summary and one CSV of pointwise residuals per law."""
    os.makedirs(directory, exist_ok=True)
    for name, rep in reports.items():
        stem = name.replace("[", "_").replace("]", "").replace(",", "_").replace("+", "_")
        serialize.dump(rep.summary(), os.path.join(directory, stem + ".json"))
        nt = rep.residual.shape[0]
        tt = np.repeat(np.arange(nt), x.size)
        flux = np.asarray(rep.flux)
        fx = flux[0] if flux.ndim == 3 else flux
        table = np.column_stack([np.tile(x, nt), tt, rep.density.ravel(), fx.ravel(), rep.residual.ravel()])
        np.savetxt(os.path.join(directory, stem + ".csv"), table, delimiter=",", fmt="%.17g",
                   header="x,time_index,density,flux_x,residual", comments="")


def run(cfg: dict, out: str) -> dict:
    """Simulate at ``grid.n_cells``, store the history, evaluate laws, write reports."""
    hist = simulate_config(cfg, cfg["grid"]["n_cells"])
    hist.save(os.path.join(out, "history"))
    reports, scalars, skipped = evaluate_laws(hist, cfg)
    write_reports(reports, os.path.join(out, "reports"), hist.grid.x)
    checks = run_checks(cfg, reports, scalars)
    summary = {
        "command": "run",
        "config": cfg,
        "n_snapshots": hist.n_times,
        "dt": hist.meta.get("dt"),
        "laws": {n: r.summary() for n, r in reports.items()},
        "scalars": scalars,
        "skipped": skipped,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }
    serialize.dump(summary, os.path.join(out, "summary.json"))
    return summary


# ------------------------------------------------------------------ sweeps

def _level(cfg, n):
    hist = simulate_config(cfg, n)
    reports, scalars, skipped = evaluate_laws(hist, cfg)
    return {"n": n, "dx": hist.grid.dx, "dt": hist.meta.get("dt"),
            "laws": {k: {"residual_l2": r.residual_l2, "residual_linf": r.residual_linf}
                     for k, r in reports.items()},
            "scalars": scalars, "skipped": skipped}


def sweep(cfg: dict) -> dict:
    """Refinement study over ``cfg["levels"]``; orders and pass/fail per law."""
    levels = sorted(cfg["levels"])
    if len(levels) < 3:
        raise ConfigError("a sweep needs at least three levels")
    if cfg["workers"] > 1:
        with ThreadPoolExecutor(cfg["workers"]) as pool:
            rows = list(pool.map(lambda n: _level(cfg, n), levels))
    else:
        rows = [_level(cfg, n) for n in levels]
    tol = cfg["tolerances"]
    dxs = [row["dx"] for row in rows]
    checks, orders = [], {}
    for name in rows[0]["laws"]:
        errs = [row["laws"][name]["residual_l2"] for row in rows]
        if max(errs) <= tol["residual"]:
            orders[name] = None
            checks.append(_check(f"{name}.residual_l2", max(errs), tol["residual"]))
            continue
        orders[name] = observed_order(dxs, errs)
        checks.append(_check(f"{name}.order", orders[name], tol["min_order"], kind="min"))
    if "hamilton" in rows[0]["scalars"]:
        errs = [row["scalars"]["hamilton"] for row in rows]
        if max(errs) <= tol["residual"]:
            orders["hamilton"] = None
            checks.append(_check("hamilton.max", max(errs), tol["residual"]))
        else:
            orders["hamilton"] = observed_order(dxs, errs)
            checks.append(_check("hamilton.order", orders["hamilton"], tol["min_order"], kind="min"))
    for key, tkey in (("representation_gap", "representation"), ("noether_vs_pullback", "noether")):
        if key in rows[0]["scalars"]:
            checks.append(_check(key, max(row["scalars"][key] for row in rows), tol[tkey]))
    return {
        "command": "sweep",
        "config": cfg,
        "levels": rows,
        "orders": orders,
        "checks": checks,
        "pass": all(c["pass"] for c in checks),
    }


def hamilton_sweep(cfg: dict) -> dict:
    cfg = dict(cfg, laws=["hamilton"])
    if cfg["system"] not in ("gas1d", "mhd-b"):
        raise ConfigError("the Hamilton check supports gas1d and mhd-b")
    out = sweep(cfg)
    out["command"] = "hamilton"
    return out
