"""Command line: ``msymp {run,sweep,laws,matrices,adjoint,hamilton}``.

Exit codes: 0 success, 2 configuration or usage error, 3 solver abort,
4 an acceptance tolerance failed (sweep, hamilton and adjoint).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import config as cfgmod
from . import serialize
from .adjointb import run_trials
from .errors import ConfigError, DomainError, SolverAbort, UsageError
from .exterior import check_closure, structure_matrices
from .history import FieldHistory
from .printed import PRINTED, fixture_diff
from .runner import evaluate_laws, hamilton_sweep, run, run_checks, sweep, write_reports
from .systems import SYSTEMS, get_system

EXIT_OK, EXIT_CONFIG, EXIT_ABORT, EXIT_TOLERANCE = 0, 2, 3, 4


def _csv(kind):
    def parse(text):
        try:
            return [kind(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated {kind.__name__} values") from None
    return parse


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config document")
    common.add_argument("--out", help="output directory (fallback: $MSYMP_OUT)")
    common.add_argument("--seed", type=int)
    common.add_argument("--system", choices=sorted(SYSTEMS))

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--n-cells", type=int)
    sim.add_argument("--levels", type=_csv(int))
    sim.add_argument("--t-end", type=float)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--cfl", type=float)
    sim.add_argument("--n-steps", type=int)
    sim.add_argument("--family")
    sim.add_argument("--metric")
    sim.add_argument("--laws", type=_csv(str))
    sim.add_argument("--workers", type=int)

    p = argparse.ArgumentParser(prog="msymp", description="Multi-symplectic fluid and MHD checks.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common, sim], help="simulate once and evaluate laws")
    sub.add_parser("sweep", parents=[common, sim], help="refinement study with order estimates")
    sub.add_parser("hamilton", parents=[common, sim], help="Hamilton-equation check over levels")
    lw = sub.add_parser("laws", parents=[common, sim], help="evaluate laws on a stored history")
    lw.add_argument("--history", required=True, help="directory written by `run`")
    mx = sub.add_parser("matrices", parents=[common], help="derived K^alpha and fixture diffs")
    mx.add_argument("--state", type=_csv(float), help="comma-separated state vector")
    ad = sub.add_parser("adjoint", parents=[common], help="random trials of the V_B adjoint identity")
    ad.add_argument("--n", type=int)
    ad.add_argument("--trials", type=int)
    return p


def _overrides(args) -> dict:
    o = {}
    pick = lambda name: getattr(args, name, None)      # noqa: E731
    for key in ("system", "seed", "out", "metric", "laws", "levels", "workers"):
        if pick(key) is not None:
            o[key] = pick(key)
    if pick("n_cells") is not None:
        o["grid"] = {"n_cells": args.n_cells}
    t = {k: pick(a) for k, a in (("t_end", "t_end"), ("dt", "dt"), ("cfl", "cfl"), ("n_steps", "n_steps"))
         if pick(a) is not None}
    if t:
        o["time"] = t
    if pick("family") is not None:
        o["ic"] = {"family": args.family}
    adj = {k: pick(k) for k in ("n", "trials") if pick(k) is not None}
    if adj:
        o["adjoint"] = adj
    return o


def _resolve(args) -> dict:
    user = cfgmod.load(args.config) if args.config else {}
    return cfgmod.resolve(user, _overrides(args))


def _emit(obj, out=None, name="summary.json"):
    print(serialize.dumps(obj))
    if out:
        os.makedirs(out, exist_ok=True)
        serialize.dump(obj, os.path.join(out, name))


def _cmd_run(cfg):
    out = cfgmod.output_dir(cfg)
    summary = run(cfg, out)
    print(serialize.dumps({k: summary[k] for k in ("checks", "pass")}))
    return EXIT_OK


def _cmd_sweep(cfg, fn=sweep):
    summary = fn(cfg)
    _emit(summary, cfgmod.output_dir(cfg))
    return EXIT_OK if summary["pass"] else EXIT_TOLERANCE


def _cmd_laws(cfg, directory):
    hist = FieldHistory.load(directory)
    reports, scalars, skipped = evaluate_laws(hist, cfg)
    out = cfgmod.output_dir(cfg)
    write_reports(reports, os.path.join(out, "reports"), hist.grid.x)
    checks = run_checks(cfg, reports, scalars)
    summary = {"command": "laws", "history": directory, "config": cfg,
               "laws": {n: r.summary() for n, r in reports.items()},
               "scalars": scalars, "skipped": skipped, "checks": checks,
               "pass": all(c["pass"] for c in checks)}
    _emit(summary, out)
    return EXIT_OK


def _random_state(system, rng):
    z = rng.normal(size=system.n_dep)
    z[system.index("rho")] = rng.uniform(0.5, 2.0)
    return z


def _cmd_matrices(cfg, state):
    system = get_system(cfg["system"], cfgmod.eos_params(cfg))
    if state is None:
        z = _random_state(system, np.random.default_rng(cfg["seed"]))
    else:
        z = np.asarray(state, float)
        if z.size != system.n_dep:
            raise UsageError(f"{system.name} states have {system.n_dep} components, got {z.size}")
    K = structure_matrices(system, z)
    out = {
        "system": system.name,
        "varnames": list(system.varnames),
        "state": z,
        "K": K,
        "skew_max": float(np.max(np.abs(K + np.swapaxes(K, 1, 2)))),
        "closure_max": max(check_closure(system, a, z) for a in range(system.n_indep)),
        "fixture_diff": fixture_diff(system, z) if system.name in PRINTED else None,
    }
    _emit(out, cfg["out"] or os.environ.get("MSYMP_OUT"), "matrices.json")
    return EXIT_OK


def _cmd_adjoint(cfg):
    tol = cfg["tolerances"]["adjoint"]
    worst = 0.0
    for row in run_trials(cfg["adjoint"]["n"], cfg["adjoint"]["trials"], cfg["seed"]):
        row["pass"] = row["max_rel"] <= tol
        worst = max(worst, row["max_rel"])
        print(serialize.dumps(row, indent=None))
    ok = worst <= tol
    out = cfg["out"] or os.environ.get("MSYMP_OUT")
    if out:
        os.makedirs(out, exist_ok=True)
        serialize.dump({"command": "adjoint", "config": cfg, "max_rel": worst, "pass": ok},
                       os.path.join(out, "adjoint.json"))
    return EXIT_OK if ok else EXIT_TOLERANCE


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        if args.command == "run":
            return _cmd_run(cfg)
        if args.command == "sweep":
            return _cmd_sweep(cfg)
        if args.command == "hamilton":
            return _cmd_sweep(cfg, hamilton_sweep)
        if args.command == "laws":
            return _cmd_laws(cfg, args.history)
        if args.command == "matrices":
            return _cmd_matrices(cfg, args.state)
        return _cmd_adjoint(cfg)
    except SolverAbort as exc:
        print(f"msymp: solver abort at t={exc.t}: {exc}", file=sys.stderr)
        if exc.snapshot is not None:
            out = cfgmod.output_dir(cfg)
            os.makedirs(out, exist_ok=True)
            path = os.path.join(out, "abort_snapshot.csv")
            snap = exc.snapshot
            table = np.column_stack([snap.grid.x, snap.z.T])
            np.savetxt(path, table, delimiter=",", fmt="%.17g",
                       header=",".join(("x",) + tuple(snap.varnames)), comments="")
            print(f"msymp: last finite state written to {path}", file=sys.stderr)
        return EXIT_ABORT
    except (ConfigError, UsageError, DomainError) as exc:
        print(f"msymp: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
