"""Run configuration: one JSON document, validated against fixed defaults.

Every key has a default (see ``DEFAULTS``); unknown keys at any level are
rejected.  ``resolve`` merges a user document over the defaults and returns
a plain dict, which is what gets echoed into every summary.

    {
      "system": "gas1d",                  # gas1d | mhd-b | mhd-a
      "eos": {"gamma": 5/3, "c_v": 1, "S_ref": 0, "mu0": 1},
      "grid": {"n_cells": 128, "length": 1.0, "r_min": 1.0, "r_max": 3.0},
      "time": {"cfl": 0.4, "dt": null, "t_end": 0.2, "dt_out": null, "n_steps": null},
      "ic": {"family": "acoustic", "params": {}},
      "metric": "cartesian",              # cartesian | cylindrical-slab
      "laws": ["pullback", "energy", "momentum", "symplecticity", "noether"],
      "levels": [64, 128, 256],
      "magnetic_energy": "flux",          # flux | potential
      "tolerances": {...},
      "adjoint": {"n": 16, "trials": 100},
      "workers": 1,
      "out": null,
      "seed": 0
    }
"""

from __future__ import annotations

import copy
import json
import os
from typing import Optional

from .covariant import METRICS
from .dynamics import IC_DEFAULTS, IC_FAMILIES, MAGNETIC_ENERGY
from .eos import EosParams
from .errors import ConfigError
from .systems import SYSTEMS

LAWS = ("pullback", "energy", "momentum", "symplecticity", "noether", "hamilton",
        "covariant_noether", "covariant_structural")

DEFAULTS = {
    "system": "gas1d",
    "eos": {"gamma": 5.0 / 3.0, "c_v": 1.0, "S_ref": 0.0, "mu0": 1.0},
    "grid": {"n_cells": 128, "length": 1.0, "r_min": 1.0, "r_max": 3.0},
    "time": {"cfl": 0.4, "dt": None, "t_end": 0.2, "dt_out": None, "n_steps": None},
    "ic": {"family": "acoustic", "params": {}},
    "metric": "cartesian",
    "laws": ["pullback", "energy", "momentum", "symplecticity", "noether"],
    "levels": [64, 128, 256],
    "magnetic_energy": "flux",
    "tolerances": {
        "min_order": 1.8,
        "residual": 1e-12,
        "representation": 1e-12,
        "noether": 1e-13,
        "adjoint": 1e-12,
    },
    "adjoint": {"n": 16, "trials": 100},
    "workers": 1,
    "out": None,
    "seed": 0,
}

# sub-dicts whose keys are fixed; "ic.params" is checked against the family instead
_FIXED = ("eos", "grid", "time", "tolerances", "adjoint")


def _merge(base: dict, over: dict, path: str) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if key in _FIXED and path == "":
            if not isinstance(val, dict):
                raise ConfigError(f"{where!r} must be an object")
            out[key] = _merge(base[key], val, where + ".")
        elif key == "ic" and path == "":
            if not isinstance(val, dict):
                raise ConfigError("'ic' must be an object")
            extra = set(val) - {"family", "params"}
            if extra:
                raise ConfigError(f"unknown config key(s) in 'ic': {sorted(extra)}")
            out["ic"] = {"family": val.get("family", base["ic"]["family"]),
                         "params": dict(val.get("params") or {})}
        else:
            out[key] = copy.deepcopy(val)
    return out


def _positive(value, name, integer=False, allow_none=False):
    if value is None and allow_none:
        return
    kind = int if integer else (int, float)
    if isinstance(value, bool) or not isinstance(value, kind) or not value > 0:
        raise ConfigError(f"{name} must be a positive {'integer' if integer else 'number'}")


def validate(cfg: dict) -> dict:
    """Check types and ranges of a merged config; returns it unchanged."""
    if cfg["system"] not in SYSTEMS:
        raise ConfigError(f"unknown system {cfg['system']!r}; choose from {sorted(SYSTEMS)}")
    try:
        EosParams(**cfg["eos"])
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    g = cfg["grid"]
    _positive(g["n_cells"], "grid.n_cells", integer=True)
    _positive(g["length"], "grid.length")
    if not (isinstance(g["r_min"], (int, float)) and g["r_min"] > 0 and g["r_max"] > g["r_min"]):
        raise ConfigError("grid needs 0 < r_min < r_max")
    t = cfg["time"]
    _positive(t["cfl"], "time.cfl")
    _positive(t["t_end"], "time.t_end")
    _positive(t["dt"], "time.dt", allow_none=True)
    _positive(t["dt_out"], "time.dt_out", allow_none=True)
    _positive(t["n_steps"], "time.n_steps", integer=True, allow_none=True)
    fam = cfg["ic"]["family"]
    if fam not in IC_FAMILIES:
        raise ConfigError(f"unknown initial-condition family {fam!r}; choose from {IC_FAMILIES}")
    bad = set(cfg["ic"]["params"]) - set(IC_DEFAULTS[fam])
    if bad:
        raise ConfigError(f"unknown parameters for {fam!r}: {sorted(bad)}")
    if cfg["metric"] not in METRICS:
        raise ConfigError(f"unknown metric {cfg['metric']!r}; choose from {sorted(METRICS)}")
    if not isinstance(cfg["laws"], list) or any(l not in LAWS for l in cfg["laws"]):
        raise ConfigError(f"laws must be a list drawn from {LAWS}")
    lv = cfg["levels"]
    if not isinstance(lv, list) or not lv:
        raise ConfigError("levels must be a non-empty list of cell counts")
    for n in lv:
        _positive(n, "levels[*]", integer=True)
    if cfg["magnetic_energy"] not in MAGNETIC_ENERGY:
        raise ConfigError(f"magnetic_energy must be one of {MAGNETIC_ENERGY}")
    for k, v in cfg["tolerances"].items():
        _positive(v, f"tolerances.{k}")
    _positive(cfg["adjoint"]["n"], "adjoint.n", integer=True)
    _positive(cfg["adjoint"]["trials"], "adjoint.trials", integer=True)
    _positive(cfg["workers"], "workers", integer=True)
    if cfg["out"] is not None and not isinstance(cfg["out"], str):
        raise ConfigError("out must be a string path")
    if isinstance(cfg["seed"], bool) or not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed must be a non-negative integer")
    return cfg


def resolve(user: Optional[dict] = None, overrides: Optional[dict] = None) -> dict:
    """Defaults, then the config document, then flag overrides; validated."""
    cfg = _merge(DEFAULTS, user or {}, "")
    if overrides:
        cfg = _merge(cfg, overrides, "")
    return validate(cfg)


def load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def eos_params(cfg: dict) -> EosParams:
    return EosParams(**cfg["eos"])


def output_dir(cfg: dict, default: Optional[str] = "msymp_out") -> Optional[str]:
    """``out`` from config or flag, else ``$MSYMP_OUT``, else ``default``."""
    return cfg.get("out") or os.environ.get("MSYMP_OUT") or default
