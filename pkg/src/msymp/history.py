"""Stored simulation output and its on-disk format.

Layout on disk: ``snap_00000.csv`` ... (header row of names, ``x`` first,
then the dependent variables in system order) plus ``manifest.json``
holding the grid, the snapshot times, the variable map and a config echo.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import serialize
from .errors import UsageError
from .grid import Grid1D, RadialGrid, require_uniform

MANIFEST = "manifest.json"


@dataclass
class FieldHistory:
    grid: object
    times: np.ndarray
    data: np.ndarray            # (n_times, n_vars, n_points)
    varnames: tuple
    slope: Optional[np.ndarray] = None
    system: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.data = np.asarray(self.data, dtype=float)
        self.varnames = tuple(self.varnames)
        if self.data.ndim != 3 or self.data.shape[0] != self.times.size:
            raise UsageError("data must be (n_times, n_vars, n_points) matching times")
        if self.data.shape[1] != len(self.varnames):
            raise UsageError("varnames do not match the number of stored variables")
        if self.slope is None:
            self.slope = np.zeros(len(self.varnames))
        self.slope = np.asarray(self.slope, dtype=float)

    @property
    def varmap(self) -> dict:
        return {n: i for i, n in enumerate(self.varnames)}

    @property
    def n_times(self) -> int:
        return self.times.size

    @property
    def dt_out(self) -> float:
        return require_uniform(self.times)

    def var(self, name) -> np.ndarray:
        """Space-time array ``(n_times, n_points)`` of one variable."""
        try:
            return self.data[:, self.varmap[name]]
        except KeyError:
            raise UsageError(f"no variable {name!r}") from None

    def spacetime(self) -> np.ndarray:
        """Component-first view ``z[i, t, x]``."""
        return np.moveaxis(self.data, 1, 0)

    # ------------------------------------------------------------------ I/O

    def _grid_dict(self):
        if isinstance(self.grid, RadialGrid):
            return {"kind": "radial", "n_cells": self.grid.n_cells,
                    "r_min": self.grid.r_min, "r_max": self.grid.r_max}
        return {"kind": "periodic", "n_cells": self.grid.n_cells, "length": self.grid.length}

    def save(self, directory: str) -> str:
        os.makedirs(directory, exist_ok=True)
        x = self.grid.x
        header = ",".join(("x",) + self.varnames)
        files = []
        for k in range(self.n_times):
            name = f"snap_{k:05d}.csv"
            table = np.column_stack([x, self.data[k].T])
            np.savetxt(os.path.join(directory, name), table, delimiter=",", fmt="%.17g",
                       header=header, comments="")
            files.append(name)
        manifest = {
            "system": self.system,
            "grid": self._grid_dict(),
            "times": self.times,
            "varmap": self.varmap,
            "slope": self.slope,
            "snapshots": files,
            "config": self.meta,
        }
        serialize.dump(manifest, os.path.join(directory, MANIFEST))
        return directory

    @classmethod
    def load(cls, directory: str) -> "FieldHistory":
        path = os.path.join(directory, MANIFEST)
        if not os.path.exists(path):
            raise UsageError(f"no history manifest in {directory!r}")
        with open(path, encoding="utf-8") as fh:
            man = json.load(fh)
        files = man.get("snapshots") or []
        if not files:
            raise UsageError(f"history in {directory!r} holds no snapshots")
        g = man["grid"]
        if g.get("kind") == "radial":
            grid = RadialGrid(g["n_cells"], g["r_min"], g["r_max"])
        else:
            grid = Grid1D(g["n_cells"], g["length"])
        varnames = tuple(sorted(man["varmap"], key=man["varmap"].get))
        data = []
        for name in files:
            table = np.loadtxt(os.path.join(directory, name), delimiter=",", skiprows=1, ndmin=2)
            data.append(table[:, 1:].T)
        return cls(grid=grid, times=np.asarray(man["times"], float), data=np.stack(data),
                   varnames=varnames, slope=np.asarray(man.get("slope") or np.zeros(len(varnames))),
                   system=man.get("system", ""), meta=man.get("config") or {})
