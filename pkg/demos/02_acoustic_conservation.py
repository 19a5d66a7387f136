"""
Conservation laws on an acoustic run
====================================

A small sinusoidal perturbation of a gas at rest, evolved in Clebsch
variables.  The discrete energy, momentum and symplecticity laws are not
exact, but their residuals shrink at second order as the grid is refined.
"""

import numpy as np

from msymp.claws import fields_from_history, hamilton_check, observed_order, pullback_laws, symplecticity_laws
from msymp.dynamics import initial_state, simulate
from msymp.eos import EosParams
from msymp.grid import Grid1D
from msymp.systems import get_system

system = get_system("gas1d")
rows = []
for n in (64, 128, 256):
    hist = simulate(initial_state("gas1d", "acoustic", Grid1D(n)), t_end=0.2, cfl=0.4)
    f = fields_from_history(system, hist)
    laws = pullback_laws(system, f)
    sym = symplecticity_laws(system, f, pairs=[(0, 1)])[(0, 1)]
    ham = hamilton_check(hist, EosParams())["max"]
    rows.append((hist.grid.dx, laws["energy"].residual_l2, laws["momentum[x]"].residual_l2,
                 sym.residual_l2, ham))
    print(f"n={n:4d}  energy {rows[-1][1]:.3e}  momentum {rows[-1][2]:.3e}  "
          f"symplecticity {rows[-1][3]:.3e}  hamilton {ham:.3e}")

rows = np.array(rows)
for k, name in enumerate(("energy", "momentum", "symplecticity", "hamilton"), start=1):
    print(f"{name:14s} order {observed_order(rows[:, 0], rows[:, k]):.2f}")
