"""Clebsch-variable evolution on a periodic 1D grid (1.5D for MHD).

All spatial operators are restricted to ``d/dx``; vectors keep three
components.  Time stepping is classical RK4.  Within every stage the
velocity is rebuilt from the Clebsch potentials, so the velocity slot of
the state is diagnostic only.

State arrays are laid out component first and space last, ``z[i, ..., x]``;
any axes in between are treated as a batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .eos import EosParams, eos_eval, sound_speed
from .errors import ConfigError, DomainError, SolverAbort, UsageError
from .grid import Grid1D, ddx
from .history import FieldHistory
from .systems import (BETA, LAM, MAG, MU, PHI, POT, RHO, S_, U,
                      GAS1D_VARS, MHDA_VARS, MHDB_VARS)

VARNAMES = {"gas1d": GAS1D_VARS, "mhd-b": MHDB_VARS, "mhd-a": MHDA_VARS}
MAGNETIC_ENERGY = ("flux", "potential")


@dataclass
class State:
    """Snapshot of a simulation.

    ``slope[i]`` is the mean gradient of component ``i``; only the velocity
    potential ``phi`` may carry one, which allows a net flow on a periodic
    domain.  ``z[phi]`` stores the periodic remainder.
    """

    system: str
    grid: Grid1D
    z: np.ndarray
    t: float = 0.0
    params: EosParams = field(default_factory=EosParams)
    slope: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.system not in VARNAMES:
            raise UsageError(f"unknown system {self.system!r}")
        n = len(VARNAMES[self.system])
        self.z = np.asarray(self.z, dtype=float)
        if self.z.shape != (n, self.grid.n_cells):
            raise UsageError(f"state must have shape {(n, self.grid.n_cells)}, got {self.z.shape}")
        if self.slope is None:
            self.slope = np.zeros(n)
        self.slope = np.asarray(self.slope, dtype=float)
        phi = n - 1
        if np.any(np.delete(self.slope, phi) != 0):
            raise ConfigError("only phi may carry a mean gradient")

    @property
    def varnames(self):
        return VARNAMES[self.system]

    def copy(self) -> "State":
        return replace(self, z=self.z.copy(), slope=self.slope.copy())


def _bslope(slope, z):
    return np.asarray(slope).reshape((-1,) + (1,) * (np.ndim(z) - 1))


def _cross(a, b):
    return np.stack([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def _curl(v, grid):
    """``curl v`` when only x-derivatives are nonzero."""
    return np.stack([np.zeros_like(v[0]), -ddx(v[2], grid), ddx(v[1], grid)])


def _grad(f, grid):
    return np.stack([ddx(f, grid), np.zeros_like(f), np.zeros_like(f)])


def _positive_density(rho):
    if np.any(np.real(rho) <= 0):
        raise DomainError("density must be positive")


# ------------------------------------------------------ velocity reconstruction

def reconstruct_u_gas1d(rho, S, beta, phi, grid, phi_slope=0.0):
    """``u = phi_x - (beta/rho) S_x``."""
    _positive_density(rho)
    return ddx(phi, grid, phi_slope) - beta / rho * ddx(S, grid)


def _scalar_momentum(z, grid, phi_slope):
    return (z[RHO] * ddx(z[PHI], grid, phi_slope) - z[BETA] * ddx(z[S_], grid)
            - z[LAM] * ddx(z[MU], grid))


def reconstruct_u_mhdB(z, grid, phi_slope=0.0):
    """Velocity from the flux-form Clebsch potentials.

    ``rho u = rho grad phi - beta grad S - lam grad mu - (curl Gamma) x B - Gamma div B``.
    """
    z = np.asarray(z)
    _positive_density(z[RHO])
    B, G = z[MAG], z[POT]
    m = -_cross(_curl(G, grid), B) - G * ddx(B[0], grid)
    m[0] = m[0] + _scalar_momentum(z, grid, phi_slope)
    return m / z[RHO]


def reconstruct_u_mhdA(Z, grid, phi_slope=0.0):
    """Velocity from the vector-potential Clebsch variables.

    ``rho u = rho grad phi - beta grad S - lam grad mu - gamma x curl A + (div gamma) A``.
    """
    Z = np.asarray(Z)
    _positive_density(Z[RHO])
    A, g = Z[MAG], Z[POT]
    m = -_cross(g, _curl(A, grid)) + ddx(g[0], grid) * A
    m[0] = m[0] + _scalar_momentum(Z, grid, phi_slope)
    return m / Z[RHO]


def reconstruct_u(system, z, grid, slope=None):
    """Velocity for any built-in system, shape ``(3, ...)`` for MHD."""
    z = np.asarray(z)
    s = 0.0 if slope is None else slope[-1]
    if system == "gas1d":
        return reconstruct_u_gas1d(z[1], z[2], z[3], z[4], grid, s)
    if system == "mhd-b":
        return reconstruct_u_mhdB(z, grid, s)
    if system == "mhd-a":
        return reconstruct_u_mhdA(z, grid, s)
    raise UsageError(f"unknown system {system!r}")


# ------------------------------------------------------------ right-hand sides

def rhs_gas1d(z, grid, params, slope=None):
    """Time derivative of (u, rho, S, beta, phi); the u slot is left at 0."""
    s = 0.0 if slope is None else slope[4]
    u_, rho, S, beta, phi = z
    u = reconstruct_u_gas1d(rho, S, beta, phi, grid, s)
    _, _, h, T = eos_eval(params, rho, S)
    out = np.zeros_like(z)
    out[1] = -ddx(rho * u, grid)
    out[2] = -u * ddx(S, grid)
    out[3] = -ddx(beta * u, grid) - rho * T
    out[4] = 0.5 * u**2 - h - u * ddx(phi, grid, s)
    return out


def _scalar_rhs(z, u, grid, params, phi_slope, out):
    ux = u[0]
    _, _, h, T = eos_eval(params, z[RHO], z[S_])
    out[RHO] = -ddx(z[RHO] * ux, grid)
    out[S_] = -ux * ddx(z[S_], grid)
    out[MU] = -ux * ddx(z[MU], grid)
    out[LAM] = -ddx(z[LAM] * ux, grid)
    out[BETA] = -ddx(z[BETA] * ux, grid) - z[RHO] * T
    out[PHI] = 0.5 * np.sum(u**2, axis=0) - h - ux * ddx(z[PHI], grid, phi_slope)


def rhs_mhdB(z, grid, params, slope=None, magnetic_energy="flux"):
    """Flux-form Clebsch MHD.

    ``magnetic_energy="flux"`` uses ``H_B = |B|^2/2mu0`` (physical MHD).
    ``"potential"`` uses ``|curl Gamma|^2/2mu0`` instead: Gamma loses its
    ``-B/mu0`` forcing and B gains ``curl curl Gamma / mu0``.  Only the
    second choice is the exact image of the vector-potential system under
    ``Gamma = -A, B = gamma``.
    """
    s = 0.0 if slope is None else slope[PHI]
    u = reconstruct_u_mhdB(z, grid, s)
    B, G = z[MAG], z[POT]
    cG = _curl(G, grid)
    divB = ddx(B[0], grid)
    out = np.zeros_like(z)
    _scalar_rhs(z, u, grid, params, s, out)
    out[MAG] = _curl(_cross(u, B), grid) - u * divB
    out[POT] = _cross(u, cG) - _grad(np.sum(G * u, axis=0), grid)
    if magnetic_energy == "flux":
        out[POT] -= B / params.mu0
    elif magnetic_energy == "potential":
        out[MAG] += _curl(cG, grid) / params.mu0
    else:
        raise ConfigError(f"magnetic_energy must be one of {MAGNETIC_ENERGY}")
    return out


def rhs_mhdA(Z, grid, params, slope=None):
    """Advected vector-potential Clebsch MHD; ``J = curl curl A / mu0``."""
    s = 0.0 if slope is None else slope[PHI]
    u = reconstruct_u_mhdA(Z, grid, s)
    A, g = Z[MAG], Z[POT]
    cA = _curl(A, grid)
    J = _curl(cA, grid) / params.mu0
    out = np.zeros_like(Z)
    _scalar_rhs(Z, u, grid, params, s, out)
    out[MAG] = _cross(u, cA) - _grad(np.sum(u * A, axis=0), grid)
    out[POT] = _curl(_cross(u, g), grid) - u * ddx(g[0], grid) - J
    return out


def _rhs(state: State, magnetic_energy="flux"):
    if state.system == "gas1d":
        return lambda z: rhs_gas1d(z, state.grid, state.params, state.slope)
    if state.system == "mhd-b":
        return lambda z: rhs_mhdB(z, state.grid, state.params, state.slope, magnetic_energy)
    return lambda z: rhs_mhdA(z, state.grid, state.params, state.slope)


def _rk4(f, z, dt):
    k1 = f(z)
    k2 = f(z + 0.5 * dt * k1)
    k3 = f(z + 0.5 * dt * k2)
    k4 = f(z + dt * k3)
    return z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _finish(state: State, z, dt) -> State:
    new = State(state.system, state.grid, z, state.t + dt, state.params, state.slope.copy())
    u_rows = 0 if state.system == "gas1d" else U
    new.z[u_rows] = reconstruct_u(state.system, z, state.grid, state.slope)
    return new


def _guard(state: State, z, dt):
    rho = z[1] if state.system == "gas1d" else z[RHO]
    if not np.all(np.isfinite(z)) or np.any(rho <= 0):
        raise SolverAbort(f"non-finite value or non-positive density at t = {state.t + dt:.6g}",
                          t=state.t, snapshot=state.copy())


def step_gas1d(state: State, dt: float) -> State:
    if state.system != "gas1d":
        raise UsageError("step_gas1d needs a gas1d state")
    try:
        z = _rk4(_rhs(state), state.z, dt)
    except DomainError as exc:
        raise SolverAbort(str(exc), t=state.t, snapshot=state.copy()) from exc
    _guard(state, z, dt)
    return _finish(state, z, dt)


def step_mhd(state: State, dt: float, formulation: str = "B",
             magnetic_energy: str = "flux") -> State:
    """One RK4 step of the B (flux) or A (vector potential) formulation."""
    want = {"B": "mhd-b", "A": "mhd-a"}.get(formulation)
    if want is None:
        raise UsageError("formulation must be 'B' or 'A'")
    if state.system != want:
        raise UsageError(f"formulation {formulation} needs a {want} state, got {state.system}")
    try:
        z = _rk4(_rhs(state, magnetic_energy), state.z, dt)
    except DomainError as exc:
        raise SolverAbort(str(exc), t=state.t, snapshot=state.copy()) from exc
    _guard(state, z, dt)
    return _finish(state, z, dt)


def step(state: State, dt: float, magnetic_energy: str = "flux") -> State:
    if state.system == "gas1d":
        return step_gas1d(state, dt)
    return step_mhd(state, dt, "B" if state.system == "mhd-b" else "A", magnetic_energy)


# ----------------------------------------------------------------- time loop

def max_signal_speed(state: State) -> float:
    """``max(|u| + c_s + v_A)`` over the grid."""
    z, p = state.z, state.params
    if state.system == "gas1d":
        return float(np.max(np.abs(z[0]) + sound_speed(p, z[1], z[2])))
    if state.system == "mhd-b":
        B = z[MAG]
    else:
        B = _curl(z[MAG], state.grid)
    speed = np.sqrt(np.sum(z[U] ** 2, axis=0)) + sound_speed(p, z[RHO], z[S_])
    speed = speed + np.sqrt(np.sum(B**2, axis=0) / (p.mu0 * z[RHO]))
    return float(np.max(speed))


def plan_steps(state: State, t_end: float, cfl: float = 0.4, dt: Optional[float] = None,
               dt_out: Optional[float] = None):
    """Return ``(dt, n_steps, stride)`` so that steps tile ``[0, t_end]`` exactly.

    ``dt`` defaults to the CFL bound at the initial state.  Snapshots are
    kept every ``stride`` steps, which is every step unless ``dt_out`` asks
    for something coarser.
    """
    if not t_end > 0:
        raise ConfigError("t_end must be positive")
    if dt is not None and not dt > 0:
        raise ConfigError("dt must be positive")
    if not cfl > 0:
        raise ConfigError("cfl must be positive")
    dt_max = dt if dt is not None else cfl * state.grid.dx / max_signal_speed(state)
    if dt_out is None:
        n = math.ceil(t_end / dt_max - 1e-12)
        return t_end / n, n, 1
    if not dt_out > 0:
        raise ConfigError("dt_out must be positive")
    n_out = round(t_end / dt_out)
    if n_out < 1 or abs(n_out * dt_out - t_end) > 1e-9 * t_end:
        raise ConfigError("t_end must be a whole multiple of dt_out")
    stride = math.ceil(dt_out / dt_max - 1e-12)
    return dt_out / stride, n_out * stride, stride


def simulate(state: State, t_end: float, cfl: float = 0.4, dt: Optional[float] = None,
             dt_out: Optional[float] = None, magnetic_energy: str = "flux",
             meta: Optional[dict] = None) -> FieldHistory:
    """Integrate to ``t_end`` and return the stored snapshots."""
    dt, n_steps, stride = plan_steps(state, t_end, cfl, dt, dt_out)
    snaps, times = [state.z.copy()], [state.t]
    cur = state
    for k in range(1, n_steps + 1):
        cur = step(cur, dt, magnetic_energy)
        if k % stride == 0:
            snaps.append(cur.z.copy())
            times.append(state.t + k * dt)
    return FieldHistory(grid=state.grid, times=np.array(times), data=np.stack(snaps),
                        varnames=state.varnames, slope=state.slope.copy(),
                        system=state.system, meta=dict(meta or {}, dt=dt))


# -------------------------------------------------------- initial conditions

IC_FAMILIES = ("uniform", "acoustic", "alfven")

IC_DEFAULTS = {
    "uniform": dict(rho0=1.0, S0=0.0, phi0=0.0, beta0=0.0, u0=0.0,
                    B0=(0.0, 0.0, 0.0), Gamma0=(0.0, 0.0, 0.0), lam0=0.0, mu_label0=0.0),
    "acoustic": dict(rho0=1.0, S0=0.0, amp=1e-2, s_amp=1e-2, phi_amp=1e-2, k=1,
                     B0=(0.0, 0.0, 0.0)),
    "alfven": dict(rho0=1.0, S0=0.0, B0=(1.0, 0.5, 0.0), amp=1e-2, rho_amp=1e-3, k=1),
}


def initial_state(system: str, family: str, grid: Grid1D, params: Optional[EosParams] = None,
                  **kw) -> State:
    """Build one of the built-in initial-condition families.

    ``uniform``   constant fields; ``u0`` becomes a mean gradient of phi.
    ``acoustic``  sinusoidal density, entropy and velocity-potential perturbations.
    ``alfven``    (MHD) uniform field ``B0`` plus a transverse sinusoidal
                  ``Gamma_y`` in the flux form, giving ``u_y ~ -B0_x Gamma_y'/rho``.
                  The vector-potential form uses the image ``A = -Gamma``, ``gamma = B``.
    """
    params = params or EosParams()
    if family not in IC_FAMILIES:
        raise ConfigError(f"unknown initial-condition family {family!r}; choose from {IC_FAMILIES}")
    unknown = set(kw) - set(IC_DEFAULTS[family])
    if unknown:
        raise ConfigError(f"unknown parameters for {family!r}: {sorted(unknown)}")
    p = dict(IC_DEFAULTS[family], **kw)
    if system not in VARNAMES:
        raise ConfigError(f"unknown system {system!r}")
    n = len(VARNAMES[system])
    x = grid.x
    wave = np.sin(2 * np.pi * p.get("k", 1) * x / grid.length)
    z = np.zeros((n, grid.n_cells))
    slope = np.zeros(n)
    if system == "gas1d":
        rho, S, beta, phi = 1, 2, 3, 4
    else:
        rho, S, beta, phi = RHO, S_, BETA, PHI

    if family == "uniform":
        z[rho], z[S], z[beta], z[phi] = p["rho0"], p["S0"], p["beta0"], p["phi0"]
        slope[phi] = p["u0"]
        if system != "gas1d":
            z[LAM], z[MU] = p["lam0"], p["mu_label0"]
            B0, G0 = np.asarray(p["B0"], float), np.asarray(p["Gamma0"], float)
            if system == "mhd-b":
                z[MAG], z[POT] = B0[:, None], G0[:, None]
            else:
                z[MAG], z[POT] = -G0[:, None], B0[:, None]
    elif family == "acoustic":
        cosw = np.cos(2 * np.pi * p["k"] * x / grid.length)
        z[rho] = p["rho0"] * (1 + p["amp"] * wave)
        z[S] = p["S0"] + p["s_amp"] * cosw
        z[phi] = p["phi_amp"] * wave
        if system != "gas1d":
            B0 = np.asarray(p["B0"], float)
            z[MAG if system == "mhd-b" else POT] = B0[:, None]
    else:
        if system == "gas1d":
            raise ConfigError("the alfven family needs an MHD system")
        B0 = np.asarray(p["B0"], float)
        z[rho] = p["rho0"] * (1 + p["rho_amp"] * wave)
        z[S] = p["S0"]
        G = np.zeros((3, grid.n_cells))
        G[1] = p["amp"] * wave
        if system == "mhd-b":
            z[MAG], z[POT] = B0[:, None], G
        else:
            z[MAG], z[POT] = -G, B0[:, None]
    if np.any(z[rho] <= 0):
        raise ConfigError("initial density must be positive")
    st = State(system, grid, z, 0.0, params, slope)
    u_rows = 0 if system == "gas1d" else U
    st.z[u_rows] = reconstruct_u(system, st.z, grid, slope)
    return st
