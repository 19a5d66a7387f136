"""Multi-symplectic systems in curvilinear coordinates with a diagonal static metric.

With ``c_alpha = d_alpha ln sqrt(g)`` and one-form coefficients that do not
depend explicitly on the coordinates, the covariant system reads

    K^alpha_ij z^j_alpha - c_alpha L^alpha_i = dH/dz^i.

Only the explicit-coordinate part of the covariant divergence of ``L^alpha_i``
enters; the part coming through ``z`` is already inside ``K``.

For radial gas dynamics the one-form ``omega^1 = u(beta dS - rho dphi)``
(see :func:`msymp.systems.gas1d_system` with ``gauge="conservative"``) gives
the cylindrical continuity and beta equations.  Representatives differing by
an exact form have the same K but different covariant equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .claws import ConservationReport, SpaceTimeFields, lagrangian_field, norms, quadratic_forms
from .eos import EosParams, eos_eval, sound_speed
from .errors import ConfigError, DomainError, SolverAbort, UsageError
from .exterior import structure_matrices
from .grid import RadialGrid, centered, centered_edge
from .history import FieldHistory
from .systems import GAS1D_VARS, SystemDef, gas1d_system


@dataclass(frozen=True)
class MetricDef:
    """Diagonal metric on coordinates ``q = (t, q^1, ...)``.

    ``sqrt_g(q)`` is ``sqrt(prod g_aa)`` over the spatial entries.
    ``grad_log(q)[a]`` is ``d_a ln sqrt(g)`` and ``hess_log(q)[a][b]`` its
    derivative along ``q^b``.  Callables take a list of coordinate arrays.
    """

    name: str
    g_diag: Callable
    sqrt_g: Callable
    grad_log: Callable
    hess_log: Callable

    def check(self, q):
        sg = np.asarray(self.sqrt_g(q))
        if np.any(sg <= 0):
            raise DomainError(f"sqrt(g) vanishes on the grid for metric {self.name!r}")
        return sg


def cartesian(n_indep: int = 2) -> MetricDef:
    one = lambda q: np.ones_like(np.asarray(q[0], dtype=float))             # noqa: E731
    zero = lambda q: np.zeros_like(np.asarray(q[0], dtype=float))           # noqa: E731
    return MetricDef(
        "cartesian",
        lambda q: [one(q) for _ in range(n_indep - 1)],
        one,
        lambda q: [zero(q) for _ in range(n_indep)],
        lambda q: [[zero(q) for _ in range(n_indep)] for _ in range(n_indep)],
    )


def cylindrical_slab() -> MetricDef:
    """Coordinates ``(t, r)`` of a cylindrically symmetric flow: ``sqrt(g) = r``.

    The spatial metric is ``diag(1, r^2, 1)`` on ``(r, theta, z)``; fields
    depend on t and r only, so the theta and z columns are dropped.
    """
    def zero(q):
        return np.zeros_like(np.asarray(q[1], dtype=float))

    return MetricDef(
        "cylindrical-slab",
        lambda q: [np.ones_like(q[1]), np.asarray(q[1]) ** 2, np.ones_like(q[1])],
        lambda q: np.asarray(q[1], dtype=float),
        lambda q: [zero(q), 1.0 / np.asarray(q[1], dtype=float)],
        lambda q: [[zero(q), zero(q)], [zero(q), -1.0 / np.asarray(q[1], dtype=float) ** 2]],
    )


def user_diagonal(name: str, g_funcs: Sequence[Callable], step: float = 1e-5) -> MetricDef:
    """Diagonal metric from spatial ``g_aa(q)`` callables; derivatives by centered differences."""

    def sqrt_g(q):
        return np.sqrt(np.prod([np.asarray(g(q), dtype=float) for g in g_funcs], axis=0))

    def logsg(q):
        return np.log(sqrt_g(q))

    def shifted(q, a, h):
        q2 = [np.asarray(c, dtype=float) for c in q]
        q2[a] = q2[a] + h
        return q2

    def grad_log(q):
        return [(logsg(shifted(q, a, step)) - logsg(shifted(q, a, -step))) / (2 * step)
                for a in range(len(q))]

    def hess_log(q):
        return [[(grad_log(shifted(q, b, step))[a] - grad_log(shifted(q, b, -step))[a]) / (2 * step)
                 for b in range(len(q))] for a in range(len(q))]

    return MetricDef(name, lambda q: [g(q) for g in g_funcs], sqrt_g, grad_log, hess_log)


METRICS = {"cartesian": cartesian, "cylindrical-slab": cylindrical_slab}


def get_metric(name: str) -> MetricDef:
    try:
        return METRICS[name]()
    except KeyError:
        raise ConfigError(f"unknown metric {name!r}; choose from {sorted(METRICS)}") from None


# -------------------------------------------------------------- operations

def _deriv(f, h, axis, periodic):
    if periodic:
        return centered(f, h, axis, True)
    return centered_edge(f, h, axis)


def covariant_divergence(L_fields, metric: MetricDef, coords: Sequence[np.ndarray],
                         periodic: Optional[Sequence[bool]] = None):
    """``(1/sqrt g) d_alpha (sqrt g L^alpha)`` on a tensor-product grid.

    ``coords[alpha]`` is the 1D uniform coordinate array along grid axis
    ``alpha``; ``L_fields[alpha]`` has the full grid shape.  Non-periodic
    axes use one-sided second-order formulas at the ends.
    """
    L_fields = np.asarray(L_fields, dtype=float)
    n = len(coords)
    if L_fields.shape[0] != n or L_fields.shape[1:] != tuple(len(c) for c in coords):
        raise UsageError("L_fields must be (n_alpha, *grid) matching coords")
    periodic = [False] * n if periodic is None else list(periodic)
    q = np.meshgrid(*coords, indexing="ij")
    sg = metric.check(q)
    total = np.zeros(L_fields.shape[1:])
    for a in range(n):
        h = float(coords[a][1] - coords[a][0])
        total = total + _deriv(sg * L_fields[a], h, a, periodic[a])
    return total / sg


def covariant_residual(system: SystemDef, metric: MetricDef, q, z, dz, aux=None):
    """``K^alpha_ij z^j_alpha - c_alpha L^alpha_i - dH/dz^i`` at the points ``q``."""
    z, dz = np.asarray(z), np.asarray(dz)
    if dz.shape != (system.n_indep,) + z.shape:
        raise UsageError(f"dz must have shape {(system.n_indep,) + z.shape}")
    metric.check(q)
    K = structure_matrices(system, z)
    c = metric.grad_log(q)
    out = np.einsum("aij...,aj...->i...", K, dz) - system.grad_hamiltonian(z, aux)
    for w in system.oneforms:
        if np.any(c[w.alpha]):
            out = out - c[w.alpha] * w.coeffs(z)
    return out


def _coords(f: SpaceTimeFields, r):
    nt = f.z.shape[1]
    t = np.arange(nt) * f.spacing[0]
    return np.meshgrid(t, r, indexing="ij")


def _weighted_div(f: SpaceTimeFields, sg, density, flux_r):
    return (f.d(sg * density, 0) + f.d(sg * flux_r, 1)) / sg


def covariant_structural_check(system: SystemDef, metric: MetricDef, fields: SpaceTimeFields,
                               r, a: int = 0, b: int = 1, corrected: bool = False,
                               mask=None) -> ConservationReport:
    """Residual of ``(1/sqrt g) d_alpha(sqrt g F^alpha_ab)`` with ``F = z_a^T K z_b``.

    With ``corrected=True`` the source ``(d_b c_alpha) w^alpha_a - (d_a c_alpha) w^alpha_b``
    (``w^alpha_a = L^alpha_j z^j_a``) is subtracted; that is the form the
    on-shell identity takes once ``sqrt g`` varies in space.
    """
    q = _coords(fields, r)
    sg = metric.check(q)
    F = quadratic_forms(system, fields, a, b)
    res = _weighted_div(fields, sg, F[0], F[1])
    if corrected:
        dc = metric.hess_log(q)
        w = [[np.sum(om.coeffs(fields.z) * fields.dz[k], axis=0) for k in range(system.n_indep)]
             for om in system.oneforms]
        src = sum(dc[al][b] * w[al][a] - dc[al][a] * w[al][b] for al in range(system.n_indep))
        res = res - src
    l2, linf = norms(res, fields.spacing[0] * fields.spacing[1], mask)
    name = f"covariant_structural[{a},{b}]" + ("+source" if corrected else "")
    return ConservationReport(name, F[0], F[1:], res, l2, linf)


def covariant_noether_flux(system: SystemDef, metric: MetricDef, fields: SpaceTimeFields, r,
                           beta: int = 0, mask=None) -> ConservationReport:
    """Residual of ``(1/sqrt g) d_alpha {sqrt g (V^alpha L + Vhat^j L^alpha_j)}``.

    Translation along ``q^beta`` (``V = e_beta``, ``Vhat = -z_beta``, no
    divergence term).  It is a symmetry only when the metric does not depend
    on ``q^beta``; time translation always qualifies here.
    """
    fields.require_no_slope()
    q = _coords(fields, r)
    sg = metric.check(q)
    lag = lagrangian_field(fields)
    N = np.stack([(lag if w.alpha == beta else 0.0) - np.sum(fields.dz[beta] * w.coeffs(fields.z), axis=0)
                  for w in system.oneforms])
    res = _weighted_div(fields, sg, N[0], N[1])
    l2, linf = norms(res, fields.spacing[0] * fields.spacing[1], mask)
    return ConservationReport(f"covariant_noether[{beta}]", N[0], N[1:], res, l2, linf)


# ---------------------------------------------------------- radial solver

def _ddr(f, grid):
    return np.gradient(f, grid.dx, axis=-1, edge_order=2)


def rhs_radial_gas(z, grid: RadialGrid, params: EosParams):
    """Cylindrically symmetric gas dynamics in Clebsch variables (u slot left at 0)."""
    _, rho, S, beta, phi = z
    if np.any(rho <= 0):
        raise DomainError("density must be positive")
    r = grid.x
    u = _ddr(phi, grid) - beta / rho * _ddr(S, grid)
    _, _, h, T = eos_eval(params, rho, S)
    out = np.zeros_like(z)
    out[1] = -_ddr(r * rho * u, grid) / r
    out[2] = -u * _ddr(S, grid)
    out[3] = -_ddr(r * beta * u, grid) / r - rho * T
    out[4] = 0.5 * u**2 - h - u * _ddr(phi, grid)
    return out


def radial_velocity(z, grid):
    return _ddr(z[4], grid) - z[3] / z[1] * _ddr(z[2], grid)


def radial_initial_state(grid: RadialGrid, amp=0.05, phi_amp=0.02, s_amp=0.02,
                         center=None, width=0.35, rho0=1.0):
    """Gaussian bumps in density, entropy and phi, far from both ends of the grid."""
    r = grid.x
    c = 0.5 * (grid.r_min + grid.r_max) if center is None else center
    bump = np.exp(-(((r - c) / width) ** 2))
    z = np.zeros((5, r.size))
    z[1] = rho0 * (1 + amp * bump)
    z[2] = s_amp * bump
    z[4] = phi_amp * bump
    z[0] = radial_velocity(z, grid)
    return z


def simulate_radial(grid: RadialGrid, z0, t_end: float, params: Optional[EosParams] = None,
                    cfl: float = 0.4) -> FieldHistory:
    """RK4 with a fixed CFL step; every step is stored."""
    params = params or EosParams()
    z = np.array(z0, dtype=float)
    speed = float(np.max(np.abs(z[0]) + sound_speed(params, z[1], z[2])))
    n = math.ceil(t_end / (cfl * grid.dx / speed) - 1e-12)
    dt = t_end / n
    f = lambda y: rhs_radial_gas(y, grid, params)      # noqa: E731
    snaps = [z.copy()]
    for k in range(n):
        try:
            k1 = f(z)
            k2 = f(z + 0.5 * dt * k1)
            k3 = f(z + 0.5 * dt * k2)
            k4 = f(z + dt * k3)
        except DomainError as exc:
            raise SolverAbort(str(exc), t=k * dt) from exc
        z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)) or np.any(z[1] <= 0):
            raise SolverAbort("radial solve produced a non-finite or non-positive density",
                              t=(k + 1) * dt)
        z[0] = radial_velocity(z, grid)
        snaps.append(z.copy())
    return FieldHistory(grid=grid, times=np.arange(n + 1) * dt, data=np.stack(snaps),
                        varnames=GAS1D_VARS, system="gas1d", meta={"dt": dt, "metric": "cylindrical-slab"})


def radial_fields(history: FieldHistory, params: Optional[EosParams] = None) -> SpaceTimeFields:
    """Space-time fields of a radial run, tied to the conservative-gauge gas system."""
    system = gas1d_system(params or EosParams(), gauge="conservative")
    z = history.spacetime()
    dt = history.dt_out
    dz = np.zeros((2,) + z.shape)
    dz[0] = centered(z, dt, axis=1, periodic=False)
    dz[1] = centered_edge(z, history.grid.dx, axis=2)
    return SpaceTimeFields(system, z, dz, (dt, history.grid.dx), (False, False))


def interior_mask(fields: SpaceTimeFields, r, lo, hi):
    return np.broadcast_to((r >= lo) & (r <= hi), fields.z.shape[1:])
