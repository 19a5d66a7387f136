"""Conservation laws and identities evaluated on sampled space-time fields.

Fields are held component first, ``z[i, t, x]``, with a derivative tuple
``dz[alpha, i, t, x]`` for every independent variable of the system.  For
1.5D MHD the y and z derivatives are identically zero.

Outer divergences ``D_alpha`` of densities and fluxes use the same centered
stencils as the inner derivatives.  Along a non-periodic time axis the
first and last planes become NaN and are excluded from all norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dynamics
from .eos import eos_eval
from .errors import UsageError
from .exterior import structure_matrices
from .grid import centered, centered_edge, ddx
from .history import FieldHistory
from .systems import BETA, LAM, MAG, MU, PHI, POT, RHO, S_, U, SystemDef

_CSTEP = 1e-30


# ---------------------------------------------------------------- containers

@dataclass
class SpaceTimeFields:
    """Dependent variables and their first derivatives on a (t, x) grid."""

    system: SystemDef
    z: np.ndarray                  # (N, nt, nx)
    dz: np.ndarray                 # (n_indep, N, nt, nx)
    spacing: tuple                 # (dt, dx)
    periodic: tuple = (False, True)
    aux: Optional[dict] = None
    slope: Optional[np.ndarray] = None

    def jet(self, i) -> "Jet":
        return Jet(self.z[i], self.dz[:, i])

    def d(self, f, axis):
        """Outer derivative of a space-time array along grid axis 0 (t) or 1 (x)."""
        if axis >= 2:
            return np.zeros_like(f)
        if not self.periodic[axis] and axis == 1:
            return centered_edge(f, self.spacing[1], axis=-1)
        return centered(f, self.spacing[axis], axis=f.ndim - 2 + axis, periodic=self.periodic[axis])

    def div(self, density, flux):
        """``D_t density + D_x flux[0]`` (higher spatial directions are constant)."""
        return self.d(density, 0) + self.d(flux[0], 1)

    def require_no_slope(self):
        if self.slope is not None and np.any(self.slope != 0):
            raise UsageError("laws involving undifferentiated potentials need a zero mean gradient of phi")


def _aux_for(system: SystemDef, z, grid):
    if system.name != "mhd-a":
        return None
    B = dynamics._curl(z[MAG], grid)
    return {"B": B, "J": dynamics._curl(B, grid) / system.eos.mu0}


def fields_from_history(system: SystemDef, history: FieldHistory) -> SpaceTimeFields:
    """Attach centered space and time derivatives to a stored history."""
    if history.n_times < 3:
        raise UsageError("history needs at least three snapshots")
    if tuple(history.varnames) != tuple(system.varnames):
        raise UsageError(f"history variables do not match system {system.name}")
    dt = history.dt_out
    z = history.spacetime()
    grid = history.grid
    dz = np.zeros((system.n_indep,) + z.shape)
    dz[0] = centered(z, dt, axis=1, periodic=False)
    slope = history.slope.reshape(-1, 1, 1)
    dz[1] = ddx(z, grid) + slope
    return SpaceTimeFields(system, z, dz, (dt, grid.dx), (False, grid.periodic),
                           _aux_for(system, z, grid), history.slope.copy())


def fields_from_function(system: SystemDef, func: Callable, n_t: int, n_x: int,
                         period_t: float = 1.0, length: float = 1.0) -> SpaceTimeFields:
    """Sample ``func(t, x) -> z`` on a grid periodic in both t and x.

    Derivatives are centered differences, so the result carries the same
    O(h^2) truncation error as a stored simulation.
    """
    t = np.arange(n_t) * period_t / n_t
    x = np.arange(n_x) * length / n_x
    T, X = np.meshgrid(t, x, indexing="ij")
    z = np.asarray(func(T, X), dtype=float)
    dt, dx = period_t / n_t, length / n_x
    dz = np.zeros((system.n_indep,) + z.shape)
    dz[0] = centered(z, dt, axis=1, periodic=True)
    dz[1] = centered(z, dx, axis=2, periodic=True)
    aux = None
    if system.name == "mhd-a":
        class _G:
            periodic = True
        g = _G()
        g.dx = dx
        aux = _aux_for(system, z, g)
    return SpaceTimeFields(system, z, dz, (dt, dx), (True, True), aux)


@dataclass
class ConservationReport:
    law_name: str
    density: np.ndarray
    flux: np.ndarray
    residual: np.ndarray
    residual_l2: float
    residual_linf: float
    order_estimate: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {"law": self.law_name, "residual_l2": self.residual_l2,
               "residual_linf": self.residual_linf}
        if self.order_estimate is not None:
            out["order"] = self.order_estimate
        out.update(self.extra)
        return out


def norms(residual, cell: float, mask=None):
    """Discrete L2 (``sqrt(sum r^2 dx dt)``) and L-infinity over finite entries."""
    r = np.asarray(residual)
    ok = np.isfinite(r)
    if mask is not None:
        ok &= mask
    if not np.any(ok):
        return 0.0, 0.0
    v = r[ok]
    return float(np.sqrt(np.sum(v**2) * cell)), float(np.max(np.abs(v)))


def _report(name, f: SpaceTimeFields, density, flux, mask=None, **extra):
    flux = np.asarray(flux)
    res = f.div(density, flux)
    l2, linf = norms(res, f.spacing[0] * f.spacing[1], mask)
    return ConservationReport(name, density, flux, res, l2, linf, extra=extra)


def observed_order(dxs, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(dx)`` (needs >= 3 levels)."""
    dxs, errors = np.asarray(dxs, float), np.asarray(errors, float)
    if dxs.size < 3:
        raise UsageError("order estimates need at least three resolutions")
    if np.any(errors <= 0):
        return float("nan")
    return float(np.polyfit(np.log(dxs), np.log(errors), 1)[0])


# ------------------------------------------------------------------------ jets

class Jet:
    """Value together with its first derivatives along every independent variable.

    Products follow the Leibniz rule exactly, so a Jacobian of a product is
    built from the stored derivatives of the factors rather than by
    differencing the product.  This is what makes the Jacobian-sum forms
    agree with the quadratic forms to rounding.
    """

    __slots__ = ("v", "d")

    def __init__(self, v, d):
        self.v = np.asarray(v)
        self.d = np.asarray(d)

    def __add__(self, o):
        if isinstance(o, Jet):
            return Jet(self.v + o.v, self.d + o.d)
        return Jet(self.v + o, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, Jet):
            return Jet(self.v * o.v, self.d * o.v + self.v * o.d)
        return Jet(self.v * o, self.d * o)

    __rmul__ = __mul__


def jacobian2(f, g, a: int, b: int, spacing=None, periodic=(False, True)):
    """``d(f, g)/d(x^a, x^b) = f_a g_b - f_b g_a``.

    ``f`` and ``g`` are :class:`Jet` objects, or plain ``(nt, nx)`` arrays
    that are differenced with centered stencils (then ``spacing`` is required).
    """
    if a == b:
        raise UsageError("jacobian2 needs two distinct independent variables")
    f, g = (_as_jet(v, spacing, periodic) for v in (f, g))
    return f.d[a] * g.d[b] - f.d[b] * g.d[a]


def _as_jet(v, spacing, periodic):
    if isinstance(v, Jet):
        return v
    if spacing is None:
        raise UsageError("plain arrays need grid spacing for differentiation")
    v = np.asarray(v, dtype=float)
    d = np.stack([centered(v, spacing[k], axis=v.ndim - 2 + k, periodic=periodic[k])
                  for k in range(2)])
    return Jet(v, d)


# ------------------------------------------------------------ pullback laws

def pullback_tensor(f: SpaceTimeFields, beta: int):
    """``T^alpha_beta = L^alpha_j z^j_beta - L delta^alpha_beta`` for every alpha."""
    sysd = f.system
    f.require_no_slope()
    lag = lagrangian_field(f)
    T = np.stack([np.sum(w.coeffs(f.z) * f.dz[beta], axis=0) for w in sysd.oneforms])
    T[beta] = T[beta] - lag
    return T


def lagrangian_field(f: SpaceTimeFields):
    contraction = sum(np.sum(w.coeffs(f.z) * f.dz[w.alpha], axis=0) for w in f.system.oneforms)
    return contraction - f.system.hamiltonian(f.z, f.aux)


def _physical(f: SpaceTimeFields):
    sysd, z = f.system, f.z
    if sysd.name == "gas1d":
        u = z[0][None]
        rho, S = z[1], z[2]
        B = np.zeros((3,) + rho.shape)
        u = np.concatenate([u, np.zeros((2,) + rho.shape)])
    elif sysd.name == "mhd-b":
        u, rho, S, B = z[U], z[RHO], z[S_], z[MAG]
    else:
        raise UsageError("physical-variable laws are provided for gas1d and mhd-b")
    eps, p, h, T = eos_eval(sysd.eos, rho, S)
    return u, rho, B, eps, p


def energy_law(f: SpaceTimeFields, mask=None) -> ConservationReport:
    """``d_t(rho|u|^2/2 + eps + B^2/2mu0) + div(u(rho|u|^2/2 + eps + p) + E x B/mu0) = 0``."""
    u, rho, B, eps, p = _physical(f)
    mu0 = f.system.eos.mu0
    ke = 0.5 * rho * np.sum(u**2, axis=0)
    E = -dynamics._cross(u, B)
    density = ke + eps + np.sum(B**2, axis=0) / (2 * mu0)
    flux = u * (ke + eps + p) + dynamics._cross(E, B) / mu0
    return _report("energy", f, density, flux, mask)


def momentum_law(f: SpaceTimeFields, k: int = 0, mask=None) -> ConservationReport:
    """Minus the k-th momentum law: density ``-rho u^k``, flux ``-(rho u u^k + P_tot e_k - B B^k/mu0)``."""
    u, rho, B, eps, p = _physical(f)
    mu0 = f.system.eos.mu0
    ptot = p + np.sum(B**2, axis=0) / (2 * mu0)
    density = -rho * u[k]
    flux = -(rho * u * u[k] - B * B[k] / mu0)
    flux[k] = flux[k] - ptot
    return _report(f"momentum[{'xyz'[k]}]", f, density, flux, mask)


def energy_law_raw(f: SpaceTimeFields, mask=None) -> ConservationReport:
    """Energy law with the null-divergence terms still attached (1.5D MHD form).

    Density gains ``-div(E x Gamma + rho phi u)`` and the flux gains
    ``d_t(E x Gamma + rho phi u) - curl((Gamma.u) E)``; the curl has no
    x component when only x-derivatives survive.
    """
    f.require_no_slope()
    base = energy_law(f)
    z = f.z
    if f.system.name == "gas1d":
        V = (z[1] * z[0] * z[4])[None]
    else:
        E = -dynamics._cross(z[U], z[MAG])
        V = dynamics._cross(E, z[POT]) + z[RHO] * z[PHI] * z[U]
    density = base.density - f.d(V[0], 1)
    flux = np.array(base.flux, copy=True)
    flux[0] = flux[0] + f.d(V[0], 0)
    return _report("energy_raw", f, density, flux, mask)


def momentum_law_raw(f: SpaceTimeFields, k: int = 0, mask=None) -> ConservationReport:
    """Momentum law with null-divergence terms attached (1.5D MHD form)."""
    f.require_no_slope()
    base = momentum_law(f, k)
    z = f.z
    if f.system.name == "gas1d":
        rp = z[1] * z[4]
        density = base.density + f.d(rp, 1)
        flux = np.array(base.flux, copy=True)
        flux[0] = flux[0] - f.d(rp, 0)
        return _report("momentum_raw[x]", f, density, flux, mask)
    GB = np.sum(z[POT] * z[MAG], axis=0)
    rp = z[RHO] * z[PHI] + GB
    GkBx = z[POT][k] * z[MAG][0]
    density = base.density - f.d(GkBx, 1)
    flux = np.array(base.flux, copy=True)
    flux[0] = flux[0] + f.d(GkBx, 0)
    if k == 0:
        density = density + f.d(rp, 1)
        flux[0] = flux[0] - f.d(rp, 0)
    return _report(f"momentum_raw[{'xyz'[k]}]", f, density, flux, mask)


def pullback_laws(system: SystemDef, history_or_fields, mask=None) -> dict:
    """Pullback energy/momentum laws and their physical-variable reductions.

    Returns a dict of :class:`ConservationReport`: ``pullback[t]``,
    ``pullback[x]`` built from the one-forms, then ``energy`` and
    ``momentum[*]`` from physical variables (and, for MHD, the ``*_raw``
    variants carrying the null-divergence terms).
    """
    f = _fields(system, history_or_fields)
    out = {}
    for beta, name in ((0, "t"), (1, "x")):
        T = pullback_tensor(f, beta)
        out[f"pullback[{name}]"] = _report(f"pullback[{name}]", f, T[0], T[1:], mask)
    if system.name in ("gas1d", "mhd-b"):
        out["energy"] = energy_law(f, mask)
        ks = (0,) if system.name == "gas1d" else (0, 1, 2)
        for k in ks:
            rep = momentum_law(f, k, mask)
            out[rep.law_name] = rep
        if system.name == "mhd-b":
            out["energy_raw"] = energy_law_raw(f, mask)
            for k in ks:
                rep = momentum_law_raw(f, k, mask)
                out[rep.law_name] = rep
    return out


def _fields(system, obj) -> SpaceTimeFields:
    if isinstance(obj, SpaceTimeFields):
        return obj
    if isinstance(obj, FieldHistory):
        return fields_from_history(system, obj)
    raise UsageError("expected a FieldHistory or SpaceTimeFields")


# --------------------------------------------------------------- Noether

def noether_flux(system: SystemDef, history_or_fields, beta: int, mask=None) -> ConservationReport:
    """Noether current of translation in ``x^beta``.

    Uses ``V^{x^alpha} = delta^alpha_beta``, ``Vhat^{z^s} = -z^s_beta`` and
    zero divergence term: ``N^alpha = V^alpha L + Vhat^s L^alpha_s``.
    ``extra["max_abs_vs_pullback"]`` compares with ``-T^alpha_beta``.
    """
    f = _fields(system, history_or_fields)
    f.require_no_slope()
    lag = lagrangian_field(f)
    V = np.zeros(system.n_indep)
    V[beta] = 1.0
    Vhat = -f.dz[beta]
    N = np.stack([np.sum(Vhat * w.coeffs(f.z), axis=0) + (lag if V[w.alpha] else 0.0)
                  for w in system.oneforms])
    T = pullback_tensor(f, beta)
    gap = float(np.nanmax(np.abs(N + T)))
    scale = float(np.nanmax(np.abs(T)))
    return _report(f"noether[{beta}]", f, N[0], N[1:], mask,
                   max_abs_vs_pullback=gap, scale=scale)


# -------------------------------------------------------- symplecticity laws

def _chunks(n, size):
    for s in range(0, n, size):
        yield slice(s, min(n, s + size))


def quadratic_forms(system: SystemDef, f: SpaceTimeFields, a: int, b: int, chunk: int = 16):
    """``F^alpha_ab = z_a^T K^alpha z_b`` for every alpha, shape ``(n_indep, nt, nx)``."""
    nt = f.z.shape[1]
    out = np.zeros((system.n_indep,) + f.z.shape[1:])
    if not (np.any(f.dz[a]) and np.any(f.dz[b])):
        return out
    for sl in _chunks(nt, chunk):
        z = f.z[:, sl]
        za, zb = f.dz[a][:, sl], f.dz[b][:, sl]
        K = structure_matrices(system, np.nan_to_num(z))
        out[:, sl] = np.einsum("i...,aij...,j...->a...", za, K, zb)
    return out


def _J(*pairs):
    return list(pairs)


def jacobian_terms(system: SystemDef, f: SpaceTimeFields, literal: bool = False):
    """Per-alpha lists of ``(sign, f, g)`` Jet pairs whose Jacobians sum to ``F^alpha``.

    ``literal=False`` gives the sums ``sum_j d(L^alpha_j, z^j)`` implied by the
    one-forms; ``literal=True`` reproduces the flux expressions exactly as
    they were printed, including two known slips (see :func:`printed_jacobian_slips`).
    """
    j = f.jet
    if system.name == "gas1d":
        u, rho, S, beta, phi = (j(i) for i in range(5))
        return [
            [(1, phi, rho), (1, beta, S)],
            [(1, u * phi, rho), (1, rho * phi, u), (1, u * beta, S)],
        ]
    u = [j(i) for i in range(3)]
    rho, S, mu, lam, beta, phi = j(RHO), j(S_), j(MU), j(LAM), j(BETA), j(PHI)
    M = [j(6 + s) for s in range(3)]   # B or A
    P = [j(9 + s) for s in range(3)]   # Gamma or gamma
    out = [[(1, phi, rho), (1, beta, S), (1, lam, mu)] + [(1, P[s], M[s]) for s in range(3)]]
    for i in range(3):
        terms = [(1, phi * u[i], rho), (1, beta * u[i], S), (1, lam * u[i], mu),
                 (1, rho * phi, u[i])]
        if system.name == "mhd-b":
            terms += [(1, u[i] * P[s], M[s]) for s in range(3)]
            terms += [(-1, M[i] * P[s], u[s]) for s in range(3)]
            if not literal:
                GB = P[0] * M[0] + P[1] * M[1] + P[2] * M[2]
                terms.append((1, GB, u[i]))
        else:
            terms += [(1, P[i] * M[s], u[s]) for s in range(3)]
            if literal:
                terms += [(1, P[s] * M[i], M[s]) for s in range(3)]
            else:
                terms += [(1, u[i] * P[s], M[s]) for s in range(3)]
        out.append(terms)
    return out


def jacobian_forms(system: SystemDef, f: SpaceTimeFields, a: int, b: int, literal=False):
    terms = jacobian_terms(system, f, literal)
    return np.stack([sum(s * jacobian2(p, q, a, b) for s, p, q in lst) for lst in terms])


def symplecticity_laws(system: SystemDef, history_or_fields, form: str = "jacobian",
                       mask=None, pairs=None) -> dict:
    """Structural laws ``D_alpha F^alpha_ab = 0`` for every pair ``a < b``.

    ``form`` selects how F is built: ``"jacobian"`` (Jacobian sums),
    ``"quadratic"`` (``z_a^T K z_b``) or ``"printed"`` (Jacobian sums as
    printed).  Each report's ``extra["representation_gap"]`` is the
    largest pointwise difference between the chosen form and the quadratic
    form, relative to the largest quadratic-form magnitude.  ``pairs``
    restricts the evaluation to the listed ``(a, b)``.
    """
    f = _fields(system, history_or_fields)
    n = system.n_indep
    if form not in ("quadratic", "jacobian", "printed"):
        raise UsageError(f"unknown form {form!r}")
    if pairs is None:
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    out = {}
    for a, b in pairs:
        if not 0 <= a < b < n:
            raise UsageError(f"bad index pair {(a, b)}")
        Q = quadratic_forms(system, f, a, b)
        F = Q if form == "quadratic" else jacobian_forms(system, f, a, b, literal=(form == "printed"))
        scale = float(np.nanmax(np.abs(Q))) if np.any(Q) else 0.0
        gap = float(np.nanmax(np.abs(F - Q))) if np.any(F - Q) else 0.0
        rel = gap / scale if scale > 0 else gap
        name = f"symplecticity[{a},{b}]"
        out[(a, b)] = _report(name, f, F[0], F[1:], mask, representation_gap=rel,
                              identically_zero=not np.any(Q))
    return out


def representation_gap(system: SystemDef, history_or_fields, literal=False) -> float:
    """Largest relative pointwise gap between Jacobian sums and quadratic forms over all pairs."""
    f = _fields(system, history_or_fields)
    worst = 0.0
    for a in range(system.n_indep):
        for b in range(a + 1, system.n_indep):
            Q = quadratic_forms(system, f, a, b)
            F = jacobian_forms(system, f, a, b, literal)
            ok = np.isfinite(Q)
            if not np.any(Q[ok]):
                worst = max(worst, float(np.max(np.abs(F[ok]))) if np.any(F[ok]) else 0.0)
                continue
            worst = max(worst, float(np.max(np.abs(F[ok] - Q[ok])) / np.max(np.abs(Q[ok]))))
    return worst


def printed_jacobian_slips():
    """Human-readable list of the printed flux terms that differ from ``sum d(L_j, z^j)``."""
    return [
        "mhd-b F^i: missing + d(Gamma.B, u^i)",
        "mhd-a F^i: d(gamma_s A^i, A^s) should read d(u^i gamma_s, A^s)",
    ]


# -------------------------------------------------- cross-derivative identity

def cross_derivative_identity(system: SystemDef, history_or_fields, beta: int = 0, gamma: int = 1,
                              mask=None) -> dict:
    """Both sides of ``D_gamma G_beta - D_beta G_gamma = D_alpha(K_ij z^i_gamma z^j_beta)``.

    ``G_beta = D_alpha T^alpha_beta``.  The identity holds for arbitrary
    smooth fields, so the discrepancy measures discretization error only.
    """
    f = _fields(system, history_or_fields)
    if beta == gamma:
        raise UsageError("beta and gamma must differ")
    G = {k: f.div(T[0], T[1:]) for k, T in ((beta, pullback_tensor(f, beta)),
                                            (gamma, pullback_tensor(f, gamma)))}
    lhs = f.d(G[beta], gamma) - f.d(G[gamma], beta)
    F = quadratic_forms(system, f, gamma, beta)
    rhs = f.div(F[0], F[1:])
    l2, linf = norms(lhs - rhs, f.spacing[0] * f.spacing[1], mask)
    return {"lhs": lhs, "rhs": rhs, "l2": l2, "linf": linf}


def energy_momentum_combination(f: SpaceTimeFields, mask=None) -> dict:
    """``D_x G_0 - D_t G_1`` with ``G_0``, ``G_1`` the energy and momentum residuals."""
    G0 = energy_law(f).residual
    G1 = momentum_law(f, 0).residual
    val = f.d(G0, 1) - f.d(G1, 0)
    l2, linf = norms(val, f.spacing[0] * f.spacing[1], mask)
    return {"value": val, "l2": l2, "linf": linf}


# ------------------------------------------------------------ Hamilton check

CANONICAL_PAIRS = {
    "gas1d": (("rho", "phi"), ("S", "beta")),
    "mhd-b": (("rho", "phi"), ("S", "beta"), ("mu", "lam"),
              ("Bx", "Gx"), ("By", "Gy"), ("Bz", "Gz")),
}


def energy_functional_density(system: str, z, grid, params, slope=None,
                              magnetic_energy="flux"):
    """``rho|u|^2/2 + eps (+ magnetic energy)`` with u rebuilt from the potentials."""
    u = dynamics.reconstruct_u(system, z, grid, slope)
    if system == "gas1d":
        rho, S = z[1], z[2]
        u2 = u**2
        mag = 0.0
    else:
        rho, S = z[RHO], z[S_]
        u2 = np.sum(u**2, axis=0)
        Bm = z[MAG] if magnetic_energy == "flux" else dynamics._curl(z[POT], grid)
        mag = np.sum(Bm**2, axis=0) / (2 * params.mu0)
    eps = eos_eval(params, rho, S)[0]
    return 0.5 * rho * u2 + eps + mag


def functional_derivative(system: str, z, grid, params, index: int, slope=None,
                          magnetic_energy="flux"):
    """Partial derivative of ``H = sum(density) dx`` with respect to ``z[index]`` at every grid point.

    Computed by complex step with all perturbations batched; divide by ``dx``
    to get the discrete variational derivative.
    """
    n = grid.n_cells
    zc = np.repeat(z[:, None, :].astype(complex), n, axis=1)
    zc[index, np.arange(n), np.arange(n)] += 1j * _CSTEP
    dens = energy_functional_density(system, zc, grid, params, slope, magnetic_energy)
    return np.sum(dens, axis=-1).imag * grid.dx / _CSTEP


def hamilton_check(history: FieldHistory, params, n_snapshots: int = 6,
                   magnetic_energy: Optional[str] = None) -> dict:
    """Compare centered time derivatives with discrete functional derivatives.

    For each canonical pair ``(q, p)``: ``q_t = dH/dp`` and ``p_t = -dH/dq``,
    with ``dH/dz_j = (d/dz_j sum H dx) / dx``.  Evaluated at up to
    ``n_snapshots`` interior snapshots.  Returns max-abs discrepancies per
    pair and overall.
    """
    system = history.system
    if system not in CANONICAL_PAIRS:
        raise UsageError(f"hamilton_check supports {sorted(CANONICAL_PAIRS)}")
    if history.n_times < 3:
        raise UsageError("hamilton_check needs at least three snapshots")
    me = magnetic_energy or history.meta.get("magnetic_energy", "flux")
    dt = history.dt_out
    grid = history.grid
    vm = history.varmap
    idx = np.unique(np.linspace(1, history.n_times - 2, min(n_snapshots, history.n_times - 2)).astype(int))
    per_pair = {}
    for q, p in CANONICAL_PAIRS[system]:
        worst = 0.0
        for k in idx:
            z = history.data[k]
            zt = (history.data[k + 1] - history.data[k - 1]) / (2 * dt)
            dHdp = functional_derivative(system, z, grid, params, vm[p], history.slope, me) / grid.dx
            dHdq = functional_derivative(system, z, grid, params, vm[q], history.slope, me) / grid.dx
            worst = max(worst, float(np.max(np.abs(zt[vm[q]] - dHdp))),
                        float(np.max(np.abs(zt[vm[p]] + dHdq))))
        per_pair[f"{q},{p}"] = worst
    return {"pairs": per_pair, "max": max(per_pair.values())}
