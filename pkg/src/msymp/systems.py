"""Concrete multi-symplectic systems built from Clebsch one-forms.

Three systems are provided, each with a fixed variable ordering:

``gas1d``  z = (u, rho, S, beta, phi), independent variables (t, x)
``mhd-b``  z = (u, rho, S, mu, B, Gamma, lambda, beta, phi), (t, x, y, z)
``mhd-a``  Z = (u, rho, S, mu, A, gamma, lambda, beta, phi), (t, x, y, z)

The structure matrices are never stored; they are derived from the one-form
coefficients by :func:`msymp.exterior.exterior_derivative`.

Note on symbols: ``mu`` is the Lin label (a Clebsch potential) and ``mu0`` the
magnetic permeability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .eos import EosParams, eos_eval
from .exterior import OneForm, require_positive
from .errors import UsageError

GAS1D_VARS = ("u", "rho", "S", "beta", "phi")
MHDB_VARS = ("ux", "uy", "uz", "rho", "S", "mu", "Bx", "By", "Bz",
             "Gx", "Gy", "Gz", "lam", "beta", "phi")
MHDA_VARS = ("ux", "uy", "uz", "rho", "S", "mu", "Ax", "Ay", "Az",
             "gx", "gy", "gz", "lam", "beta", "phi")

# index blocks shared by both 15-variable layouts
U = slice(0, 3)
RHO, S_, MU = 3, 4, 5
MAG = slice(6, 9)     # B or A
POT = slice(9, 12)    # Gamma or gamma
LAM, BETA, PHI = 12, 13, 14


@dataclass(frozen=True)
class SystemDef:
    name: str
    varnames: tuple
    n_indep: int
    oneforms: tuple
    eos: EosParams
    h_density: Callable = field(repr=False)
    h_gradient: Callable = field(repr=False)
    aux_fields: tuple = ()

    @property
    def n_dep(self) -> int:
        return len(self.varnames)

    @property
    def varmap(self) -> dict:
        return {n: i for i, n in enumerate(self.varnames)}

    def index(self, name: str) -> int:
        try:
            return self.varnames.index(name)
        except ValueError:
            raise UsageError(f"{self.name} has no variable {name!r}") from None

    def hamiltonian(self, z, aux=None):
        return self.h_density(np.asarray(z), aux)

    def grad_hamiltonian(self, z, aux=None):
        return self.h_gradient(np.asarray(z), aux)

    def with_oneforms(self, oneforms) -> "SystemDef":
        return SystemDef(self.name, self.varnames, self.n_indep, tuple(oneforms),
                         self.eos, self.h_density, self.h_gradient, self.aux_fields)


def _zeros(n, z):
    z = np.asarray(z)
    return np.zeros((n,) + z.shape[1:], dtype=np.result_type(z.dtype, float))


def _zeros2(n, z):
    z = np.asarray(z)
    return np.zeros((n, n) + z.shape[1:], dtype=np.result_type(z.dtype, float))


# ---------------------------------------------------------------- gas dynamics

def gas1d_system(params: Optional[EosParams] = None, gauge: str = "flat") -> SystemDef:
    """1D gas dynamics in Clebsch variables.

    ``gauge="flat"`` uses ``omega^1 = u(phi drho + beta dS) + phi rho du``.
    ``gauge="conservative"`` subtracts ``d(rho phi u)``, giving
    ``omega^1 = u(beta dS - rho dphi)``; the structure matrices are identical,
    but this representative is the one whose metric-weighted system reproduces
    radial gas dynamics in curvilinear coordinates.
    """
    params = params or EosParams()
    u, rho, S, beta, phi = range(5)
    valid = require_positive(rho)

    def L0(z):
        out = _zeros(5, z)
        out[rho] = z[phi]
        out[S] = z[beta]
        return out

    def dL0(z):
        out = _zeros2(5, z)
        out[rho, phi] = 1.0
        out[S, beta] = 1.0
        return out

    if gauge == "flat":
        def L1(z):
            out = _zeros(5, z)
            out[u] = z[phi] * z[rho]
            out[rho] = z[phi] * z[u]
            out[S] = z[beta] * z[u]
            return out

        def dL1(z):
            out = _zeros2(5, z)
            out[u, rho] = z[phi]
            out[u, phi] = z[rho]
            out[rho, phi] = z[u]
            out[rho, u] = z[phi]
            out[S, beta] = z[u]
            out[S, u] = z[beta]
            return out
    elif gauge == "conservative":
        def L1(z):
            out = _zeros(5, z)
            out[S] = z[beta] * z[u]
            out[phi] = -z[rho] * z[u]
            return out

        def dL1(z):
            out = _zeros2(5, z)
            out[S, beta] = z[u]
            out[S, u] = z[beta]
            out[phi, rho] = -z[u]
            out[phi, u] = -z[rho]
            return out
    else:
        raise UsageError(f"unknown gauge {gauge!r}")

    def H(z, aux=None):
        eps, _, _, _ = eos_eval(params, z[rho], z[S])
        return -(0.5 * z[rho] * z[u] ** 2 - eps)

    def dH(z, aux=None):
        _, _, h, T = eos_eval(params, z[rho], z[S])
        out = _zeros(5, z)
        out[u] = -z[rho] * z[u]
        out[rho] = -0.5 * z[u] ** 2 + h
        out[S] = z[rho] * T
        return out

    forms = (OneForm(0, L0, dL0, valid), OneForm(1, L1, dL1, valid))
    return SystemDef("gas1d", GAS1D_VARS, 2, forms, params, H, dH)


# ------------------------------------------------------------------------ MHD

def _mhd_common_time_form(valid):
    def L0(z):
        out = _zeros(15, z)
        out[RHO] = z[PHI]
        out[S_] = z[BETA]
        out[MU] = z[LAM]
        out[MAG] = z[POT]
        return out

    def dL0(z):
        out = _zeros2(15, z)
        out[RHO, PHI] = 1.0
        out[S_, BETA] = 1.0
        out[MU, LAM] = 1.0
        for s in range(3):
            out[6 + s, 9 + s] = 1.0
        return out

    return OneForm(0, L0, dL0, valid)


def _mhd_hamiltonian(params, magnetic_energy):
    def H(z, aux=None):
        eps, _, _, _ = eos_eval(params, z[RHO], z[S_])
        u2 = np.sum(z[U] ** 2, axis=0)
        return -(0.5 * z[RHO] * u2 - eps - magnetic_energy(z, aux) / (2.0 * params.mu0))

    return H


def mhdB_system(params: Optional[EosParams] = None) -> SystemDef:
    """Ideal MHD with advected magnetic flux: Clebsch potentials (mu, Gamma, lambda, beta, phi)."""
    params = params or EosParams()
    valid = require_positive(RHO)

    def make_space_form(k):
        def L(z):
            out = _zeros(15, z)
            u, B, G = z[U], z[MAG], z[POT]
            GB = np.sum(G * B, axis=0)
            out[U] = -G * B[k]
            out[k] += z[RHO] * z[PHI] + GB
            out[RHO] = z[PHI] * u[k]
            out[S_] = z[BETA] * u[k]
            out[MU] = z[LAM] * u[k]
            out[MAG] = G * u[k]
            return out

        def dL(z):
            out = _zeros2(15, z)
            u, B, G = z[U], z[MAG], z[POT]
            # L_{u^i} = (rho phi + G.B) delta_ki - G_i B^k
            out[k, RHO] = z[PHI]
            out[k, PHI] = z[RHO]
            for i in range(3):
                for s in range(3):
                    out[i, 6 + s] = (G[s] if i == k else 0.0) - (G[i] if s == k else 0.0)
                    out[i, 9 + s] = (B[s] if i == k else 0.0) - (B[k] if i == s else 0.0)
            out[RHO, PHI] = u[k]
            out[RHO, k] = z[PHI]
            out[S_, BETA] = u[k]
            out[S_, k] = z[BETA]
            out[MU, LAM] = u[k]
            out[MU, k] = z[LAM]
            for i in range(3):
                out[6 + i, 9 + i] = u[k]
                out[6 + i, k] = G[i]
            return out

        return OneForm(k + 1, L, dL, valid)

    def magnetic(z, aux):
        return np.sum(z[MAG] ** 2, axis=0)

    def dH(z, aux=None):
        _, _, h, T = eos_eval(params, z[RHO], z[S_])
        out = _zeros(15, z)
        out[U] = -z[RHO] * z[U]
        out[RHO] = -0.5 * np.sum(z[U] ** 2, axis=0) + h
        out[S_] = z[RHO] * T
        out[MAG] = z[MAG] / params.mu0
        return out

    forms = (_mhd_common_time_form(valid),) + tuple(make_space_form(k) for k in range(3))
    return SystemDef("mhd-b", MHDB_VARS, 4, forms, params,
                     _mhd_hamiltonian(params, magnetic), dH)


def mhdA_system(params: Optional[EosParams] = None) -> SystemDef:
    """Ideal MHD with an advected vector-potential one-form ``A.dx``.

    The magnetic part of the Hamiltonian depends on ``curl A``, so its
    gradient is a variational derivative.  Callers supply it through ``aux``:
    ``aux = {"B": curl A, "J": curl B / mu0}``, each shaped ``(3, ...)``.
    Without ``aux`` the magnetic contributions are taken as zero.
    """
    params = params or EosParams()
    valid = require_positive(RHO)

    def make_space_form(k):
        def L(z):
            out = _zeros(15, z)
            u, A, g = z[U], z[MAG], z[POT]
            out[U] = g[k] * A
            out[k] += z[RHO] * z[PHI]
            out[RHO] = z[PHI] * u[k]
            out[S_] = z[BETA] * u[k]
            out[MU] = z[LAM] * u[k]
            out[MAG] = u[k] * g
            return out

        def dL(z):
            out = _zeros2(15, z)
            u, A, g = z[U], z[MAG], z[POT]
            # L_{u^s} = rho phi delta_ks + g_k A^s
            out[k, RHO] = z[PHI]
            out[k, PHI] = z[RHO]
            for s in range(3):
                out[s, 9 + k] = A[s]
                out[s, 6 + s] = g[k]
            out[RHO, PHI] = u[k]
            out[RHO, k] = z[PHI]
            out[S_, BETA] = u[k]
            out[S_, k] = z[BETA]
            out[MU, LAM] = u[k]
            out[MU, k] = z[LAM]
            # L_{A^s} = u^k g_s
            for s in range(3):
                out[6 + s, k] = g[s]
                out[6 + s, 9 + s] = u[k]
            return out

        return OneForm(k + 1, L, dL, valid)

    def magnetic(z, aux):
        if aux is None or "B" not in aux:
            return 0.0 * z[RHO]
        return np.sum(np.asarray(aux["B"]) ** 2, axis=0)

    def dH(z, aux=None):
        _, _, h, T = eos_eval(params, z[RHO], z[S_])
        out = _zeros(15, z)
        out[U] = -z[RHO] * z[U]
        out[RHO] = -0.5 * np.sum(z[U] ** 2, axis=0) + h
        out[S_] = z[RHO] * T
        if aux is not None and "J" in aux:
            out[MAG] = aux["J"]
        return out

    forms = (_mhd_common_time_form(valid),) + tuple(make_space_form(k) for k in range(3))
    return SystemDef("mhd-a", MHDA_VARS, 4, forms, params,
                     _mhd_hamiltonian(params, magnetic), dH, aux_fields=("B", "J"))


SYSTEMS = {"gas1d": gas1d_system, "mhd-b": mhdB_system, "mhd-a": mhdA_system}


def get_system(name: str, params: Optional[EosParams] = None) -> SystemDef:
    try:
        return SYSTEMS[name](params)
    except KeyError:
        raise UsageError(f"unknown system {name!r}; choose from {sorted(SYSTEMS)}") from None


# ----------------------------------------------------------------- A <-> B map

def map_A_to_B(Z):
    """Send an ``mhd-a`` state to ``mhd-b``: ``Gamma = -A``, ``B = gamma``.

    Works on any array whose first axis is the 15-component state, including
    derivative tuples after moving their component axis first.
    """
    Z = np.asarray(Z)
    z = Z.copy()
    z[MAG] = Z[POT]
    z[POT] = -Z[MAG]
    return z


def map_B_to_A(z):
    """Inverse of :func:`map_A_to_B`: ``A = -Gamma``, ``gamma = B``."""
    z = np.asarray(z)
    Z = z.copy()
    Z[MAG] = -z[POT]
    Z[POT] = z[MAG]
    return Z


def map_force_B_to_A(f):
    """Carry an ``mhd-b`` equation vector (rows indexed like z) to ``mhd-a`` rows.

    The A rows of the advected-A system equal minus the Gamma rows of the
    flux system, and its gamma rows equal the B rows.
    """
    f = np.asarray(f)
    g = f.copy()
    g[MAG] = -f[POT]
    g[POT] = f[MAG]
    return g


# ---------------------------------------------------- hand-written left sides

def _grad(dz, idx):
    return dz[1:4, idx]


def mhdB_lhs(z, dz):
    """Left-hand sides of the flux-form Clebsch system, written term by term.

    ``dz`` has shape ``(4, 15, ...)`` with derivatives along (t, x, y, z).
    Rows follow the state ordering; row ``i`` should equal ``dH/dz^i``.
    """
    z, dz = np.asarray(z), np.asarray(dz)
    u, rho, B, G = z[U], z[RHO], z[MAG], z[POT]
    lam, beta = z[LAM], z[BETA]
    grad = lambda i: dz[1:4, i]                                  # noqa: E731
    Dt = lambda i: dz[0, i] + np.sum(u * dz[1:4, i], axis=0)     # noqa: E731
    du = np.stack([grad(i) for i in range(3)])       # du[i, k] = d_k u^i
    dB = np.stack([grad(6 + i) for i in range(3)])
    dG = np.stack([grad(9 + i) for i in range(3)])   # dG[i, k] = d_k Gamma_i
    div_u = np.einsum("kk...->...", du)
    div_B = np.einsum("kk...->...", dB)

    out = np.zeros(z.shape, dtype=np.result_type(z, dz))
    out[U] = (beta * grad(S_) + lam * grad(MU) + G * div_B
              + np.einsum("k...,ik...->i...", B, dG)
              - np.einsum("s...,sk...->k...", B, dG)
              - rho * grad(PHI))
    out[RHO] = -Dt(PHI)
    out[S_] = -beta * div_u - Dt(BETA)
    out[MU] = -lam * div_u - Dt(LAM)
    out[MAG] = -np.einsum("s...,si...->i...", G, du) - np.stack([Dt(9 + i) for i in range(3)])
    out[POT] = (B * div_u - np.einsum("k...,ik...->i...", B, du)
                + np.stack([Dt(6 + i) for i in range(3)]))
    out[LAM] = Dt(MU)
    out[BETA] = Dt(S_)
    out[PHI] = rho * div_u + Dt(RHO)
    return out


def mhdA_lhs(Z, dZ):
    """Left-hand sides of the advected-A Clebsch system, written term by term."""
    Z, dZ = np.asarray(Z), np.asarray(dZ)
    u, rho, A, g = Z[U], Z[RHO], Z[MAG], Z[POT]
    lam, beta = Z[LAM], Z[BETA]
    grad = lambda i: dZ[1:4, i]                                  # noqa: E731
    Dt = lambda i: dZ[0, i] + np.sum(u * dZ[1:4, i], axis=0)     # noqa: E731
    du = np.stack([grad(i) for i in range(3)])
    dA = np.stack([grad(6 + i) for i in range(3)])   # dA[i, k] = d_k A^i
    dg = np.stack([grad(9 + i) for i in range(3)])
    div_u = np.einsum("kk...->...", du)
    div_g = np.einsum("kk...->...", dg)

    out = np.zeros(Z.shape, dtype=np.result_type(Z, dZ))
    out[U] = (beta * grad(S_) + lam * grad(MU)
              + np.einsum("s...,sk...->k...", g, dA)
              - np.einsum("k...,ik...->i...", g, dA)
              - A * div_g
              - rho * grad(PHI))
    out[RHO] = -Dt(PHI)
    out[S_] = -beta * div_u - Dt(BETA)
    out[MU] = -lam * div_u - Dt(LAM)
    out[MAG] = (-g * div_u + np.einsum("k...,ik...->i...", g, du)
                - np.stack([Dt(9 + i) for i in range(3)]))
    out[POT] = np.einsum("s...,si...->i...", A, du) + np.stack([Dt(6 + i) for i in range(3)])
    out[LAM] = Dt(MU)
    out[BETA] = Dt(S_)
    out[PHI] = rho * div_u + Dt(RHO)
    return out


def gas1d_lhs(z, dz):
    """Left-hand sides of the 1D gas-dynamics Clebsch system (row order of z)."""
    z, dz = np.asarray(z), np.asarray(dz)
    u, rho, S, beta, phi = z
    t, x = dz
    out = np.zeros(z.shape, dtype=np.result_type(z, dz))
    out[0] = beta * x[2] - rho * x[4]
    out[1] = -(t[4] + u * x[4])
    out[2] = -(t[3] + u * x[3]) - beta * x[0]
    out[3] = t[2] + u * x[2]
    out[4] = t[1] + u * x[1] + rho * x[0]
    return out
