"""Coefficient-level exterior calculus over the dependent variables.

A one-form ``omega = L_j(z) dz^j`` is represented by two callables: the
coefficients ``L_j(z)`` and their first partials ``dL[j, k] = dL_j/dz^k``.
State vectors are laid out component-first, ``z.shape == (N, ...)``, so the
same code evaluates a single point or a whole space-time grid of points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, UsageError

# complex-step size; derivatives are exact to rounding for analytic coefficients
_CSTEP = 1e-30


@dataclass(frozen=True)
class OneForm:
    """Coefficients ``L^alpha_j`` of ``omega^alpha`` and their exact partials."""

    alpha: int
    coeffs: Callable[[np.ndarray], np.ndarray]
    partials: Callable[[np.ndarray], np.ndarray]
    validate: Optional[Callable[[np.ndarray], None]] = field(default=None, compare=False)

    def __call__(self, z):
        return self.coeffs(z)


def exterior_derivative(omega: OneForm, z) -> np.ndarray:
    """Skew matrix ``K[j, k] = dL_k/dz^j - dL_j/dz^k`` of ``d omega`` at ``z``.

    The result has shape ``(N, N, ...)`` and is antisymmetric by construction.
    """
    z = np.asarray(z)
    if omega.validate is not None:
        omega.validate(z)
    dL = omega.partials(z)
    return np.swapaxes(dL, 0, 1) - dL


def structure_matrices(system, z) -> np.ndarray:
    """All ``K^alpha`` of ``system`` stacked: shape ``(n_indep, N, N, ...)``."""
    return np.stack([exterior_derivative(w, z) for w in system.oneforms])


def _k_gradient(omega: OneForm, z) -> np.ndarray:
    """``dK[i, j, k] = dK_ij/dz^k`` at a single point, by complex step."""
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    out = np.empty((n, n, n))
    for k in range(n):
        zc = z.astype(complex)
        zc[k] += 1j * _CSTEP
        out[:, :, k] = exterior_derivative(omega, zc).imag / _CSTEP
    return out


def _k_gradient_fd(omega: OneForm, z, step=1e-5) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    out = np.empty((n, n, n))
    for k in range(n):
        zp, zm = z.copy(), z.copy()
        zp[k] += step
        zm[k] -= step
        out[:, :, k] = (exterior_derivative(omega, zp) - exterior_derivative(omega, zm)) / (2 * step)
    return out


def check_closure(system, alpha: int, z, method: str = "complex") -> float:
    """Max over all ordered triples of ``|K_ij,k + K_jk,i + K_ki,j|`` at ``z``.

    ``method="complex"`` differentiates the K entries by complex step (exact
    to rounding for the polynomial/analytic coefficients used here);
    ``method="fd"`` uses centered differences with step 1e-5.
    """
    omega = system.oneforms[alpha]
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise UsageError("check_closure expects a single state point")
    if method == "complex":
        dK = _k_gradient(omega, z)
    elif method == "fd":
        dK = _k_gradient_fd(omega, z)
    else:
        raise UsageError(f"unknown differentiation method {method!r}")
    cyc = dK + np.einsum("jki->ijk", dK) + np.einsum("kij->ijk", dK)
    return float(np.max(np.abs(cyc)))


def _check_dz(system, z, dz):
    z = np.asarray(z)
    dz = np.asarray(dz)
    if dz.shape[0] != system.n_indep or dz.shape[1:] != z.shape:
        raise UsageError(
            f"dz must have shape {(system.n_indep,) + z.shape}, got {dz.shape}"
        )
    return z, dz


def assemble_residual(system, z, dz, aux=None) -> np.ndarray:
    """``K^alpha_ij z^j_,alpha - dH/dz^i`` for derivative tuple ``dz``.

    ``dz[alpha]`` holds ``dz/dx^alpha`` with the same layout as ``z``.
    ``aux`` is forwarded to the Hamiltonian gradient (only the A-potential
    MHD system uses it).
    """
    z, dz = _check_dz(system, z, dz)
    K = structure_matrices(system, z)
    lhs = np.einsum("aij...,aj...->i...", K, dz)
    return lhs - system.grad_hamiltonian(z, aux)


def lagrangian_density(system, z, dz, aux=None):
    """``L = L^alpha_j z^j_,alpha - H(z)``."""
    z, dz = _check_dz(system, z, dz)
    contraction = sum(np.sum(w.coeffs(z) * dz[w.alpha], axis=0) for w in system.oneforms)
    return contraction - system.hamiltonian(z, aux)


def add_exact_form(omega: OneForm, grad_phi, hess_phi) -> OneForm:
    """Return ``omega + d Phi`` given ``dPhi/dz`` and its Hessian."""

    def coeffs(z):
        return omega.coeffs(z) + grad_phi(z)

    def partials(z):
        return omega.partials(z) + hess_phi(z)

    return OneForm(omega.alpha, coeffs, partials, omega.validate)


def partials_fd_error(omega: OneForm, z, step=1e-5) -> float:
    """Max relative error between stored partials and centered differences."""
    z = np.asarray(z, dtype=float)
    n = z.shape[0]
    exact = omega.partials(z)
    worst = 0.0
    for k in range(n):
        zp, zm = z.copy(), z.copy()
        zp[k] += step
        zm[k] -= step
        fd = (omega.coeffs(zp) - omega.coeffs(zm)) / (2 * step)
        scale = np.maximum(np.abs(exact[:, k]), 1.0)
        worst = max(worst, float(np.max(np.abs(fd - exact[:, k]) / scale)))
    return worst


def require_positive(index: int, name: str = "rho"):
    """Validator raising :class:`DomainError` if ``z[index] <= 0`` anywhere."""

    def validate(z):
        val = np.real(np.asarray(z)[index])
        if np.any(val <= 0):
            raise DomainError(f"{name} must be positive (min {np.min(val)!r})")

    return validate
