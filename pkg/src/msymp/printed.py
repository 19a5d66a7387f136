"""Structure matrices transcribed entry by entry from their printed forms.

These are cross-check fixtures only; the working matrices always come from
the one-forms.  :func:`fixture_diff` lists every entry where the two
disagree, so transcription slips in either place surface as data.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError
from .exterior import structure_matrices
from .systems import BETA, LAM, MU, PHI, RHO, S_


def _set(M, i, j, v):
    M[i, j] = v
    M[j, i] = -v


def printed_gas1d(z) -> np.ndarray:
    """Printed ``K^0``, ``K^1`` for z = (u, rho, S, beta, phi)."""
    u, rho, S, beta, phi = np.asarray(z, dtype=float)
    K0 = np.array([
        [0, 0, 0, 0, 0],
        [0, 0, 0, 0, -1],
        [0, 0, 0, -1, 0],
        [0, 0, 1, 0, 0],
        [0, 1, 0, 0, 0],
    ], dtype=float)
    K1 = np.array([
        [0, 0, beta, 0, -rho],
        [0, 0, 0, 0, -u],
        [-beta, 0, 0, -u, 0],
        [0, 0, u, 0, 0],
        [rho, u, 0, 0, 0],
    ], dtype=float)
    return np.stack([K0, K1])


def _delta_form(entries, n=15):
    """``K = k - k^T`` from a list of 1-based ``(i, j, value)`` entries of k."""
    k = np.zeros((n, n))
    for i, j, v in entries:
        k[i - 1, j - 1] += v
    return k - k.T


def printed_mhdB(z) -> np.ndarray:
    """Printed ``K^0..K^3`` for the flux-form MHD state (1-based index lists)."""
    z = np.asarray(z, dtype=float)
    ux, uy, uz = z[0:3]
    Bx, By, Bz = z[6:9]
    Gx, Gy, Gz = z[9:12]
    lam, beta, rho = z[LAM], z[BETA], z[RHO]
    k0 = [(15, 4, 1), (14, 5, 1), (13, 6, 1), (10, 7, 1), (11, 8, 1), (12, 9, 1)]

    def tail(uk, row):
        return [(14, 5, uk), (13, 6, uk), (15, 4, uk), (10, 7, uk), (11, 8, uk), (12, 9, uk),
                (row, 5, beta), (row, 6, lam), (row, 15, -rho)]

    k1 = [(1, 7, Gx), (2, 7, Gy), (3, 7, Gz), (2, 11, Bx), (3, 12, Bx), (11, 1, By), (12, 1, Bz)]
    k2 = [(1, 8, Gx), (2, 8, Gy), (3, 8, Gz), (10, 2, Bx), (1, 10, By), (3, 12, By), (12, 2, Bz)]
    k3 = [(1, 9, Gx), (2, 9, Gy), (3, 9, Gz), (10, 3, Bx), (11, 3, By), (1, 10, Bz), (2, 11, Bz)]
    return np.stack([_delta_form(k0), _delta_form(k1 + tail(ux, 1)),
                     _delta_form(k2 + tail(uy, 2)), _delta_form(k3 + tail(uz, 3))])


def printed_mhdA(z) -> np.ndarray:
    """Printed entry rules for the vector-potential MHD state, applied literally.

    The last rule, ``K^k[gamma_k, A^s] = u^k``, is taken for every s as
    written; the one-forms give ``K^k[gamma_s, A^s] = u^k`` instead.
    """
    z = np.asarray(z, dtype=float)
    u, A, g = z[0:3], z[6:9], z[9:12]
    out = np.zeros((4, 15, 15))
    for s in range(3):
        _set(out[0], 9 + s, 6 + s, 1.0)
    _set(out[0], PHI, RHO, 1.0)
    _set(out[0], BETA, S_, 1.0)
    _set(out[0], LAM, MU, 1.0)
    for k in range(3):
        K = out[k + 1]
        _set(K, k, S_, z[BETA])
        _set(K, k, MU, z[LAM])
        _set(K, BETA, S_, u[k])
        _set(K, LAM, MU, u[k])
        _set(K, PHI, RHO, u[k])
        _set(K, PHI, k, z[RHO])
        for s in range(3):
            if s != k:
                _set(K, 6 + s, s, g[k])
                _set(K, k, 6 + s, g[s])
            _set(K, 9 + k, s, A[s])
            _set(K, 9 + k, 6 + s, u[k])
    return out


PRINTED = {"gas1d": printed_gas1d, "mhd-b": printed_mhdB, "mhd-a": printed_mhdA}


def fixture_diff(system, z, tol: float = 1e-12) -> list:
    """Entries ``(alpha, i, j)`` with ``i < j`` where derived and printed K differ."""
    if system.name not in PRINTED:
        raise UsageError(f"no printed fixture for {system.name}")
    z = np.asarray(z, dtype=float)
    derived = structure_matrices(system, z)
    printed = PRINTED[system.name](z)
    names = system.varnames
    out = []
    for a in range(derived.shape[0]):
        for i in range(derived.shape[1]):
            for j in range(i + 1, derived.shape[2]):
                d, p = derived[a, i, j], printed[a, i, j]
                if abs(d - p) > tol * max(1.0, abs(d), abs(p)):
                    out.append({"alpha": a, "i": names[i], "j": names[j],
                                "derived": float(d), "printed": float(p)})
    return out
