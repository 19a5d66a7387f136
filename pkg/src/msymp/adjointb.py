"""The operator ``V_B`` and its adjoint on a periodic 3D grid.

    V_B(W)^i      = B^s d_s W^i - B^s d_i W^s
    V_W^dag(B)^i  = W^s d_i B^s - W^i d_s B^s

With centered differences on a periodic grid, ``sum V_B(W) dV`` equals
``sum V_W^dag(B) dV`` exactly (up to rounding): each term is a discrete
summation by parts, ``sum f D g = -sum (D f) g``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError


@dataclass(frozen=True)
class VectorField3:
    components: np.ndarray      # (3, nx, ny, nz)
    spacing: tuple = (1.0, 1.0, 1.0)

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.ndim != 4 or c.shape[0] != 3:
            raise UsageError("components must have shape (3, nx, ny, nz)")
        if not np.all(np.isfinite(c)):
            raise UsageError("vector field must be finite")
        object.__setattr__(self, "components", c)
        object.__setattr__(self, "spacing", tuple(float(h) for h in self.spacing))

    @property
    def dV(self) -> float:
        return float(np.prod(self.spacing))

    def d(self, comp: int, axis: int) -> np.ndarray:
        f = self.components[comp]
        return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2 * self.spacing[axis])


def _match(a: VectorField3, b: VectorField3):
    if a.components.shape != b.components.shape or not np.allclose(a.spacing, b.spacing, rtol=0, atol=0):
        raise UsageError("vector fields live on different grids")


def v_b(B: VectorField3, W: VectorField3) -> VectorField3:
    """``V_B(W)^i = B^s D_s W^i - B^s D_i W^s``."""
    _match(B, W)
    b = B.components
    out = np.zeros_like(b)
    for i in range(3):
        for s in range(3):
            out[i] += b[s] * W.d(i, s) - b[s] * W.d(s, i)
    return VectorField3(out, B.spacing)


def v_dagger(W: VectorField3, B: VectorField3) -> VectorField3:
    """``V_W^dag(B)^i = W^s D_i B^s - W^i D_s B^s``."""
    _match(B, W)
    w = W.components
    divB = sum(B.d(s, s) for s in range(3))
    out = np.zeros_like(w)
    for i in range(3):
        for s in range(3):
            out[i] += w[s] * B.d(s, i)
        out[i] -= w[i] * divB
    return VectorField3(out, W.spacing)


def adjoint_identity_check(B: VectorField3, W: VectorField3) -> dict:
    """Per-component relative gap between ``sum V_B(W) dV`` and ``sum V_W^dag(B) dV``.

    The scale for component ``i`` is the grid sum of the pointwise absolute
    values of every product term.  Both sides are often close to zero for
    trigonometric fields, so this is the meaningful size to compare against.
    """
    _match(B, W)
    dV = B.dV
    b, w = B.components, W.components
    lhs = v_b(B, W).components.reshape(3, -1).sum(axis=1) * dV
    rhs = v_dagger(W, B).components.reshape(3, -1).sum(axis=1) * dV
    scale = np.zeros(3)
    for i in range(3):
        for s in range(3):
            scale[i] += np.sum(np.abs(b[s] * W.d(i, s)) + np.abs(b[s] * W.d(s, i)))
            scale[i] += np.sum(np.abs(w[s] * B.d(s, i)) + np.abs(w[i] * B.d(s, s)))
    scale *= dV
    gap = np.abs(lhs - rhs)
    rel = np.where(scale > 0, gap / np.where(scale > 0, scale, 1.0), gap)
    return {"lhs": lhs, "rhs": rhs, "abs": gap, "rel": rel, "max_rel": float(np.max(rel))}


def random_periodic_field(rng: np.random.Generator, n: int, length: float = 2 * np.pi,
                          n_modes: int = 4, kmax: int = 3) -> VectorField3:
    """Sum of a few random low-wavenumber Fourier modes per component."""
    x = np.arange(n) * length / n
    X = np.stack(np.meshgrid(x, x, x, indexing="ij"))
    comps = np.zeros((3, n, n, n))
    for c in range(3):
        comps[c] += rng.normal()
        for _ in range(n_modes):
            k = rng.integers(-kmax, kmax + 1, size=3)
            phase = rng.uniform(0, 2 * np.pi)
            comps[c] += rng.normal() * np.cos(2 * np.pi / length * np.tensordot(k, X, axes=1) + phase)
    h = length / n
    return VectorField3(comps, (h, h, h))


def discrete_curl(A: VectorField3) -> VectorField3:
    """Centered-difference curl; its centered divergence vanishes to rounding."""
    c = np.stack([A.d(2, 1) - A.d(1, 2), A.d(0, 2) - A.d(2, 0), A.d(1, 0) - A.d(0, 1)])
    return VectorField3(c, A.spacing)


def run_trials(n: int = 16, trials: int = 100, seed: int = 0):
    """Yield one result dict per random field pair."""
    rng = np.random.default_rng(seed)
    for k in range(trials):
        B = random_periodic_field(rng, n)
        W = random_periodic_field(rng, n)
        res = adjoint_identity_check(B, W)
        yield {"trial": k, "n": n, "max_rel": res["max_rel"], "rel": res["rel"].tolist()}
