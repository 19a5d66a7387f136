import numpy as np
import pytest

from conftest import SMOOTH, random_state
from msymp.claws import fields_from_function, fields_from_history, noether_flux, observed_order, symplecticity_laws
from msymp.covariant import (cartesian, covariant_divergence, covariant_noether_flux, covariant_residual,
                             covariant_structural_check, cylindrical_slab, get_metric, interior_mask,
                             radial_fields, radial_initial_state, simulate_radial, user_diagonal)
from msymp.dynamics import initial_state, simulate
from msymp.eos import EosParams
from msymp.errors import ConfigError, DomainError
from msymp.exterior import assemble_residual
from msymp.grid import Grid1D, RadialGrid
from msymp.systems import get_system


def test_cartesian_residual_is_flat(system, rng):
    z = np.stack([random_state(system, rng) for _ in range(6)], axis=1)
    dz = rng.normal(size=(system.n_indep,) + z.shape)
    q = [np.zeros(6)] * system.n_indep
    np.testing.assert_array_equal(covariant_residual(system, cartesian(system.n_indep), q, z, dz),
                                  assemble_residual(system, z, dz))


def test_cartesian_divergence_is_flat():
    t = np.linspace(0, 1, 9)
    x = np.arange(16) / 16
    L = np.stack([np.outer(t**2, np.ones(16)), np.outer(np.ones(9), np.sin(2 * np.pi * x))])
    div = covariant_divergence(L, cartesian(), [t, x], periodic=[False, True])
    dx = 1 / 16
    flat_x = (np.roll(L[1], -1, 1) - np.roll(L[1], 1, 1)) / (2 * dx)
    np.testing.assert_allclose(div, 2 * t[:, None] + flat_x, atol=1e-12)


def test_cartesian_laws_match_flat():
    s = get_system("gas1d")
    h = simulate(initial_state("gas1d", "acoustic", Grid1D(32)), 0.05)
    f = fields_from_history(s, h)
    x = h.grid.x
    cov = covariant_noether_flux(s, cartesian(), f, x, 0)
    flat = noether_flux(s, f, 0)
    np.testing.assert_array_equal(cov.residual, flat.residual)
    cs = covariant_structural_check(s, cartesian(), f, x)
    sym = symplecticity_laws(s, f, form="quadratic", pairs=[(0, 1)])[(0, 1)]
    np.testing.assert_array_equal(cs.residual, sym.residual)


def test_cylindrical_metric_values():
    m = get_metric("cylindrical-slab")
    r = np.array([1.0, 2.0])
    q = [np.zeros(2), r]
    np.testing.assert_array_equal(m.sqrt_g(q), r)
    np.testing.assert_array_equal(m.grad_log(q)[1], 1 / r)
    np.testing.assert_array_equal(m.hess_log(q)[1][1], -1 / r**2)
    with pytest.raises(DomainError):
        m.check([np.zeros(2), np.array([0.0, 1.0])])
    with pytest.raises(ConfigError):
        get_metric("spherical")


def test_user_diagonal_matches_cylindrical():
    u = user_diagonal("cyl", [lambda q: np.ones_like(q[1]), lambda q: q[1] ** 2, lambda q: np.ones_like(q[1])])
    c = cylindrical_slab()
    q = [np.zeros(3), np.array([1.0, 1.5, 2.5])]
    np.testing.assert_allclose(u.sqrt_g(q), c.sqrt_g(q))
    np.testing.assert_allclose(u.grad_log(q)[1], c.grad_log(q)[1], rtol=1e-8)
    np.testing.assert_allclose(u.hess_log(q)[1][1], c.hess_log(q)[1][1], rtol=1e-4)


def _radial(n, t_end=0.1):
    g = RadialGrid(n)
    h = simulate_radial(g, radial_initial_state(g), t_end)
    return h, radial_fields(h)


def test_radial_run_satisfies_covariant_system():
    s = get_system("gas1d")
    errs, dxs = [], []
    for n in (64, 128, 256):
        h, f = _radial(n)
        T, R = np.meshgrid(h.times, h.grid.x, indexing="ij")
        res = covariant_residual(f.system, cylindrical_slab(), [T, R], f.z, f.dz)
        mask = interior_mask(f, h.grid.x, 1.3, 2.7)
        v = res[:, mask & np.isfinite(res).all(axis=0)]
        errs.append(np.sqrt(np.mean(v**2)))
        dxs.append(h.grid.dx)
    assert observed_order(dxs, errs) >= 1.8
    assert s.name == f.system.name


def test_flat_gauge_breaks_radial_system():
    flat = get_system("gas1d", EosParams())
    h, f = _radial(128)
    T, R = np.meshgrid(h.times, h.grid.x, indexing="ij")
    mask = interior_mask(f, h.grid.x, 1.3, 2.7)
    good = covariant_residual(f.system, cylindrical_slab(), [T, R], f.z, f.dz)
    bad = covariant_residual(flat, cylindrical_slab(), [T, R], f.z, f.dz)
    ok = mask & np.isfinite(good).all(axis=0)
    assert np.max(np.abs(bad[:, ok])) > 100 * np.max(np.abs(good[:, ok]))
