import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SMOOTH
from msymp.claws import (Jet, cross_derivative_identity, energy_momentum_combination,
                         fields_from_function, fields_from_history, functional_derivative,
                         hamilton_check, jacobian2, noether_flux, observed_order, printed_jacobian_slips,
                         pullback_laws, pullback_tensor, representation_gap, symplecticity_laws)
from msymp.dynamics import initial_state, simulate
from msymp.eos import EosParams
from msymp.errors import UsageError
from msymp.grid import Grid1D
from msymp.systems import get_system


def _run(system, family, n=32, t_end=0.05, **kw):
    return simulate(initial_state(system, family, Grid1D(n), **kw), t_end)


@pytest.mark.parametrize("name", ["gas1d", "mhd-b"])
def test_uniform_state_laws_vanish(name):
    h = _run(name, "uniform", rho0=1.2, S0=0.1, B0=(0.3, 0.2, 0.1)) if name == "mhd-b" \
        else _run(name, "uniform", rho0=1.2, S0=0.1)
    s = get_system(name)
    for rep in pullback_laws(s, h).values():
        assert rep.residual_linf <= 1e-12, rep.law_name
    for rep in symplecticity_laws(s, h, pairs=[(0, 1)]).values():
        assert rep.residual_linf <= 1e-12


def test_observed_order_synthetic():
    dx = np.array([0.1, 0.05, 0.025])
    assert observed_order(dx, 3 * dx**2) == pytest.approx(2.0)
    assert np.isnan(observed_order(dx, [1.0, 0.0, 0.0]))
    with pytest.raises(UsageError):
        observed_order(dx[:2], dx[:2])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6))
def test_jet_leibniz(v):
    a = Jet(v[0], np.array([v[1], v[2]]))
    b = Jet(v[3], np.array([v[4], v[5]]))
    p = a * b
    assert p.v == pytest.approx(v[0] * v[3])
    np.testing.assert_allclose(p.d, [v[1] * v[3] + v[0] * v[4], v[2] * v[3] + v[0] * v[5]])
    assert jacobian2(a, b, 0, 1) == pytest.approx(-jacobian2(b, a, 0, 1))
    assert jacobian2(a, a, 0, 1) == pytest.approx(0.0, abs=1e-12)


def test_jacobian2_rejects_equal_indices():
    a = Jet(1.0, np.zeros(2))
    with pytest.raises(UsageError):
        jacobian2(a, a, 1, 1)


def test_representation_equivalence_on_histories():
    for name, fam in (("gas1d", "acoustic"), ("mhd-b", "alfven"), ("mhd-a", "alfven")):
        h = _run(name, fam)
        assert representation_gap(get_system(name), h) <= 1e-12


def test_printed_jacobian_forms_disagree_for_mhd():
    h = _run("mhd-b", "alfven", amp=0.05)
    assert representation_gap(get_system("mhd-b"), h, literal=True) > 1e-3
    assert len(printed_jacobian_slips()) == 2


@pytest.mark.parametrize("name", ["gas1d", "mhd-b", "mhd-a"])
def test_noether_equals_negated_pullback(name):
    s = get_system(name)
    f = fields_from_function(s, SMOOTH[name], 24, 24)
    for beta in (0, 1):
        rep = noether_flux(s, f, beta)
        assert rep.extra["max_abs_vs_pullback"] <= 1e-13 * max(1.0, rep.extra["scale"])
        T = pullback_tensor(f, beta)
        np.testing.assert_allclose(rep.density, -T[0], atol=1e-13)


def test_noether_requires_zero_slope():
    h = _run("gas1d", "uniform", u0=0.2)
    with pytest.raises(UsageError):
        noether_flux(get_system("gas1d"), h, 0)


def test_cross_derivative_identity_converges():
    s = get_system("gas1d")
    ns = (32, 64, 128)
    errs = [cross_derivative_identity(s, fields_from_function(s, SMOOTH["gas1d"], n, n))["l2"] for n in ns]
    assert observed_order([1 / n for n in ns], errs) >= 1.8
    with pytest.raises(UsageError):
        cross_derivative_identity(s, fields_from_function(s, SMOOTH["gas1d"], 8, 8), 1, 1)


def test_energy_momentum_combination_on_shell():
    s = get_system("gas1d")
    out = [energy_momentum_combination(fields_from_history(s, _run("gas1d", "acoustic", n=n, t_end=0.1)))["l2"]
           for n in (32, 64, 128)]
    assert observed_order([1 / 32, 1 / 64, 1 / 128], out) >= 1.8


def test_fields_from_history_checks():
    h = _run("gas1d", "acoustic")
    with pytest.raises(UsageError):
        fields_from_history(get_system("mhd-b"), h)
    f = fields_from_history(get_system("gas1d"), h)
    assert f.dz.shape == (2, 5, h.n_times, 32)


def test_functional_derivative_matches_single_point():
    p = EosParams()
    st_ = initial_state("gas1d", "acoustic", Grid1D(16))
    from msymp.claws import energy_functional_density
    g = functional_derivative("gas1d", st_.z, st_.grid, p, 1)
    k = 5
    zc = st_.z.astype(complex)
    zc[1, k] += 1e-30j
    H = np.sum(energy_functional_density("gas1d", zc, st_.grid, p)) * st_.grid.dx
    assert g[k] == pytest.approx(H.imag / 1e-30, rel=1e-12)


def test_hamilton_check_shrinks():
    p = EosParams()
    vals = [hamilton_check(_run("gas1d", "acoustic", n=n, t_end=0.1), p)["max"] for n in (32, 64)]
    assert vals[1] < vals[0] / 3
    with pytest.raises(UsageError):
        hamilton_check(_run("mhd-a", "alfven"), p)


def test_mhd_raw_and_reduced_laws_agree():
    s = get_system("mhd-b")
    laws = pullback_laws(s, _run("mhd-b", "alfven", n=32, amp=0.05))
    for red, raw in (("energy", "energy_raw"), ("momentum[x]", "momentum_raw[x]"),
                     ("momentum[y]", "momentum_raw[y]")):
        scale = max(1e-300, laws[red].residual_linf)
        assert abs(laws[raw].residual_l2 - laws[red].residual_l2) <= 1e-10 * max(1.0, scale)
    assert laws["momentum[z]"].residual_linf == 0.0
