import numpy as np
import pytest

from msymp.dynamics import (State, initial_state, max_signal_speed, plan_steps, reconstruct_u,
                            rhs_gas1d, simulate, step, step_mhd)
from msymp.eos import EosParams, eos_eval
from msymp.errors import ConfigError, SolverAbort, UsageError
from msymp.grid import Grid1D
from msymp.systems import BETA, PHI, POT, map_A_to_B


def test_uniform_gas_drifts():
    p = EosParams()
    grid = Grid1D(16)
    st = initial_state("gas1d", "uniform", grid, p, rho0=1.3, S0=0.2, phi0=0.5, beta0=-0.1)
    dt, n = 1e-3, 100
    for _ in range(n):
        st = step(st, dt)
    _, _, h, T = eos_eval(p, 1.3, 0.2)
    t = n * dt
    np.testing.assert_allclose(st.z[4], 0.5 - h * t, rtol=0, atol=1e-12)
    np.testing.assert_allclose(st.z[3], -0.1 - 1.3 * T * t, rtol=0, atol=1e-12)
    np.testing.assert_array_equal(st.z[1], 1.3)


def test_uniform_mhd_potential_drift():
    p = EosParams(mu0=2.0)
    grid = Grid1D(16)
    B0 = (0.4, -0.3, 0.2)
    st = initial_state("mhd-b", "uniform", grid, p, B0=B0, Gamma0=(0.1, 0.0, -0.2))
    for _ in range(100):
        st = step(st, 1e-3)
    expect = np.array([0.1, 0.0, -0.2]) - np.array(B0) * 0.1 / 2.0
    np.testing.assert_allclose(st.z[POT], np.repeat(expect[:, None], 16, axis=1), atol=1e-12)
    _, _, h, T = eos_eval(p, 1.0, 0.0)
    np.testing.assert_allclose(st.z[BETA], -T * 0.1, atol=1e-12)
    np.testing.assert_allclose(st.z[PHI], -h * 0.1, atol=1e-12)


def test_mean_flow_via_slope():
    st = initial_state("gas1d", "uniform", Grid1D(16), u0=0.3)
    np.testing.assert_allclose(st.z[0], 0.3)
    st2 = step(st, 1e-3)
    np.testing.assert_allclose(st2.z[0], 0.3, atol=1e-15)
    with pytest.raises(ConfigError):
        State("gas1d", Grid1D(8), np.ones((5, 8)), slope=[0, 1, 0, 0, 0])


def test_mass_conserved_acoustic():
    st = initial_state("gas1d", "acoustic", Grid1D(64), amp=0.05)
    h = simulate(st, 0.1)
    mass = h.var("rho").sum(axis=1) * h.grid.dx
    assert np.max(np.abs(mass - mass[0])) < 1e-13


def test_one_step_commutes_with_map():
    grid = Grid1D(128)
    stA = initial_state("mhd-a", "alfven", grid, amp=0.05, rho_amp=0.01)
    stB = State("mhd-b", grid, map_A_to_B(stA.z), 0.0, stA.params)
    a = step_mhd(stA, 1e-3, "A")
    b = step_mhd(stB, 1e-3, "B", magnetic_energy="potential")
    gap = np.max(np.abs(map_A_to_B(a.z) - b.z)) / np.max(np.abs(b.z))
    assert gap <= 1e-10
    flux = step_mhd(stB, 1e-3, "B")
    assert np.max(np.abs(map_A_to_B(a.z) - flux.z)) > 1e-8


def test_batched_reconstruction():
    grid = Grid1D(16)
    st = initial_state("mhd-b", "alfven", grid)
    batch = np.stack([st.z, 2 * st.z], axis=1)
    u = reconstruct_u("mhd-b", batch, grid)
    np.testing.assert_allclose(u[:, 0], reconstruct_u("mhd-b", st.z, grid))


def test_plan_steps():
    st = initial_state("gas1d", "acoustic", Grid1D(32))
    dt, n, stride = plan_steps(st, 0.2)
    assert n * dt == pytest.approx(0.2) and stride == 1
    assert dt <= 0.4 * st.grid.dx / max_signal_speed(st) + 1e-15
    dt, n, stride = plan_steps(st, 0.2, dt_out=0.05)
    assert n == 4 * stride
    for bad in (dict(t_end=-1), dict(t_end=0.2, dt=-1e-3), dict(t_end=0.2, cfl=0),
                dict(t_end=0.2, dt_out=0.07)):
        with pytest.raises(ConfigError):
            plan_steps(st, **bad)


def test_history_meta_and_uniform_times():
    st = initial_state("gas1d", "acoustic", Grid1D(32))
    h = simulate(st, 0.1, dt_out=0.025)
    assert h.n_times == 5
    assert h.dt_out == pytest.approx(0.025)
    assert h.meta["dt"] > 0


def test_initial_condition_errors():
    g = Grid1D(16)
    with pytest.raises(ConfigError):
        initial_state("gas1d", "vortex", g)
    with pytest.raises(ConfigError):
        initial_state("gas1d", "acoustic", g, wobble=1)
    with pytest.raises(ConfigError):
        initial_state("gas1d", "alfven", g)
    with pytest.raises(ConfigError):
        initial_state("gas1d", "uniform", g, rho0=-1)
    with pytest.raises(ConfigError):
        Grid1D(4)
    with pytest.raises(UsageError):
        State("gas1d", g, np.ones((5, 9)))


def test_solver_abort_carries_snapshot():
    st = initial_state("gas1d", "acoustic", Grid1D(32), amp=0.9)
    with pytest.raises(SolverAbort) as info:
        for _ in range(50):
            st = step(st, 0.5)
    assert info.value.snapshot is not None
    assert np.all(np.isfinite(info.value.snapshot.z))


def test_rhs_gas_at_rest_is_drift():
    p = EosParams()
    g = Grid1D(8)
    z = np.zeros((5, 8))
    z[1] = 1.0
    r = rhs_gas1d(z, g, p)
    _, _, h, T = eos_eval(p, 1.0, 0.0)
    np.testing.assert_allclose(r[4], -h)
    np.testing.assert_allclose(r[3], -T)
    np.testing.assert_array_equal(r[1], 0.0)
