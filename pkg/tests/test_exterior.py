import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state
from msymp.errors import DomainError, UsageError
from msymp.exterior import (add_exact_form, assemble_residual, check_closure, exterior_derivative,
                            lagrangian_density, partials_fd_error, structure_matrices)
from msymp.systems import gas1d_system, get_system, mhdB_system

finite = st.floats(-10, 10, allow_nan=False)


def test_gas1d_k1_frozen():
    K = structure_matrices(gas1d_system(), np.array([3.0, 2.0, 1.0, 5.0, 7.0]))
    expected = np.array([
        [0, 0, 5, 0, -2],
        [0, 0, 0, 0, -3],
        [-5, 0, 0, -3, 0],
        [0, 0, 3, 0, 0],
        [2, 3, 0, 0, 0],
    ], dtype=float)
    np.testing.assert_array_equal(K[1], expected)


def test_gas1d_closure_frozen_point():
    s = gas1d_system()
    z = np.array([3.0, 2.0, 1.0, 5.0, 7.0])
    assert check_closure(s, 1, z) == 0.0
    assert check_closure(s, 1, z, method="fd") < 1e-9


def test_skew_and_closure_random(system, rng):
    for _ in range(10):
        z = random_state(system, rng)
        K = structure_matrices(system, z)
        assert np.max(np.abs(K + np.swapaxes(K, 1, 2))) == 0.0
        for a in range(system.n_indep):
            assert check_closure(system, a, z) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(u=finite, rho=st.floats(0.1, 10), S=finite, beta=finite, phi=finite)
def test_gas1d_skew_property(u, rho, S, beta, phi):
    K = structure_matrices(gas1d_system(), np.array([u, rho, S, beta, phi]))
    assert np.array_equal(K, -np.swapaxes(K, 1, 2))


def test_batched_matches_pointwise(rng):
    s = mhdB_system()
    zs = np.stack([random_state(s, rng) for _ in range(4)], axis=1)
    K = structure_matrices(s, zs)
    for k in range(4):
        np.testing.assert_array_equal(K[..., k], structure_matrices(s, zs[:, k]))


def test_partials_match_differences(system, rng):
    z = random_state(system, rng)
    for w in system.oneforms:
        assert partials_fd_error(w, z) < 1e-8


def test_exact_form_leaves_k_unchanged(rng):
    s = gas1d_system()
    w = s.oneforms[1]
    # Phi = rho * S * phi
    grad = lambda z: np.stack([0 * z[0], z[2] * z[4], z[1] * z[4], 0 * z[0], z[1] * z[2]])
    def hess(z):
        H = np.zeros((5, 5) + z.shape[1:])
        H[1, 2] = H[2, 1] = z[4]
        H[1, 4] = H[4, 1] = z[2]
        H[2, 4] = H[4, 2] = z[1]
        return H
    z = random_state(s, rng)
    w2 = add_exact_form(w, grad, hess)
    np.testing.assert_allclose(exterior_derivative(w2, z), exterior_derivative(w, z), atol=1e-15)
    assert not np.allclose(w2.coeffs(z), w.coeffs(z))


def test_nonpositive_density_rejected():
    z = np.array([0.0, -1.0, 0.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        structure_matrices(gas1d_system(), z)


def test_closure_needs_single_point():
    with pytest.raises(UsageError):
        check_closure(gas1d_system(), 0, np.ones((5, 3)))
    with pytest.raises(UsageError):
        check_closure(gas1d_system(), 0, np.ones(5), method="spline")


def test_residual_shape_checked():
    s = gas1d_system()
    with pytest.raises(UsageError):
        assemble_residual(s, np.ones(5), np.zeros((3, 5)))


def test_uniform_rest_residual_closed_form():
    """At rest with constant fields, the residual is -dH/dz."""
    s = gas1d_system()
    z = np.array([0.0, 1.3, 0.2, 0.0, 0.0])
    r = assemble_residual(s, z, np.zeros((2, 5)))
    np.testing.assert_allclose(r, -s.grad_hamiltonian(z), rtol=0, atol=0)


def test_lagrangian_density_static():
    s = get_system("gas1d")
    z = np.array([0.0, 1.3, 0.2, 0.0, 0.0])
    assert lagrangian_density(s, z, np.zeros((2, 5))) == pytest.approx(-s.hamiltonian(z))
