import numpy as np
import pytest

from msymp.adjointb import (VectorField3, adjoint_identity_check, discrete_curl, random_periodic_field,
                            run_trials, v_b, v_dagger)
from msymp.errors import UsageError


@pytest.fixture
def fields():
    rng = np.random.default_rng(7)
    return [random_periodic_field(rng, 8) for _ in range(4)]


def test_identity_holds(fields):
    B, W = fields[:2]
    res = adjoint_identity_check(B, W)
    assert res["max_rel"] <= 1e-12


def test_linear_in_both_arguments(fields):
    B1, B2, W1, W2 = fields
    comb = lambda a, b: VectorField3(2.0 * a.components - 0.5 * b.components, a.spacing)   # noqa: E731
    lhs = v_b(comb(B1, B2), W1).components
    rhs = 2.0 * v_b(B1, W1).components - 0.5 * v_b(B2, W1).components
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    lhs = v_dagger(comb(W1, W2), B1).components
    rhs = 2.0 * v_dagger(W1, B1).components - 0.5 * v_dagger(W2, B1).components
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_divergence_free_reduction(fields):
    B = discrete_curl(fields[0])
    W = fields[1]
    div = sum(B.d(s, s) for s in range(3))
    assert np.max(np.abs(div)) < 1e-12
    reduced = np.stack([sum(W.components[s] * B.d(s, i) for s in range(3)) for i in range(3)])
    np.testing.assert_allclose(v_dagger(W, B).components, reduced, atol=1e-12)


def test_single_mode_closed_form():
    """B = (0, 0, sin x), W = (0, 0, cos x): both sides are zero component-wise."""
    n = 8
    x = np.arange(n) * 2 * np.pi / n
    X = np.meshgrid(x, x, x, indexing="ij")[0]
    h = 2 * np.pi / n
    B = VectorField3(np.stack([0 * X, 0 * X, np.sin(X)]), (h, h, h))
    W = VectorField3(np.stack([0 * X, 0 * X, np.cos(X)]), (h, h, h))
    res = adjoint_identity_check(B, W)
    np.testing.assert_allclose(res["lhs"], res["rhs"], atol=1e-13)


def test_trials_pass():
    rows = list(run_trials(8, 5, seed=3))
    assert len(rows) == 5 and all(r["max_rel"] <= 1e-12 for r in rows)


def test_shape_and_grid_errors(fields):
    with pytest.raises(UsageError):
        VectorField3(np.zeros((2, 4, 4, 4)))
    with pytest.raises(UsageError):
        VectorField3(np.full((3, 4, 4, 4), np.nan))
    other = VectorField3(np.zeros((3, 4, 4, 4)))
    with pytest.raises(UsageError):
        v_b(fields[0], other)
