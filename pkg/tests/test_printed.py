import numpy as np
import pytest

from conftest import random_state
from msymp.errors import UsageError
from msymp.exterior import structure_matrices
from msymp.printed import fixture_diff, printed_gas1d, printed_mhdA
from msymp.systems import gas1d_system, get_system, mhdA_system, mhdB_system


def test_gas1d_fixture_exact(rng):
    s = gas1d_system()
    for _ in range(20):
        z = random_state(s, rng)
        np.testing.assert_array_equal(structure_matrices(s, z), printed_gas1d(z))


def test_mhdB_fixture_matches(rng):
    s = mhdB_system()
    for _ in range(20):
        assert fixture_diff(s, random_state(s, rng)) == []


def test_mhdA_fixture_differs_only_in_gamma_A_block(rng):
    s = mhdA_system()
    z = random_state(s, rng)
    diff = fixture_diff(s, z)
    assert len(diff) == 12
    for d in diff:
        assert d["alpha"] > 0
        assert {d["i"][0], d["j"][0]} == {"A", "g"}


def test_mhdA_literal_rule_value():
    """K^1[gamma_1, A^3] is 4 under the literal rule and 0 from the one-forms."""
    z = np.zeros(15)
    z[0:3] = [4.0, 5.0, 6.0]
    z[3] = 1.0
    z[6:9] = [1.0, 2.0, 3.0]
    assert printed_mhdA(z)[1, 9, 8] == 4.0
    K = structure_matrices(mhdA_system(), z)
    assert K[1, 9, 8] == 0.0
    assert K[1, 9, 6] == 4.0        # K^k[gamma_s, A^s] = u^k with s = k = 1
    assert K[1, 10, 7] == 4.0


def test_no_fixture_for_unknown():
    s = get_system("gas1d")
    bad = s.__class__(**{**s.__dict__, "name": "other"})
    with pytest.raises(UsageError):
        fixture_diff(bad, np.ones(5))
