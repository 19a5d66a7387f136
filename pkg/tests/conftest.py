import numpy as np
import pytest

from msymp.systems import get_system

TAU = 2 * np.pi


def random_state(system, rng):
    """Normal draws with an admissible density."""
    z = rng.normal(size=system.n_dep)
    z[system.index("rho")] = rng.uniform(0.5, 2.0)
    return z


def smooth_gas(T, X):
    w, s = TAU * X, TAU * T
    return np.stack([0.3 * np.sin(w + s), 1 + 0.2 * np.cos(w) * np.cos(s), 0.1 * np.sin(2 * w - s),
                     0.2 * np.cos(w + 2 * s), 0.3 * np.sin(w) * np.sin(s)])


def smooth_mhd(T, X):
    w, s = TAU * X, TAU * T
    z = np.stack([0.2 * np.sin((i % 3 + 1) * w + (i % 2 + 1) * s + 0.3 * i) for i in range(15)])
    z[3] = 1 + 0.2 * np.cos(w - s)
    return z


SMOOTH = {"gas1d": smooth_gas, "mhd-b": smooth_mhd, "mhd-a": smooth_mhd}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["gas1d", "mhd-b", "mhd-a"])
def system(request):
    return get_system(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
