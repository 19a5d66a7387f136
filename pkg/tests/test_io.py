import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msymp import serialize
from msymp.dynamics import initial_state, simulate
from msymp.errors import UsageError
from msymp.grid import Grid1D, RadialGrid, centered, centered_edge, ddx, require_uniform
from msymp.history import FieldHistory


@settings(max_examples=200)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_roundtrip(x):
    assert json.loads(serialize.dumps(x)) == x


def test_serializer_shapes():
    text = serialize.dumps({"a": np.array([1.0, 2.5]), "b": np.bool_(True), "c": None,
                            "d": math.inf, "e": np.int64(3), "f": (0.1,)}, indent=None)
    assert json.loads(text) == {"a": [1.0, 2.5], "b": True, "c": None, "d": None, "e": 3, "f": [0.1]}
    assert serialize.dumps(0.1) == "0.10000000000000001"
    assert serialize.dumps(2.0) == "2.0"
    with pytest.raises(TypeError):
        serialize.dumps(object())


def test_history_roundtrip_bit_exact(tmp_path):
    st = initial_state("mhd-b", "alfven", Grid1D(16))
    h = simulate(st, 0.02, meta={"note": "x"})
    h.save(tmp_path / "h")
    back = FieldHistory.load(tmp_path / "h")
    np.testing.assert_array_equal(back.data, h.data)
    np.testing.assert_array_equal(back.times, h.times)
    assert back.varnames == h.varnames and back.system == "mhd-b"
    assert back.meta["note"] == "x"
    first = (tmp_path / "h" / "snap_00000.csv").read_text().splitlines()[0]
    assert first.startswith("x,ux,uy,uz,rho")


def test_history_bytes_stable(tmp_path):
    for name in ("a", "b"):
        st = initial_state("gas1d", "acoustic", Grid1D(16))
        simulate(st, 0.02).save(tmp_path / name)
    for f in os.listdir(tmp_path / "a"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_history_load_errors(tmp_path):
    with pytest.raises(UsageError):
        FieldHistory.load(tmp_path)
    (tmp_path / "manifest.json").write_text('{"snapshots": []}')
    with pytest.raises(UsageError):
        FieldHistory.load(tmp_path)


def test_radial_history_roundtrip(tmp_path):
    g = RadialGrid(16)
    h = FieldHistory(g, [0.0, 0.1], np.ones((2, 5, 17)), ("u", "rho", "S", "beta", "phi"), system="gas1d")
    h.save(tmp_path)
    back = FieldHistory.load(tmp_path)
    assert isinstance(back.grid, RadialGrid) and back.data.shape == (2, 5, 17)


def test_stencils_second_order():
    errs = []
    for n in (32, 64, 128):
        g = Grid1D(n, 2 * np.pi)
        errs.append(np.max(np.abs(ddx(np.sin(g.x), g) - np.cos(g.x))))
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.01)
    r = RadialGrid(32)
    d = ddx(r.x**2, r)
    np.testing.assert_allclose(d, 2 * r.x, atol=1e-12)
    f = np.arange(10.0) ** 2
    c = centered(f, 1.0, 0, periodic=False)
    assert np.isnan(c[0]) and np.isnan(c[-1]) and c[3] == 6.0
    np.testing.assert_allclose(centered_edge(f, 1.0, 0), 2 * np.arange(10.0), atol=1e-12)


def test_require_uniform():
    assert require_uniform([0.0, 0.5, 1.0]) == 0.5
    with pytest.raises(UsageError):
        require_uniform([0.0, 0.5, 1.2])
