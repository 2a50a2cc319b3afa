"""The numba kernels and their numpy fallbacks must agree."""
import numpy as np
import pytest

from kmpath import _kernels
from kmpath._jit import HAS_NUMBA
from kmpath.fokker_planck import PdeGrid, fp_operator, grid_delta, step_schedule
from kmpath.model import double_well

pytestmark = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


def test_em_paths_agree():
    rng = np.random.default_rng(0)
    m = double_well("multiplicative")
    x0 = rng.uniform(-3, 3, 8)
    noise = rng.standard_normal((8, 500))
    a = _kernels.em_paths_jit(m.drift, m.diff2, x0, noise, 1e-3, 1e6, False)
    b = _kernels.em_paths_np(m.drift, m.diff2, x0, noise, 1e-3, 1e6, False)
    for u, v in zip(a, b):
        np.testing.assert_array_equal(u, v)


def test_em_paths_agree_on_divergence():
    x0 = np.array([0.5, 50.0])
    noise = np.zeros((2, 40))
    drift = np.array([0.0, 0.0, 0.0, 1.0])  # dx/dt = x^3 blows up
    diff2 = np.array([0.0])
    for hold in (False, True):
        a = _kernels.em_paths_jit(drift, diff2, x0, noise, 0.1, 1e6, hold)
        b = _kernels.em_paths_np(drift, diff2, x0, noise, 0.1, 1e6, hold)
        np.testing.assert_array_equal(a[1], b[1])
        np.testing.assert_array_equal(a[2], b[2])
        if hold:
            # frozen at the last value inside the guard, reported as OK
            assert a[1][1] == _kernels.OK
            assert 0 < a[0][1, -1] <= 1e6
            np.testing.assert_array_equal(a[0], b[0])
        else:
            assert a[1][1] == _kernels.DIVERGED


def test_bin_sums_agree():
    rng = np.random.default_rng(1)
    x = rng.normal(size=10_000) * 2
    dx = rng.normal(size=10_000)
    a = _kernels.bin_sums_jit(x, dx, -3.0, 3.0, 37)
    b = _kernels.bin_sums_np(x, dx, -3.0, 3.0, 37)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_allclose(a[1], b[1], rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(a[2], b[2], rtol=1e-12, atol=1e-12)


def test_march_agree():
    grid = PdeGrid(-6, 6, 121, 1.0, n_t=10)
    lo, di, up, _ = fp_operator(double_well(), grid)
    w = grid.weights()
    p0 = grid_delta(grid, -2.0)
    sched = step_schedule(40)
    a = _kernels.march_jit(lo, di, up, w, sched, grid.dt / 4, p0, 4)
    b = _kernels.march_np(lo, di, up, w, sched, grid.dt / 4, p0, 4)
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-13)


def test_env_flag_selects_numpy_fallback():
    import os
    import subprocess
    import sys
    code = ("import kmpath, kmpath._kernels as k; "
            "assert not kmpath.USE_JIT; assert k.em_paths is k.em_paths_np; "
            "assert k.march is k.march_np and k.bin_sums is k.bin_sums_np")
    env = dict(os.environ, KMPATH_DISABLE_JIT="1")
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
