import warnings

import numpy as np
import pytest
from scipy import integrate

from kmpath.errors import ConfigError, SolverFailure
from kmpath.fokker_planck import (PdeGrid, _finish, fp_operator, grid_delta, pairing,
                                  positivity_substeps, solve_backward, solve_forward, step_schedule)
from kmpath.model import SdeModel, double_well, ornstein_uhlenbeck


def gauss(x, m, v):
    return np.exp(-(x - m) ** 2 / (2 * v)) / np.sqrt(2 * np.pi * v)


def ou_density(x, t, x0, theta=1.0, s=1.0):
    return gauss(x, x0 * np.exp(-theta * t), s * (1 - np.exp(-2 * theta * t)) / (2 * theta))


def test_grid_defaults_and_validation():
    g = PdeGrid()
    assert g.dx == pytest.approx(0.03)
    assert g.n_t == 34 and g.dt <= g.dx
    assert g.weights().sum() == pytest.approx(12.0)
    for kw in ({"x_lo": 1, "x_hi": 0}, {"n_x": 2}, {"t_f": 0}, {"n_t": 0}, {"substeps": 0}):
        with pytest.raises(ConfigError):
            PdeGrid(**kw)


def test_grid_delta_preserves_mass_and_mean():
    g = PdeGrid(-6, 6, 401, 1.0)
    w = g.weights()
    for x0 in (0.0, 1.0, -2.0, 1.2345, 5.99):
        d = grid_delta(g, x0)
        assert d @ w == pytest.approx(1.0, abs=1e-14)
        assert (d * g.x) @ w == pytest.approx(x0, abs=1e-12)
        assert np.count_nonzero(d) <= 2


def test_operator_columns_sum_to_zero():
    g = PdeGrid(-6, 6, 101, 1.0)
    lo, di, up, _ = fp_operator(double_well("multiplicative"), g)
    colsum = di.copy()
    colsum[:-1] += lo[1:]
    colsum[1:] += up[:-1]
    assert np.max(np.abs(colsum)) < 1e-10 * np.max(np.abs(di))


def test_heat_kernel_variance():
    s = 0.8
    g = PdeGrid(-6, 6, 401, 1.0)
    F = solve_forward(SdeModel([0.0], [s]), 0.0, g)
    w = g.weights()
    var = (F.values * g.x**2) @ w
    np.testing.assert_allclose(var, s * g.t, atol=2 * g.dx**2)


def test_ou_oracle():
    g = PdeGrid(-6, 6, 401, 1.0)
    F = solve_forward(ornstein_uhlenbeck(), 1.0, g)
    err = np.abs(F.values[1:] - ou_density(g.x[None], g.t[1:, None], 1.0)).max()
    assert err <= 1e-2
    assert np.max(np.abs(F.mass() - 1)) <= 1e-4
    assert F.values.min() >= 0
    assert not F.values.flags.writeable


def test_stationary_double_well():
    # symmetric start so that the slow inter-well exchange is not needed
    g = PdeGrid(-6, 6, 401, 8.0)
    F = solve_forward(double_well(), 0.0, g)

    def rho(z):
        return np.exp(-2 * (-2 * z**2 + z**4 / 4))
    Z, _ = integrate.quad(rho, -6, 6, points=[-2, 2])
    l1 = np.abs(F.values[-1] - rho(g.x) / Z) @ g.weights()
    assert l1 <= 2e-2


def test_backward_terminal_and_heat_kernel():
    s, tf, xf = 1.0, 1.0, 0.5
    g = PdeGrid(-6, 6, 401, tf)
    B = solve_backward(SdeModel([0.0], [s]), xf, g)
    np.testing.assert_array_equal(B.values[-1], grid_delta(g, xf))
    err = np.abs(B.values[:-1] - gauss(g.x[None], xf, s * (tf - g.t[:-1, None]))).max()
    assert err <= 1e-2


def test_chapman_kolmogorov_and_duality():
    g = PdeGrid(-6, 6, 401, 1.0)
    ou = ornstein_uhlenbeck()
    x0, xf = 1.0, -0.4
    F = solve_forward(ou, x0, g)
    B = solve_backward(ou, xf, g)
    ck = pairing(F, B)
    sel = (g.t >= 0.05) & (g.t <= 0.95)
    assert np.ptp(ck[sel]) / ck[sel].mean() <= 0.02
    # value of the backward field at (x0, 0) vs the forward field at (xf, tf)
    u0 = np.interp(x0, g.x, B.values[0])
    pf = np.interp(xf, g.x, F.values[-1])
    assert abs(u0 - pf) / pf <= 0.02
    assert abs(pf - ou_density(xf, 1.0, x0)) / pf <= 0.02


def test_grid_convergence():
    errs = []
    for n_x in (101, 201, 401):
        g = PdeGrid(-6, 6, n_x, 1.0)
        F = solve_forward(ornstein_uhlenbeck(), 1.0, g)
        errs.append(np.abs(F.values[-1] - ou_density(g.x, 1.0, 1.0)).max())
    assert errs[0] / errs[1] >= 2 and errs[1] / errs[2] >= 2


def test_diffusion_floor_is_reported():
    g = PdeGrid(-6, 6, 601, 1.0)  # x = -1 is a node
    _, _, _, diag = fp_operator(double_well("multiplicative"), g)
    assert diag["clamped_nodes"] >= 1
    lo, hi = diag["clamp_interval"]
    assert lo <= -1.0 <= hi
    assert diag["min_sigma2"] == pytest.approx(0.0, abs=1e-12)
    F = solve_forward(double_well("multiplicative"), 2.0, g)
    assert np.max(np.abs(F.mass() - 1)) <= 1e-4


def test_courant_warning():
    g = PdeGrid(-6, 6, 401, 1.0, n_t=2, substeps=1)
    with pytest.warns(RuntimeWarning, match="Courant"):
        solve_forward(double_well(), -2.0, g)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve_forward(double_well(), -2.0, PdeGrid(-6, 6, 401, 1.0))


def test_negative_field_is_a_failure():
    g = PdeGrid(-1, 1, 5, 1.0, n_t=1)
    bad = np.zeros((2, 5))
    bad[1, 2] = -1e-6
    with pytest.raises(SolverFailure):
        _finish(bad, "forward", g, 0.0, {})
    tiny = np.zeros((2, 5))
    tiny[1, 2] = -1e-12
    assert _finish(tiny, "forward", g, 0.0, {}).values.min() == 0.0


def test_schedule_and_substeps():
    th = step_schedule(10)
    assert list(th[:2]) == [1, 1] and list(th[-2:]) == [1, 1] and np.all(th[2:-2] == 0.5)
    np.testing.assert_array_equal(th, th[::-1])
    assert list(step_schedule(3)) == [1, 1, 1]
    g = PdeGrid(-6, 6, 401, 1.0)
    lo, di, up, _ = fp_operator(double_well(), g)
    n = positivity_substeps(di, g.weights(), g.dt)
    assert np.all(g.weights() + 0.5 * (g.dt / n) * di >= 0)
    assert positivity_substeps(np.zeros(3), np.ones(3), 1.0) == 1
