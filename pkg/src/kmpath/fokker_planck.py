"""Forward Fokker-Planck and backward Kolmogorov solves in one dimension.

Forward:   dQ/dt = -d/dx (f Q) + 1/2 d2/dx2 (sigma2 Q),   Q(x, 0) = delta(x - x0)
Backward:  du/dt + f du/dx + 1/2 sigma2 d2u/dx2 = 0,       u(x, tf) = delta(x - xf)

Space is a node-centred finite-volume grid on ``[x_lo, x_hi]`` (half cells
at the two ends) with zero-flux walls. Face fluxes use the Chang-Cooper
weighting written in Scharfetter-Gummel form,

    F = (D / dx) * (B(-w) p_j - B(w) p_{j+1}),   B(w) = w / (exp(w) - 1),
    w = A dx / D,   A = f - 1/2 d(sigma2)/dx,   D = 1/2 sigma2,

which keeps the off-diagonals non-negative and reproduces the local
equilibrium ratio ``exp(w)`` exactly. Time stepping is Crank-Nicolson with
implicit Euler on the first and last two steps to damp the delta data.

The backward operator is the exact transpose of the forward one, and both
solves share one step schedule, so the discrete pairing
``sum_j w_j u_j(t) p_j(t)`` is conserved to rounding error.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, SolverFailure
from .model import SdeModel

EPS_DIFF = 1e-6
EPS_MASS = 1e-4
NEG_TOL = 1e-10
CFL_WARN = 5.0
STARTUP_STEPS = 2


@dataclass(frozen=True)
class PdeGrid:
    """Uniform space-time grid.

    ``n_t`` is the number of stored time levels after ``t = 0`` (default: the
    smallest count with level spacing <= dx). Each level is reached with
    ``substeps`` internal steps of the time integrator; ``None`` picks the
    smallest count for which the Crank-Nicolson step is positivity
    preserving for the model at hand (see :func:`positivity_substeps`).
    """

    x_lo: float = -6.0
    x_hi: float = 6.0
    n_x: int = 401
    t_f: float = 1.0
    n_t: int | None = None
    substeps: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.x_lo) and math.isfinite(self.x_hi) and self.x_lo < self.x_hi):
            raise ConfigError(f"invalid spatial domain [{self.x_lo}, {self.x_hi}]")
        if int(self.n_x) != self.n_x or self.n_x < 3:
            raise ConfigError(f"n_x must be an integer >= 3, got {self.n_x}")
        if not (math.isfinite(self.t_f) and self.t_f > 0):
            raise ConfigError(f"t_f must be positive, got {self.t_f}")
        if self.n_t is None:
            object.__setattr__(self, "n_t", max(1, math.ceil(self.t_f / self.dx - 1e-9)))
        if int(self.n_t) != self.n_t or self.n_t < 1:
            raise ConfigError(f"n_t must be a positive integer, got {self.n_t}")
        if self.substeps is not None:
            if int(self.substeps) != self.substeps or self.substeps < 1:
                raise ConfigError(f"substeps must be a positive integer, got {self.substeps}")
            object.__setattr__(self, "substeps", int(self.substeps))
        object.__setattr__(self, "n_x", int(self.n_x))
        object.__setattr__(self, "n_t", int(self.n_t))

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n_x - 1)

    @property
    def dt(self) -> float:
        """Spacing of stored time levels."""
        return self.t_f / self.n_t

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n_x)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.t_f, self.n_t + 1)

    def weights(self) -> np.ndarray:
        """Trapezoid weights; also the control-volume widths."""
        w = np.full(self.n_x, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w

    def contains(self, x) -> bool:
        return self.x_lo < x < self.x_hi

    def with_horizon(self, t_f, n_t=None) -> "PdeGrid":
        return PdeGrid(self.x_lo, self.x_hi, self.n_x, t_f, n_t, self.substeps)

    def to_dict(self) -> dict:
        return {"x_lo": self.x_lo, "x_hi": self.x_hi, "n_x": self.n_x,
                "t_f": self.t_f, "n_t": self.n_t, "substeps": self.substeps}


@dataclass(frozen=True)
class DensityField:
    grid: PdeGrid
    values: np.ndarray  # (n_t + 1, n_x), row m at time grid.t[m]
    kind: str  # "forward" | "backward"
    anchor: float = float("nan")  # x0 for forward, xf for backward
    diagnostics: dict = field(default_factory=dict, compare=False)

    def mass(self) -> np.ndarray:
        return self.values @ self.grid.weights()


def grid_delta(grid: PdeGrid, x0: float) -> np.ndarray:
    """Unit-mass point source on the grid.

    The mass is split between the two nodes bracketing ``x0`` with linear
    (hat) weights so that both the mass and the mean are exact. On a node
    this is the single spike of height ``1 / dx``.
    """
    if not grid.contains(x0):
        raise ConfigError(f"point {x0} is not strictly inside [{grid.x_lo}, {grid.x_hi}]")
    s = (x0 - grid.x_lo) / grid.dx
    j = min(int(math.floor(s)), grid.n_x - 2)
    frac = s - j
    if frac < 1e-12:
        frac = 0.0
    elif frac > 1 - 1e-12:
        j, frac = j + 1, 0.0
    w = grid.weights()
    out = np.zeros(grid.n_x)
    out[j] += (1.0 - frac) / w[j]
    if frac:
        out[j + 1] += frac / w[j + 1]
    return out


def _bernoulli(w):
    """``w / (exp(w) - 1)``, continuous through ``w = 0``."""
    w = np.asarray(w, dtype=float)
    out = np.ones_like(w)
    nz = np.abs(w) > 1e-10
    with np.errstate(over="ignore"):
        out[nz] = w[nz] / np.expm1(w[nz])
    small = ~nz
    out[small] = 1.0 - 0.5 * w[small]
    return out


def fp_operator(model: SdeModel, grid: PdeGrid, eps_diff=EPS_DIFF):
    """Tridiagonal bands ``(lower, diag, upper)`` of the flux-divergence operator L.

    ``W dp/dt = L p`` with ``W = diag(grid.weights())``. Columns of L sum to
    zero, so the trapezoid mass is an exact invariant. Also returns
    diagnostics about the diffusion floor.
    """
    x = grid.x
    dx = grid.dx
    xh = 0.5 * (x[:-1] + x[1:])
    s2_nodes = model.sigma2(x)
    s2_faces = model.sigma2(xh)
    eta_n = np.maximum(s2_nodes, eps_diff)
    eta_h = np.maximum(s2_faces, eps_diff)
    A = model.f(xh) - 0.5 * np.diff(eta_n) / dx
    D = 0.5 * eta_h
    w = A * dx / D
    cm = D / dx * _bernoulli(-w)  # multiplies p_j in F_{j+1/2}
    cp = D / dx * _bernoulli(w)   # multiplies p_{j+1}
    n = grid.n_x
    lo = np.zeros(n)
    up = np.zeros(n)
    di = np.zeros(n)
    lo[1:] = cm
    up[:-1] = cp
    di[1:] -= cp
    di[:-1] -= cm
    clamped = s2_nodes < eps_diff
    diag = {
        "clamped_nodes": int(clamped.sum()),
        "clamp_interval": [float(x[clamped].min()), float(x[clamped].max())] if clamped.any() else None,
        "min_sigma2": float(min(s2_nodes.min(), s2_faces.min())),
    }
    return lo, di, up, diag


def positivity_substeps(di, w, dt_level) -> int:
    """Substeps per stored level keeping ``W + dt/2 L`` entrywise non-negative.

    With that bound the explicit half of Crank-Nicolson is a non-negative
    matrix and the implicit half an inverse M-matrix, so the update maps
    non-negative data to non-negative data and cannot ring.
    """
    rate = float(np.max(-di / w))
    if rate <= 0:
        return 1
    return max(1, math.ceil(dt_level * rate / 2.0 * (1 + 1e-12)))


def step_schedule(n_steps: int, startup=STARTUP_STEPS) -> np.ndarray:
    """Theta per step: implicit Euler at both ends, Crank-Nicolson between.

    Symmetric in time, so a backward solve reusing it is the exact adjoint.
    """
    th = np.full(n_steps, 0.5)
    k = min(startup, n_steps)
    th[:k] = 1.0
    th[n_steps - k:] = 1.0
    return th


def _check_cfl(model, grid, substeps):
    dt = grid.dt / substeps
    fmax = np.max(np.abs(model.f(grid.x)))
    c = dt * fmax / grid.dx
    if c > CFL_WARN:
        warnings.warn(f"advective Courant number {c:.3g} exceeds {CFL_WARN}; accuracy may suffer",
                      RuntimeWarning, stacklevel=3)
    return float(c)


def _finish(values, kind, grid, anchor, diag):
    vmin = float(values.min())
    diag["min_value"] = vmin
    if vmin < -NEG_TOL:
        m, j = np.unravel_index(np.argmin(values), values.shape)
        raise SolverFailure(
            f"{kind} solve went negative ({vmin:.3g}) at t={grid.t[m]:.4g}, x={grid.x[j]:.4g};"
            " refine the time step (substeps)")
    np.maximum(values, 0.0, out=values)
    values.setflags(write=False)
    return DensityField(grid, values, kind, float(anchor), diag)


def solve_forward(model: SdeModel, x0: float, grid: PdeGrid, eps_diff=EPS_DIFF) -> DensityField:
    """Transition density ``Q(x, t | x0, 0)`` on every grid node and level."""
    lo, di, up, diag = fp_operator(model, grid, eps_diff)
    w = grid.weights()
    sub = grid.substeps or positivity_substeps(di, w, grid.dt)
    diag["substeps"] = sub
    diag["courant"] = _check_cfl(model, grid, sub)
    p0 = grid_delta(grid, x0)
    n_steps = grid.n_t * sub
    vals = _kernels.march(lo, di, up, w, step_schedule(n_steps), grid.dt / sub, p0, sub)
    mass = vals @ w
    drift = float(np.max(np.abs(mass - 1.0)))
    diag["mass_error"] = drift
    diag["boundary_density_max"] = float(max(vals[:, 0].max(), vals[:, -1].max()))
    if drift > EPS_MASS:
        raise SolverFailure(f"forward mass drifted by {drift:.3g} (> {EPS_MASS})")
    return _finish(vals, "forward", grid, x0, diag)


def solve_backward(model: SdeModel, xf: float, grid: PdeGrid, eps_diff=EPS_DIFF) -> DensityField:
    """``Q(xf, t_f | x, t)`` as a function of the starting point ``(x, t)``.

    Marched from ``t_f`` down to 0 with the transposed forward operator, which
    imposes the reflecting condition ``du/dx = 0`` at the walls.
    """
    lo, di, up, diag = fp_operator(model, grid, eps_diff)
    w = grid.weights()
    sub = grid.substeps or positivity_substeps(di, w, grid.dt)
    diag["substeps"] = sub
    diag["courant"] = _check_cfl(model, grid, sub)
    # transpose of a tridiagonal matrix: swap and shift the off-diagonals
    lo_t = np.zeros_like(lo)
    up_t = np.zeros_like(up)
    lo_t[1:] = up[:-1]
    up_t[:-1] = lo[1:]
    uf = grid_delta(grid, xf)
    n_steps = grid.n_t * sub
    sched = step_schedule(n_steps)[::-1].copy()
    vals = _kernels.march(lo_t, di, up_t, w, sched, grid.dt / sub, uf, sub)
    vals = np.ascontiguousarray(vals[::-1])
    diag["boundary_value_max"] = float(max(vals[:, 0].max(), vals[:, -1].max()))
    return _finish(vals, "backward", grid, xf, diag)


def pairing(forward: DensityField, backward: DensityField) -> np.ndarray:
    """``int u(x, t) Q(x, t | x0) dx`` per stored level (trapezoid rule)."""
    return np.einsum("mj,mj,j->m", backward.values, forward.values, forward.grid.weights())
