"""Two-point conditional density and the maximum likelihood transition path.

Given ``X(0) = x0`` and ``X(tf) = xf`` the density of ``X(t)`` is

    P(x, t) = Q(xf, tf | x, t) Q(x, t | x0, 0) / Q(xf, tf | x0, 0)

and the path is its pointwise-in-time maximiser. On a 1-D grid an exhaustive
argmax is already a global optimum; it is refined to sub-grid accuracy with a
three-point parabola.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .errors import ConfigError, UnreachableEndpointError
from .fokker_planck import DensityField, PdeGrid, grid_delta, pairing, solve_backward, solve_forward
from .model import SdeModel

NORMALIZER_FLOOR = 1e-300
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PathProblem:
    x0: float
    xf: float
    tf: float

    def __post_init__(self):
        for name in ("x0", "xf", "tf"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ConfigError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not self.tf > 0:
            raise ConfigError(f"tf must be positive, got {self.tf}")

    def check_grid(self, grid: PdeGrid):
        if not (grid.contains(self.x0) and grid.contains(self.xf)):
            raise ConfigError(
                f"x0={self.x0} and xf={self.xf} must lie strictly inside [{grid.x_lo}, {grid.x_hi}]")
        if not np.isclose(grid.t_f, self.tf, rtol=1e-12, atol=0):
            raise ConfigError(f"grid horizon {grid.t_f} differs from tf={self.tf}")

    def to_dict(self) -> dict:
        return {"x0": self.x0, "xf": self.xf, "tf": self.tf}


@dataclass(frozen=True)
class ConditionalDensity:
    grid: PdeGrid
    values: np.ndarray
    normalizer: float
    problem: PathProblem
    diagnostics: dict = field(default_factory=dict, compare=False)

    def interior_mass(self) -> np.ndarray:
        return self.values[1:-1] @ self.grid.weights()


@dataclass(frozen=True)
class TransitionPath:
    t: np.ndarray
    x_m: np.ndarray
    peak_density: np.ndarray
    ties: tuple[int, ...] = ()


def _interp(grid, row, x):
    return float(grid_delta(grid, x) @ (row * grid.weights()))


def conditional_density(forward: DensityField, backward: DensityField, problem: PathProblem,
                        normalizer_scale=1.0) -> ConditionalDensity:
    """Combine a forward solve from ``x0`` and a backward solve to ``(xf, tf)``.

    The normaliser is the trapezoid integral of ``backward * forward`` at the
    first stored level after 0, which avoids the delta-times-delta product at
    ``t = 0``. The two end levels are replaced by grid deltas at ``x0`` and
    ``xf``. ``normalizer_scale`` exists for testing that the path does not
    depend on the normaliser.
    """
    grid = forward.grid
    if backward.grid != grid:
        raise ConfigError("forward and backward fields must share one grid")
    if forward.kind != "forward" or backward.kind != "backward":
        raise ConfigError("expected one forward and one backward field")
    problem.check_grid(grid)
    if grid.n_t < 2:
        raise ConfigError("need at least two time steps to form an interior level")
    for fld, want in ((forward, problem.x0), (backward, problem.xf)):
        if np.isfinite(fld.anchor) and not np.isclose(fld.anchor, want, rtol=0, atol=1e-12):
            raise ConfigError(f"{fld.kind} field is anchored at {fld.anchor}, problem expects {want}")
    ck = pairing(forward, backward)
    normalizer = float(ck[1]) * normalizer_scale
    if not normalizer > NORMALIZER_FLOOR:
        raise UnreachableEndpointError(
            f"Q(xf={problem.xf}, tf={problem.tf} | x0={problem.x0}) = {normalizer:.3g}:"
            " the endpoint is unreachable on this horizon and domain")
    vals = forward.values * backward.values / normalizer
    vals[0] = grid_delta(grid, problem.x0)
    vals[-1] = grid_delta(grid, problem.xf)
    vals.setflags(write=False)
    direct = _interp(grid, forward.values[-1], problem.xf)
    mass = vals[1:-1] @ grid.weights()
    diag = {
        "normalizer": normalizer,
        "normalizer_direct": direct,
        "normalizer_rel_diff": abs(direct - normalizer) / normalizer,
        "chapman_kolmogorov_spread": float(np.ptp(ck[1:-1]) / abs(ck[1:-1].mean())) if grid.n_t > 2 else 0.0,
        "interior_mass_min": float(mass.min()),
        "interior_mass_max": float(mass.max()),
    }
    return ConditionalDensity(grid, vals, normalizer, problem, diag)


def _refine(x, row, j, dx):
    if j == 0 or j == row.size - 1:
        return x[j], row[j]
    y0, y1, y2 = row[j - 1], row[j], row[j + 1]
    curv = y0 - 2.0 * y1 + y2
    if not curv < 0:
        return x[j], y1
    off = 0.5 * (y0 - y2) / curv
    off = min(0.5, max(-0.5, off))
    return x[j] + off * dx, y1 - 0.25 * (y0 - y2) * off


def _is_tie(row):
    peaks, _ = find_peaks(np.concatenate(([-np.inf], row, [-np.inf])))
    if peaks.size < 2:
        return False
    top = np.sort(row[peaks - 1])[-2:]
    return top[1] - top[0] <= TIE_RTOL * top[1]


def most_probable_path(pa: ConditionalDensity) -> TransitionPath:
    """Per-level argmax of the conditional density, endpoints pinned.

    On a plateau the leftmost maximal node anchors the parabola fit. Levels
    whose two highest peaks agree to ``1e-12`` (relative) are reported in
    ``ties``.
    """
    grid = pa.grid
    x = grid.x
    n = grid.n_t + 1
    xm = np.empty(n)
    peak = np.empty(n)
    ties = []
    for m in range(1, n - 1):
        row = pa.values[m]
        j = int(np.argmax(row))
        xm[m], peak[m] = _refine(x, row, j, grid.dx)
        if _is_tie(row):
            ties.append(m)
    xm[0], xm[-1] = pa.problem.x0, pa.problem.xf
    peak[0] = pa.values[0].max()
    peak[-1] = pa.values[-1].max()
    return TransitionPath(grid.t.copy(), xm, peak, tuple(ties))


def path_for_learned_model(model: SdeModel, problem: PathProblem, grid: PdeGrid,
                           return_density=False):
    """Forward solve, backward solve, conditioning and argmax in one call."""
    problem.check_grid(grid)
    fwd = solve_forward(model, problem.x0, grid)
    bwd = solve_backward(model, problem.xf, grid)
    pa = conditional_density(fwd, bwd, problem)
    path = most_probable_path(pa)
    if return_density:
        return path, pa
    return path
