"""Euler-Maruyama trajectories and lag-one increment pairs."""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from . import _kernels
from .errors import ConfigError, DivergenceError, ModelDomainError
from .model import SdeModel

DIVERGENCE_GUARD = 1e6


@dataclass(frozen=True)
class SimulationConfig:
    """Ensemble settings.

    ``x0`` is either a fixed start value or a two-element ``[a, b]`` for a
    uniform draw on that interval. Paths never stop at ``domain_clip``; it only
    filters increment pairs (and turns divergence into a frozen path instead
    of an error).
    """

    dt: float = 1e-3
    n_steps: int = 10_000
    n_paths: int = 100
    x0: float | tuple[float, float] = (-3.0, 3.0)
    seed: int = 0
    domain_clip: tuple[float, float] | None = None

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive and finite, got {self.dt}")
        for name in ("n_steps", "n_paths"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v}")
            object.__setattr__(self, name, int(v))
        if not np.isfinite(self.dt * self.n_steps):
            raise ConfigError("horizon dt * n_steps is not finite")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if isinstance(self.x0, (list, tuple)):
            a, b = map(float, self.x0)
            if not a <= b:
                raise ConfigError(f"x0 interval [{a}, {b}] is empty")
            object.__setattr__(self, "x0", (a, b))
        else:
            object.__setattr__(self, "x0", float(self.x0))
        if self.domain_clip is not None:
            lo, hi = map(float, self.domain_clip)
            if not lo < hi:
                raise ConfigError(f"domain_clip requires x_min < x_max, got [{lo}, {hi}]")
            object.__setattr__(self, "domain_clip", (lo, hi))

    @property
    def horizon(self) -> float:
        return self.dt * self.n_steps

    def to_dict(self) -> dict:
        d = asdict(self)
        d["x0"] = list(self.x0) if isinstance(self.x0, tuple) else self.x0
        d["domain_clip"] = list(self.domain_clip) if self.domain_clip else None
        return d


@dataclass(frozen=True)
class TrajectorySet:
    paths: np.ndarray  # (n_paths, n_steps + 1)
    dt: float
    seed: int
    domain_clip: tuple[float, float] | None = None


@dataclass(frozen=True)
class IncrementPairs:
    x: np.ndarray
    dx: np.ndarray
    delta_t: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        dx = np.asarray(self.dx, dtype=float)
        if x.shape != dx.shape or x.ndim != 1:
            raise ValueError("x and dx must be 1-D arrays of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "dx", dx)

    def __len__(self):
        return self.x.size


def path_generator(seed: int, index: int) -> np.random.Generator:
    """Philox stream for path ``index``; independent of the ensemble size."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def draw_path_inputs(cfg: SimulationConfig, index: int):
    """Start value and the standard-normal increments for one path."""
    rng = path_generator(cfg.seed, index)
    if isinstance(cfg.x0, tuple):
        x0 = rng.uniform(*cfg.x0)
    else:
        x0 = cfg.x0
    return x0, rng.standard_normal(cfg.n_steps)


def simulate_em(model: SdeModel, cfg: SimulationConfig) -> TrajectorySet:
    """Integrate ``n_paths`` independent Euler-Maruyama trajectories.

    ``X[k+1] = X[k] + f(X[k]) dt + sqrt(sigma2(X[k])) sqrt(dt) xi[k]``.

    Raises
    ------
    DivergenceError
        If ``|X|`` exceeds 1e6 and no ``domain_clip`` is set. With a clip the
        path is frozen at its last finite value instead; the frozen stretch
        lies outside the clip and is discarded by :func:`extract_pairs`.
    ModelDomainError
        If ``sigma2 < 0`` at a visited state.
    """
    x0 = np.empty(cfg.n_paths)
    noise = np.empty((cfg.n_paths, cfg.n_steps))
    for j in range(cfg.n_paths):
        x0[j], noise[j] = draw_path_inputs(cfg, j)
    hold = cfg.domain_clip is not None
    if hold and max(abs(cfg.domain_clip[0]), abs(cfg.domain_clip[1])) >= DIVERGENCE_GUARD:
        raise ConfigError("domain_clip must lie inside the divergence guard")
    paths, status, fail_step = _kernels.em_paths(
        model.drift, model.diff2, x0, noise, float(cfg.dt), DIVERGENCE_GUARD, hold)
    failed = np.flatnonzero(status)
    if failed.size:
        p = int(failed[0])
        k = int(fail_step[p])
        if status[p] == _kernels.NEGATIVE_DIFFUSION:
            x = paths[p, k]
            raise ModelDomainError(
                f"negative squared diffusion {model.sigma2(x):.4g} at x={x:.6g} (path {p}, step {k})")
        raise DivergenceError(p, k, paths[p, k])
    return TrajectorySet(paths, float(cfg.dt), int(cfg.seed), cfg.domain_clip)


def extract_pairs(traj: TrajectorySet, domain_clip=None) -> IncrementPairs:
    """Concatenate ``(X[k], X[k+1] - X[k])`` over all paths.

    Pairs whose start lies outside ``domain_clip`` (the argument, falling
    back to the clip the trajectories were simulated with) are dropped.
    """
    paths = np.atleast_2d(np.asarray(traj.paths, dtype=float))
    if paths.shape[1] < 2:
        raise ValueError("each path needs at least two points")
    x = paths[:, :-1].ravel()
    dx = np.diff(paths, axis=1).ravel()
    clip = domain_clip if domain_clip is not None else traj.domain_clip
    if clip is not None:
        keep = (x >= clip[0]) & (x <= clip[1])
        x, dx = x[keep], dx[keep]
    return IncrementPairs(x, dx, traj.dt)
