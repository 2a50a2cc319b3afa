"""Binned first and second conditional moments of the increments.

For each equal-width bin ``j`` of the start state,

    y1[j] = mean(dx / dt)        (drift target)
    y2[j] = mean(dx**2 / dt)     (squared-diffusion target)

``y2`` is the raw second moment. It carries an ``O(dt)`` bias of
``f(x)**2 dt`` relative to ``sigma**2(x)``, which is left uncorrected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, EmptyInputError, InsufficientDataError
from .simulate import IncrementPairs

AUTO_QUANTILES = (0.005, 0.995)


@dataclass(frozen=True)
class BinningConfig:
    n_bins: int = 50
    range: tuple[float, float] | str = "auto"
    min_count: int = 100

    def __post_init__(self):
        if int(self.n_bins) != self.n_bins or self.n_bins < 1:
            raise ConfigError(f"n_bins must be a positive integer, got {self.n_bins}")
        if int(self.min_count) != self.min_count or self.min_count < 1:
            raise ConfigError(f"min_count must be a positive integer, got {self.min_count}")
        if isinstance(self.range, str):
            if self.range != "auto":
                raise ConfigError(f"range must be 'auto' or [lo, hi], got {self.range!r}")
        else:
            lo, hi = map(float, self.range)
            if not lo < hi:
                raise ConfigError(f"binning range requires lo < hi, got [{lo}, {hi}]")
            object.__setattr__(self, "range", (lo, hi))

    def resolve_range(self, x) -> tuple[float, float]:
        if self.range != "auto":
            return self.range
        lo, hi = np.quantile(x, AUTO_QUANTILES)
        if not lo < hi:
            raise InsufficientDataError("data has no spread; cannot choose a binning range")
        return float(lo), float(hi)


@dataclass(frozen=True)
class BinnedMoments:
    centers: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    counts: np.ndarray
    delta_t: float
    edges: tuple[float, float] = (np.nan, np.nan)
    n_dropped: int = 0

    def __len__(self):
        return self.centers.size


def bin_moments(pairs: IncrementPairs, cfg: BinningConfig = BinningConfig()) -> BinnedMoments:
    """Estimate the binned drift and squared-diffusion targets.

    Pairs are assigned to bin ``floor(G (x - lo) / (hi - lo))``, with the
    right edge folded into the last bin and starts outside ``[lo, hi]``
    dropped. Bins with fewer than ``min_count`` pairs are removed.
    ``n_dropped`` counts every pair not represented in a kept bin.
    """
    if len(pairs) == 0:
        raise EmptyInputError("no increment pairs")
    if not pairs.delta_t > 0:
        raise ConfigError(f"delta_t must be positive, got {pairs.delta_t}")
    G = int(cfg.n_bins)
    if G < 2:
        raise InsufficientDataError(f"at least two bins are needed to fit a model, got n_bins={G}")
    lo, hi = cfg.resolve_range(pairs.x)
    counts, s1, s2 = _kernels.bin_sums(pairs.x, pairs.dx, float(lo), float(hi), G)
    keep = counts >= cfg.min_count
    if not keep.any():
        raise InsufficientDataError(
            f"no bin reaches min_count={cfg.min_count} (largest bin holds {counts.max()} pairs)")
    width = (hi - lo) / G
    centers = lo + (np.arange(G) + 0.5) * width
    n = counts[keep]
    dt = pairs.delta_t
    return BinnedMoments(
        centers=centers[keep],
        y1=s1[keep] / n / dt,
        y2=s2[keep] / n / dt,
        counts=n,
        delta_t=dt,
        edges=(lo, hi),
        n_dropped=int(len(pairs) - n.sum()),
    )
