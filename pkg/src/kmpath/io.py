"""CSV/JSON artifact readers and writers.

Every numeric CSV has a header row and stores doubles with 17 significant
digits, which round-trips IEEE binary64 exactly.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .fokker_planck import DensityField, PdeGrid
from .moments import BinnedMoments
from .simulate import IncrementPairs
from .transition import TransitionPath

FMT = "%.17g"


def _write(path, header, columns):
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    fmts = [FMT] * data.shape[1]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, data, fmt=fmts, delimiter=",")


def _read(path, header):
    path = Path(path)
    with open(path) as fh:
        got = fh.readline().strip().split(",")
    if got != list(header):
        raise ConfigError(f"{path.name}: expected header {','.join(header)}, found {','.join(got)}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(header):
        raise ConfigError(f"{path.name}: expected {len(header)} columns")
    return data


def write_pairs(path, pairs: IncrementPairs):
    _write(path, ["x", "dx", "delta_t"], [pairs.x, pairs.dx, np.full(len(pairs), pairs.delta_t)])


def read_pairs(path) -> IncrementPairs:
    d = _read(path, ["x", "dx", "delta_t"])
    dts = np.unique(d[:, 2])
    if dts.size != 1:
        raise ConfigError(f"{Path(path).name}: delta_t column must be constant")
    return IncrementPairs(d[:, 0].copy(), d[:, 1].copy(), float(dts[0]))


def write_bins(path, bins: BinnedMoments):
    _write(path, ["center", "count", "y1", "y2"], [bins.centers, bins.counts, bins.y1, bins.y2])


def read_bins(path, delta_t=float("nan")) -> BinnedMoments:
    d = _read(path, ["center", "count", "y1", "y2"])
    return BinnedMoments(d[:, 0].copy(), d[:, 2].copy(), d[:, 3].copy(),
                         d[:, 1].astype(np.int64), delta_t)


def write_cv_scan(path, rows):
    """``rows`` are ``(target, degree, q, delta)`` tuples."""
    with open(path, "w", newline="\n") as fh:
        fh.write("target,degree,q,delta\n")
        for target, degree, q, delta in rows:
            fh.write(f"{target},{int(degree)},{int(q)},{FMT % delta}\n")


def read_cv_scan(path):
    out = []
    with open(path) as fh:
        if fh.readline().strip() != "target,degree,q,delta":
            raise ConfigError(f"{Path(path).name}: bad header")
        for line in fh:
            t, n, q, d = line.strip().split(",")
            out.append((t, int(n), int(q), float(d)))
    return out


def write_field(path, fld: DensityField):
    """First row: ``t/x`` then the x grid. Then one row per level: ``t, v_1..v_n``."""
    g = fld.grid
    with open(path, "w", newline="\n") as fh:
        fh.write("t/x," + ",".join(FMT % v for v in g.x) + "\n")
        np.savetxt(fh, np.column_stack([g.t, fld.values]), fmt=FMT, delimiter=",")


def read_field(path, grid: PdeGrid, kind: str, anchor=float("nan")) -> DensityField:
    path = Path(path)
    with open(path) as fh:
        first = fh.readline().strip().split(",")
    if first[0] != "t/x":
        raise ConfigError(f"{path.name}: not a field file")
    x = np.array(first[1:], dtype=float)
    d = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if x.size != grid.n_x or not np.allclose(x, grid.x, rtol=0, atol=1e-12 * max(1, abs(grid.x_hi))):
        raise ConfigError(f"{path.name}: x grid does not match the configured grid")
    if d.shape[0] != grid.n_t + 1 or not np.allclose(d[:, 0], grid.t, rtol=0, atol=1e-12):
        raise ConfigError(f"{path.name}: time levels do not match the configured grid")
    vals = np.ascontiguousarray(d[:, 1:])
    vals.setflags(write=False)
    return DensityField(grid, vals, kind, anchor)


def write_path(path, tp: TransitionPath):
    _write(path, ["t", "x_m", "peak_density"], [tp.t, tp.x_m, tp.peak_density])


def read_path(path) -> TransitionPath:
    d = _read(path, ["t", "x_m", "peak_density"])
    return TransitionPath(d[:, 0].copy(), d[:, 1].copy(), d[:, 2].copy())


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
