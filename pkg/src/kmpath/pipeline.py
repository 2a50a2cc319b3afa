"""Pipeline stages over persisted artifacts.

Each stage reads its inputs from ``output_dir`` and writes its outputs
there, so running the stages one by one gives the same files as
:func:`run_pipeline`.

====================  =================================  ===========================
stage                 reads                              writes
====================  =================================  ===========================
simulate              config                             pairs.csv, simulation.json
estimate              pairs.csv (or ``pairs_file``)      bins.csv
fit                   bins.csv                           model.json, cv_scan.csv,
                                                         fit_report.json
solve-fp              model.json                         forward.csv, backward.csv
path                  forward.csv, backward.csv          path.csv,
                                                         path_diagnostics.json,
                                                         path_true.csv (known model)
====================  =================================  ===========================
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from . import io
from .config import PipelineConfig
from .errors import ConfigError, KmpathError
from .fokker_planck import solve_backward, solve_forward
from .model import PolynomialDictionary, SdeModel, build_design_matrix
from .moments import bin_moments
from .simulate import extract_pairs, simulate_em
from .ssr import dictionary_size_scan, select_model
from .transition import conditional_density, most_probable_path, path_for_learned_model

log = logging.getLogger("kmpath")

STAGES = ("simulate", "estimate", "fit", "solve-fp", "path")


class StageError(KmpathError):
    """A stage failed; ``cause`` is the original error."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage={stage}: {type(cause).__name__}: {cause}")


def _out(cfg: PipelineConfig) -> Path:
    p = Path(cfg.output_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _need(path: Path, stage: str) -> Path:
    if not path.exists():
        raise ConfigError(f"{path} not found; run the stage that produces it before '{stage}'")
    return path


def stage_simulate(cfg: PipelineConfig):
    if cfg.model is None:
        raise ConfigError('nothing to simulate: model is "from-data"')
    out = _out(cfg)
    traj = simulate_em(cfg.model, cfg.simulation)
    pairs = extract_pairs(traj)
    io.write_pairs(out / "pairs.csv", pairs)
    io.write_json(out / "simulation.json",
                  {"model": cfg.model.to_dict(), "simulation": cfg.simulation.to_dict(),
                   "n_pairs": len(pairs)})
    log.info("simulate: %d pairs", len(pairs))
    return pairs


def stage_estimate(cfg: PipelineConfig):
    out = _out(cfg)
    src = Path(cfg.pairs_file) if cfg.model is None else out / "pairs.csv"
    pairs = io.read_pairs(_need(src, "estimate"))
    bins = bin_moments(pairs, cfg.binning)
    io.write_bins(out / "bins.csv", bins)
    log.info("estimate: %d bins kept, %d pairs dropped", len(bins), bins.n_dropped)
    return bins


def _fit_target(x, y, weights, reg, degree):
    X = build_design_matrix(x, PolynomialDictionary(degree))
    return select_model(X, y, k=reg.k, fold_seed=reg.fold_seed, one_se=reg.one_se, weights=weights)


def stage_fit(cfg: PipelineConfig):
    out = _out(cfg)
    bins = io.read_bins(_need(out / "bins.csv", "fit"))
    reg = cfg.regression
    w = bins.counts.astype(float) if reg.weighted else None
    rows = []
    report = {}
    coeffs = {}
    for target, y, degree in (("drift", bins.y1, reg.degree_drift), ("diff2", bins.y2, reg.degree_diff)):
        for score in dictionary_size_scan(bins.centers, y, reg.max_degree_scan, k=reg.k,
                                          fold_seed=reg.fold_seed, one_se=reg.one_se, weights=w):
            rows.extend((target, score.degree, q, d) for q, d in enumerate(score.report.delta))
        rep = _fit_target(bins.centers, y, w, reg, degree)
        coeffs[target] = rep.selected_coeffs
        report[target] = {
            "degree": degree,
            "selected_q": rep.selected_q,
            "support": list(rep.support),
            "coeffs": [float(c) for c in rep.selected_coeffs],
            "delta": [float(d) for d in rep.delta],
            "delta_se": [float(s) for s in rep.delta_se],
        }
    model = SdeModel(coeffs["drift"], coeffs["diff2"])
    io.write_json(out / "model.json", model.to_dict())
    io.write_cv_scan(out / "cv_scan.csv", rows)
    report.update(k=reg.k, fold_seed=reg.fold_seed, one_se=reg.one_se, weighted=reg.weighted,
                  n_bins=len(bins))
    io.write_json(out / "fit_report.json", report)
    log.info("fit: drift support %s, diff2 support %s",
             report["drift"]["support"], report["diff2"]["support"])
    return model


def _read_model(path: Path) -> SdeModel:
    return SdeModel.from_json(path.read_text())


def stage_solve_fp(cfg: PipelineConfig):
    out = _out(cfg)
    model = _read_model(_need(out / "model.json", "solve-fp"))
    grid = cfg.grid
    fwd = solve_forward(model, cfg.problem.x0, grid)
    bwd = solve_backward(model, cfg.problem.xf, grid)
    io.write_field(out / "forward.csv", fwd)
    io.write_field(out / "backward.csv", bwd)
    log.info("solve-fp: %d levels, %d substeps", grid.n_t, fwd.diagnostics["substeps"])
    return fwd, bwd


def stage_path(cfg: PipelineConfig):
    out = _out(cfg)
    grid = cfg.grid
    fwd = io.read_field(_need(out / "forward.csv", "path"), grid, "forward", cfg.problem.x0)
    bwd = io.read_field(_need(out / "backward.csv", "path"), grid, "backward", cfg.problem.xf)
    pa = conditional_density(fwd, bwd, cfg.problem)
    path = most_probable_path(pa)
    io.write_path(out / "path.csv", path)
    diag = dict(pa.diagnostics)
    diag["ties"] = list(path.ties)
    if path.ties:
        log.warning("path: %d levels with tied maxima", len(path.ties))
    if cfg.compare_true_path:
        true_path = path_for_learned_model(cfg.model, cfg.problem, grid)
        io.write_path(out / "path_true.csv", true_path)
        diag["max_abs_deviation_from_true"] = float(np.max(np.abs(path.x_m - true_path.x_m)))
    diag["problem"] = cfg.problem.to_dict()
    diag["grid"] = grid.to_dict()
    io.write_json(out / "path_diagnostics.json", diag)
    return path


STAGE_FUNCS = {
    "simulate": stage_simulate,
    "estimate": stage_estimate,
    "fit": stage_fit,
    "solve-fp": stage_solve_fp,
    "path": stage_path,
}


def run_stage(name: str, cfg: PipelineConfig):
    """Run one stage; failures come back as :class:`StageError`."""
    try:
        return STAGE_FUNCS[name](cfg)
    except KmpathError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, FloatingPointError, np.linalg.LinAlgError, OSError) as exc:
        raise StageError(name, exc) from exc


def write_manifest(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    files = sorted(p for p in out.iterdir() if p.is_file() and p.name != "manifest.json")
    manifest = {
        "config": cfg.resolved(),
        "files": {p.name: io.sha256(p) for p in files},
    }
    io.write_json(out / "manifest.json", manifest)
    return manifest


def run_pipeline(cfg: PipelineConfig) -> dict:
    """All stages in order, then ``manifest.json``. Returns the manifest.

    Artifacts written before a failure stay on disk.
    """
    for name in STAGES:
        if name == "simulate" and cfg.model is None:
            continue
        run_stage(name, cfg)
    return write_manifest(cfg)
