"""Pipeline configuration: one JSON document, unknown keys rejected."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .fokker_planck import PdeGrid
from .model import PolynomialDictionary, SdeModel
from .moments import BinningConfig
from .simulate import SimulationConfig
from .transition import PathProblem

BUNDLED = ("example1.json", "example2.json")


@dataclass(frozen=True)
class RegressionConfig:
    k: int = 10
    fold_seed: int = 0
    max_degree_scan: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    degree_drift: int = 5
    degree_diff: int = 5
    one_se: bool = False
    weighted: bool = False

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise ConfigError(f"k must be an integer >= 2, got {self.k}")
        if not isinstance(self.fold_seed, int) or not 0 <= self.fold_seed < 2**64:
            raise ConfigError(f"fold_seed must be an unsigned 64-bit integer, got {self.fold_seed!r}")
        scan = tuple(int(n) for n in self.max_degree_scan)
        if not scan:
            raise ConfigError("max_degree_scan must be non-empty")
        for n in scan + (self.degree_drift, self.degree_diff):
            PolynomialDictionary(n)
        object.__setattr__(self, "max_degree_scan", scan)


@dataclass(frozen=True)
class PdeConfig:
    x_lo: float = -6.0
    x_hi: float = 6.0
    n_x: int = 401
    n_t: int | None = None
    substeps: int | None = None

    def grid(self, t_f: float) -> PdeGrid:
        return PdeGrid(self.x_lo, self.x_hi, self.n_x, t_f, self.n_t, self.substeps)


@dataclass(frozen=True)
class PipelineConfig:
    model: SdeModel | None  # None: read pairs from ``pairs_file``
    simulation: SimulationConfig | None
    binning: BinningConfig
    regression: RegressionConfig
    pde: PdeConfig
    problem: PathProblem
    output_dir: str = "out"
    pairs_file: str | None = None
    compare_true_path: bool = True
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def grid(self) -> PdeGrid:
        return self.pde.grid(self.problem.tf)

    def resolved(self) -> dict:
        """Fully expanded configuration, defaults included."""
        return {
            "model": self.model.to_dict() if self.model is not None else "from-data",
            "pairs_file": self.pairs_file,
            "simulation": self.simulation.to_dict() if self.simulation else None,
            "binning": {"n_bins": self.binning.n_bins,
                        "range": self.binning.range if isinstance(self.binning.range, str)
                        else list(self.binning.range),
                        "min_count": self.binning.min_count},
            "regression": {f.name: (list(v) if isinstance(v := getattr(self.regression, f.name), tuple) else v)
                           for f in fields(RegressionConfig)},
            "pde": {f.name: getattr(self.pde, f.name) for f in fields(PdeConfig)},
            "problem": self.problem.to_dict(),
            "output_dir": self.output_dir,
            "compare_true_path": self.compare_true_path,
        }


def _strict(cls, d, section, required=()):
    if not isinstance(d, dict):
        raise ConfigError(f"[{section}] must be an object")
    allowed = {f.name for f in fields(cls)} - {"raw"}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"[{section}] unknown keys: {', '.join(sorted(unknown))}")
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError(f"[{section}] missing required keys: {', '.join(missing)}")
    try:
        return cls(**d)
    except ConfigError as exc:
        raise ConfigError(f"[{section}] {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {exc}") from None


TOP_KEYS = {"model", "simulation", "binning", "regression", "pde", "problem",
            "output_dir", "pairs_file", "compare_true_path"}


def parse_config(d: dict, seed_override=None, strict_repro=False) -> PipelineConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(d) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    if "problem" not in d:
        raise ConfigError("missing required section [problem]")

    model_d = d.get("model", "from-data")
    if model_d == "from-data":
        model = None
        if not d.get("pairs_file"):
            raise ConfigError('model "from-data" requires pairs_file')
    else:
        if not isinstance(model_d, dict):
            raise ConfigError('[model] must be an object or "from-data"')
        try:
            model = SdeModel.from_dict(model_d)
        except ConfigError as exc:
            raise ConfigError(f"[model] {exc}") from None

    sim = None
    if model is not None:
        sim_d = dict(d.get("simulation", {}))
        if strict_repro and "seed" not in sim_d and seed_override is None:
            raise ConfigError("--strict-repro: [simulation] seed must be given explicitly")
        if seed_override is not None:
            sim_d["seed"] = int(seed_override)
        if "x0" in sim_d and isinstance(sim_d["x0"], list):
            sim_d["x0"] = tuple(sim_d["x0"])
        sim = _strict(SimulationConfig, sim_d, "simulation")
    elif "simulation" in d:
        raise ConfigError('[simulation] is meaningless with model "from-data"')

    reg_d = dict(d.get("regression", {}))
    if strict_repro and "fold_seed" not in reg_d:
        raise ConfigError("--strict-repro: [regression] fold_seed must be given explicitly")
    reg = _strict(RegressionConfig, reg_d, "regression")
    binning = _strict(BinningConfig, dict(d.get("binning", {})), "binning")
    pde = _strict(PdeConfig, dict(d.get("pde", {})), "pde")
    problem = _strict(PathProblem, dict(d["problem"]), "problem", required=("x0", "xf", "tf"))
    try:
        problem.check_grid(pde.grid(problem.tf))
    except ConfigError as exc:
        raise ConfigError(f"[problem] {exc}") from None
    compare = d.get("compare_true_path", True)
    if not isinstance(compare, bool):
        raise ConfigError("compare_true_path must be a boolean")
    return PipelineConfig(model, sim, binning, reg, pde, problem,
                          output_dir=str(d.get("output_dir", "out")),
                          pairs_file=d.get("pairs_file"),
                          compare_true_path=compare and model is not None,
                          raw=d)


def bundled_config_path(name: str) -> Path | None:
    if not name.endswith(".json"):
        name += ".json"
    if name not in BUNDLED:
        return None
    return Path(str(resources.files("kmpath") / "configs" / name))


def load_config(path, seed_override=None, strict_repro=False) -> PipelineConfig:
    """Read a config file; bare names ``example1``/``example2`` resolve to the bundled ones."""
    p = Path(path)
    if not p.exists():
        bundled = bundled_config_path(p.name)
        if bundled is None:
            raise ConfigError(f"config file not found: {path}")
        p = bundled
    try:
        d = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from None
    return parse_config(d, seed_override=seed_override, strict_repro=strict_repro)
