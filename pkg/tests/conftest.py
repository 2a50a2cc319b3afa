import json

import pytest

SMALL = {
    "model": {"drift": [0.0, 4.0, 0.0, -1.0], "diff2": [1.0]},
    "simulation": {"dt": 0.001, "n_steps": 400, "n_paths": 300, "x0": [-3.0, 3.0], "seed": 7},
    "binning": {"n_bins": 30, "range": "auto", "min_count": 50},
    "regression": {"k": 5, "fold_seed": 3, "max_degree_scan": [1, 3], "degree_drift": 3,
                   "degree_diff": 3},
    "pde": {"x_lo": -5.0, "x_hi": 5.0, "n_x": 201},
    "problem": {"x0": -2.0, "xf": 2.0, "tf": 1.0},
}


@pytest.fixture
def small_config(tmp_path):
    """Write a fast pipeline config; returns (path, dict)."""
    def make(**overrides):
        d = json.loads(json.dumps(SMALL))
        for key, val in overrides.items():
            if isinstance(val, dict) and isinstance(d.get(key), dict):
                d[key].update(val)
            else:
                d[key] = val
        d.setdefault("output_dir", str(tmp_path / "out"))
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(d))
        return p, d
    return make


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""
    def emit(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
