import numpy as np
import pytest

from kmpath import io
from kmpath.errors import ConfigError
from kmpath.fokker_planck import PdeGrid, solve_forward
from kmpath.model import double_well
from kmpath.moments import BinnedMoments
from kmpath.simulate import IncrementPairs
from kmpath.transition import TransitionPath


def test_pairs_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    p = IncrementPairs(rng.normal(size=100), rng.normal(size=100) * 1e-7, 1e-3)
    io.write_pairs(tmp_path / "p.csv", p)
    q = io.read_pairs(tmp_path / "p.csv")
    assert q.x.tobytes() == p.x.tobytes() and q.dx.tobytes() == p.dx.tobytes()
    assert q.delta_t == p.delta_t
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "x,dx,delta_t"


def test_bins_round_trip(tmp_path):
    b = BinnedMoments(np.array([0.25, 0.75]), np.array([2.0, 1 / 3]), np.array([5.0, np.pi]),
                      np.array([2, 1]), 1.0)
    io.write_bins(tmp_path / "b.csv", b)
    c = io.read_bins(tmp_path / "b.csv")
    np.testing.assert_array_equal(c.y1, b.y1)
    np.testing.assert_array_equal(c.y2, b.y2)
    np.testing.assert_array_equal(c.counts, b.counts)
    assert (tmp_path / "b.csv").read_text().splitlines()[0] == "center,count,y1,y2"


def test_field_round_trip(tmp_path):
    g = PdeGrid(-6, 6, 51, 1.0)
    f = solve_forward(double_well(), -2.0, g)
    io.write_field(tmp_path / "f.csv", f)
    h = io.read_field(tmp_path / "f.csv", g, "forward", -2.0)
    assert h.values.tobytes() == f.values.tobytes()
    with pytest.raises(ConfigError):
        io.read_field(tmp_path / "f.csv", PdeGrid(-6, 6, 53, 1.0), "forward")
    with pytest.raises(ConfigError):
        io.read_field(tmp_path / "f.csv", PdeGrid(-6, 6, 51, 1.0, n_t=7), "forward")


def test_path_and_scan_round_trip(tmp_path):
    tp = TransitionPath(np.linspace(0, 1, 5), np.array([-2, -1.1, 0.1, 1.3, 2.0]), np.arange(5.0))
    io.write_path(tmp_path / "p.csv", tp)
    back = io.read_path(tmp_path / "p.csv")
    np.testing.assert_array_equal(back.x_m, tp.x_m)
    rows = [("drift", 3, 0, 0.1), ("diff2", 5, 4, 1 / 3)]
    io.write_cv_scan(tmp_path / "s.csv", rows)
    assert io.read_cv_scan(tmp_path / "s.csv") == rows


def test_bad_header(tmp_path):
    (tmp_path / "x.csv").write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ConfigError):
        io.read_pairs(tmp_path / "x.csv")
