import numpy as np
import pytest

from gridscale.plots import iterations_scatter_svg, scatter_fit_svg, spy_svg
from gridscale.regression import fit_loglog
from gridscale.sparsekit import from_dense, identity
from gridscale.ybus import UpsilonSpec, assemble, generate_upsilon
from conftest import ieee34_sized_network


def test_spy_identity_two_marks(tmp_path):
    path = tmp_path / "spy.svg"
    spy_svg(identity(2), path)
    text = path.read_text()
    # frame rect + background + one rect per stored entry
    marks = text.count('fill="#1f3d7a"')
    assert marks == 2
    assert text.startswith("<?xml")
    assert "</svg>" in text


def test_spy_mark_count_matches_nnz(tmp_path):
    m = assemble(ieee34_sized_network()).y_full
    path = tmp_path / "ybus.svg"
    spy_svg(m, path, title="admittance pattern")
    assert path.read_text().count('fill="#1f3d7a"') == m.nnz == 804
    u = generate_upsilon(UpsilonSpec(n=104, p=2.5, seed=0))
    path2 = tmp_path / "ups.svg"
    spy_svg(u, path2)
    assert path2.read_text().count('fill="#1f3d7a"') == u.nnz == 780


def test_spy_byte_stable(tmp_path):
    m = from_dense(np.diag([1.0, 2.0, 3.0]))
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    spy_svg(m, p1)
    spy_svg(m, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_scatter_points_on_fit_line_for_exact_power_law(tmp_path):
    pts = [(n, 1e-6 * n ** 1.2) for n in (100, 1000, 10000, 100000)]
    rep = fit_loglog(pts)
    path = tmp_path / "sc.svg"
    scatter_fit_svg(pts, rep, path, title="exact power law")
    text = path.read_text()
    assert text.count("<circle") == 4
    assert "stroke-dasharray" in text
    assert "alpha = 1.200" in text


def test_scatter_byte_stable(tmp_path):
    pts = [(10, 1e-5), (100, 1e-4), (1000, 1.1e-3)]
    rep = fit_loglog(pts)
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    scatter_fit_svg(pts, rep, p1)
    scatter_fit_svg(pts, rep, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_scatter_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        scatter_fit_svg([], None, tmp_path / "x.svg")


def test_iterations_scatter(tmp_path):
    pts = [(100, 4), (1000, 5), (10000, 4), (100000, 5)]
    path = tmp_path / "it.svg"
    iterations_scatter_svg(pts, path, title="iterations vs size")
    text = path.read_text()
    assert text.count("<circle") == 4
    assert "iterations" in text
