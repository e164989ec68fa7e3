import math

import mpmath
import numpy as np
import pytest

from curvebounds import constructions as cons
from curvebounds.curves import norms, sample
from curvebounds.errors import InvalidArgumentError


def _d_mp(h):
    """Independent high-precision d(h): minimize the squared distance by Newton on its derivative."""
    mpmath.mp.dps = 30
    h = mpmath.mpf(h)
    f = lambda t: (mpmath.cos(t) + 1) ** 2 + (2 * t / mpmath.pi * h) ** 2
    df = lambda t: mpmath.diff(f, t)
    grid = [-mpmath.pi / 2 + k * mpmath.pi / 400 for k in range(201)]
    t0 = min(grid, key=f)
    cands = [f(-mpmath.pi / 2), f(0)]
    try:
        t = mpmath.findroot(df, t0)
        if -mpmath.pi / 2 <= t <= 0:
            cands.append(f(t))
    except ValueError:
        pass
    return mpmath.sqrt(min(cands))


def test_gamma_h_corners_and_length():
    h = 1.7
    g = cons.gamma_h(h)
    assert np.allclose(g.corners(), cons.gamma_h_corners(h), atol=1e-12)
    assert g.length() == pytest.approx(cons.gamma_h_length(h), rel=1e-14)
    pts = sample(g, 100).points
    assert np.allclose(np.hypot(pts[:, 0], pts[:, 1]), 1.0)
    assert np.abs(pts[:, 2]).max() == pytest.approx(h / 2)


def test_gamma_h_rejects_nonpositive_height():
    with pytest.raises(InvalidArgumentError):
        cons.gamma_h(0.0)


@pytest.mark.parametrize("h", [0.5, 1.5, 1.97, 2.5])
def test_d_of_h_against_mpmath(h):
    assert cons.d_of_h(h) == pytest.approx(float(_d_mp(h)), abs=1e-10)


def test_h0_is_the_fixed_point():
    h0 = cons.solve_h0()
    assert abs(cons.d_of_h(h0) - h0) < 1e-10
    mpmath.mp.dps = 30
    ref = mpmath.findroot(lambda h: _d_mp(h) - h, 1.97)
    assert h0 == pytest.approx(float(ref), abs=1e-9)


def test_h0_ratio_bounds():
    h0 = cons.solve_h0()
    ratio = cons.gamma_h_length(h0) / h0
    assert 5.114 < ratio < 5.1151
    assert ratio > cons.width_bound_closed()


def test_sweep_h_rows():
    rows = cons.sweep_h(1.0, 3.0, 5)
    assert len(rows) == 5
    for h, length, d, w, ratio in rows:
        assert w == min(h, d)
        assert ratio == pytest.approx(length / w)
    # the ratio is minimized near h0 along the sweep
    fine = cons.sweep_h(1.8, 2.2, 81)
    best = min(fine, key=lambda r: r[4])
    assert best[0] == pytest.approx(cons.solve_h0(), abs=0.01)


def test_l5_closed_form_length():
    curve = cons.l5_curve()
    assert curve.closed
    assert curve.length() == pytest.approx(cons.l5_length(), rel=1e-12)
    assert cons.l5_length() == pytest.approx(5.0903, abs=5e-4)


def test_l5_tangent_angle():
    rep = cons.l5_angle_report()
    assert rep["derived"] == pytest.approx(rep["atan(sqrt2/5)"], abs=1e-12)
    assert rep["length_with_atan(sqrt2/5)"] == pytest.approx(cons.l5_length(), rel=1e-12)


def test_l5_is_tetrahedrally_symmetric():
    q, m = cons._tetra_rotation()
    assert np.allclose(q @ q.T, np.eye(3), atol=1e-12)
    curve = cons.l5_curve()
    seg = curve.segments
    for k in range(3):
        moved = seg[3 * k].transformed(q, m - q @ m)
        assert np.allclose(moved.at(np.linspace(0, 1, 5)), seg[3 * k + 3].at(np.linspace(0, 1, 5)), atol=1e-12)


def test_l5_width_certificate():
    assert cons.l5_width_upper_bound() == pytest.approx(0.980582, abs=1e-4)
    assert cons.l5_width_upper_bound("geodesic") == pytest.approx(0.980364, abs=1e-6)
    ratio = cons.l5_length() / cons.l5_width_upper_bound()
    assert ratio >= 5.1911 - 1e-3
    assert ratio > 5.1151
    with pytest.raises(InvalidArgumentError):
        cons.l5_width_upper_bound("other")


def test_baseball_properties():
    ball = cons.baseball_curve()
    assert ball.length() == pytest.approx(4 * math.pi, abs=1e-12)
    big, small = norms(sample(ball, 500))
    assert big == pytest.approx(math.sqrt(2), abs=1e-12)
    # C1 joins: tangent directions agree at each junction
    for a, b in zip(ball.segments, ball.segments[1:] + ball.segments[:1]):
        eps = 1e-7
        ta = (a.at(1.0) - a.at(1 - eps)) / eps
        tb = (b.at(eps) - b.at(0.0)) / eps
        assert np.allclose(ta / np.linalg.norm(ta), tb / np.linalg.norm(tb), atol=1e-6)


def test_baseball_scale():
    assert cons.baseball_curve(2.0).length() == pytest.approx(8 * math.pi)


def test_bound_table_first_row():
    row = cons.bound_table(1)[0]
    assert row.open_w == pytest.approx(3.7669, abs=1e-4)
    assert row.closed_w == pytest.approx(math.sqrt(math.pi ** 2 + 16), abs=1e-12)
    assert row.closed_r == pytest.approx(6 * math.sqrt(3), abs=1e-12)
    assert row.open_r == pytest.approx(math.sqrt((math.pi + 2) ** 2 + 36), abs=1e-12)


def test_bound_table_grows_with_dimension():
    rows = cons.bound_table(5)
    for a, b in zip(rows, rows[1:]):
        assert b.open_w > a.open_w and b.open_r > a.open_r
        assert b.closed_w > a.closed_w and b.closed_r > a.closed_r
    with pytest.raises(InvalidArgumentError):
        cons.bound_table(0)


def test_dented_octagon_has_two_offending_edges():
    from curvebounds.curves import PolyCurve
    from curvebounds.horizon import line_distances
    from curvebounds.metrics import inspects_sphere

    loop = PolyCurve(cons.dented_octahedron_loop(), closed=True)
    assert len(loop) == 8
    assert inspects_sphere(loop)
    assert int(np.sum(line_distances(loop) < 1)) == 2
