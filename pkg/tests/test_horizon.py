import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvebounds import constructions as cons
from curvebounds.curves import PolyCurve, sample
from curvebounds.errors import DomainError, InternalInconsistencyError, InvalidArgumentError
from curvebounds.horizon import (LOWER_BOUND, UPPER_FACTOR, abs_cos_integral, boundary_maximum,
                                 constant_norm_horizon, frame_sample, horizon, horizon_by_counting,
                                 horizon_diagnostics, horizon_full_quadrature, i_grid, inner_integral_I,
                                 is_efficient_inspection, line_distances, make_efficient, max_I,
                                 verify_horizon_bounds)
from curvebounds.metrics import inspects_sphere

from conftest import circle


def _j_reference(a, b):
    mpmath.mp.dps = 40
    f = lambda t: abs(a * mpmath.cos(t) + b)
    if abs(b) < abs(a):
        t0 = mpmath.acos(-mpmath.mpf(b) / a)
        return float(mpmath.quad(f, [0, t0, 2 * mpmath.pi - t0, 2 * mpmath.pi]))
    return float(mpmath.quad(f, [0, 2 * mpmath.pi]))


@pytest.mark.parametrize("a,b", [(1.0, 0.0), (1.0, 0.3), (0.7, -0.5), (0.2, 0.9), (2.0, 2.0), (0.0, 1.5),
                                 (3.0, 1e-8)])
def test_abs_cos_integral_against_mpmath(a, b):
    assert abs_cos_integral(a, b) == pytest.approx(_j_reference(a, b), rel=1e-14, abs=1e-15)


@pytest.mark.parametrize("c", [math.sqrt(2), 2.0])
def test_circle_horizon_matches_closed_form(c):
    # equatorial circle and an off-centre small circle of the radius-c sphere; the
    # inscribed polygon sits inside the sphere by the sagitta, so the error is O(n^-2)
    for make in (lambda n: circle(n, c), lambda n: circle(n, math.sqrt(c * c - 1), 1.0)):
        errs = []
        for n in (1000, 2000):
            curve = make(n)
            exact = constant_norm_horizon(curve.length(), c)
            errs.append(abs(horizon(curve).value - exact) / exact)
        assert errs[1] < 2e-6
        assert errs[1] < 0.3 * errs[0]
        curve = make(2000)
        assert horizon_full_quadrature(curve).value == pytest.approx(horizon(curve).value, rel=1e-6)


def test_horizon_agrees_with_full_quadrature_on_polygon():
    curve = PolyCurve([[2, 0, 0.3], [0, 3, -0.4], [-2.5, -1, 1.2], [0.4, -2, -2]], closed=True)
    assert horizon(curve).value == pytest.approx(horizon_full_quadrature(curve, 8192).value, rel=1e-6)


def test_far_away_loop_is_tiny():
    far = circle(400, 0.5).transformed(translation=[100, 0, 0])
    h = horizon(far)
    assert 0 < h.value < 4 * far.length() / 100
    mc = horizon_by_counting(far, 200_000)
    assert abs(mc.value - h.value) <= mc.abs_error + h.abs_error


@pytest.mark.parametrize("curve", [
    circle(500, 1.5),
    circle(500, 2.0, 0.7),
    PolyCurve([[2, 0, 0.3], [0, 3, -0.4], [-2.5, -1, 1.2], [0.4, -2, -2]], closed=True),
    PolyCurve([[1.5, -3, 0], [1.5, 3, 0], [4, 3, 2]]),
])
def test_counting_agrees_with_quadrature(curve):
    h = horizon(curve)
    mc = horizon_by_counting(curve, 200_000, seed=42)
    assert abs(mc.value - h.value) <= mc.abs_error + h.abs_error


def test_counting_is_reproducible():
    c = circle(300, 2.0)
    assert horizon_by_counting(c, 10_000, seed=5) == horizon_by_counting(c, 10_000, seed=5)


def test_horizon_rejects_curve_meeting_sphere():
    with pytest.raises(DomainError):
        horizon(circle(100, 1.0))
    with pytest.raises(DomainError):
        horizon(PolyCurve([[-3, 0.5, 0], [3, 0.5, 0]]))


def test_doubled_curve_doubles_horizon():
    c = sample(cons.baseball_curve(), 300)
    assert horizon(c.repeated(2)).value == pytest.approx(2 * horizon(c).value, rel=1e-12)


def test_baseball_sandwich():
    dense = sample(cons.baseball_curve(), 12_000)
    assert is_efficient_inspection(dense)
    lo, h, hi = verify_horizon_bounds(dense)
    assert lo == LOWER_BOUND
    assert h == pytest.approx(8 * math.pi, abs=1e-3)
    assert hi == pytest.approx(UPPER_FACTOR * 4 * math.pi, rel=1e-9)


def test_scaled_baseball_is_not_an_inspection_curve():
    assert not inspects_sphere(sample(cons.baseball_curve(0.95), 2000))
    assert not is_efficient_inspection(sample(cons.baseball_curve(0.95), 2000))


def test_chord_through_sphere_is_not_efficient():
    # octahedron vertices visited so that every other edge is a diameter
    e = 2 * np.eye(3)
    loop = PolyCurve(np.vstack([e[0], -e[0], e[1], -e[1], e[2], -e[2]]), closed=True)
    assert not inspects_sphere(loop)
    assert not is_efficient_inspection(loop)
    # the same vertices as a convex loop are efficient: edge lines at distance √2
    good = PolyCurve(np.vstack([e[0], e[1], e[2], -e[0], -e[1], -e[2]]), closed=True)
    assert line_distances(good).min() == pytest.approx(math.sqrt(2))
    assert is_efficient_inspection(good)


def test_make_efficient_on_dented_octagon():
    curve = PolyCurve(cons.dented_octahedron_loop(), closed=True)
    assert inspects_sphere(curve)
    assert int(np.sum(line_distances(curve) < 1)) == 2
    out, lengths = make_efficient(curve, return_history=True)
    assert out.length() < curve.length()
    assert all(b <= a + 1e-12 for a, b in zip(lengths, lengths[1:]))
    assert line_distances(out).min() >= 1 - 1e-9
    assert inspects_sphere(out)


def test_make_efficient_leaves_efficient_curve_alone():
    sq = PolyCurve([[2, 2, -2], [-2, 2, 2], [-2, -2, -2], [2, -2, 2]], closed=True)
    if is_efficient_inspection(sq):
        assert make_efficient(sq) is sq


def test_make_efficient_rejects_non_inspection():
    with pytest.raises(InvalidArgumentError):
        make_efficient(circle(50, 3.0))


def test_inner_integral_boundary_identity():
    xs = np.linspace(1.05, 3.0, 20)
    want = 2 * math.pi * np.sqrt(xs ** 2 - 1) / xs ** 3
    assert np.max(np.abs(inner_integral_I(xs, 1 / xs) - want)) <= 1e-12


def test_inner_integral_domain():
    with pytest.raises(InvalidArgumentError):
        inner_integral_I(0.5, 0.5)
    with pytest.raises(InvalidArgumentError):
        inner_integral_I(2.0, 1.5)


@settings(max_examples=200, deadline=None)
@given(st.floats(1.0, 50.0), st.floats(0.0, 1.0))
def test_inner_integral_bounded_on_efficient_region(x, s):
    y = min(1.0, 1 / x + s * (1 - 1 / x))
    assert inner_integral_I(x, y) <= UPPER_FACTOR + 1e-12


def test_max_I_and_argmax():
    value, x, y = max_I(400, 400)
    assert value == pytest.approx(UPPER_FACTOR, abs=1e-6)
    assert x * x == pytest.approx(1.5, abs=1e-4)
    assert y == pytest.approx(1 / x, abs=1e-4)
    bval, bx = boundary_maximum()
    assert bval == pytest.approx(UPPER_FACTOR, abs=1e-12)
    assert bx == pytest.approx(math.sqrt(1.5), abs=1e-6)


def test_i_grid_shape():
    X, Y, Z = i_grid(5, 7)
    assert X.shape == Y.shape == Z.shape == (5, 7)
    assert np.all(Y >= 1 / X - 1e-15)


def test_frame_sample_and_diagnostics():
    c = circle(400, 2.0)
    fs = frame_sample(c, 0.3)
    assert fs.alpha == pytest.approx(math.pi / 2, abs=1e-2)
    assert fs.h == pytest.approx(0.5, abs=1e-4)
    rows = horizon_diagnostics(c)
    assert len(rows) == 400
    assert sum(r["contribution"] for r in rows) == pytest.approx(horizon(c).value, rel=1e-9)
    assert not any(r["radial"] for r in rows)


def test_radial_edge_is_flagged():
    rows = horizon_diagnostics(PolyCurve([[2, 0, 0], [5, 0, 0], [5, 3, 0]]))
    assert rows[0]["radial"] and not rows[1]["radial"]


def test_sandwich_violation_would_raise():
    # a non-closed input is refused rather than checked
    with pytest.raises(InvalidArgumentError):
        verify_horizon_bounds(PolyCurve([[2, 0, 0], [0, 2, 0]]))
    assert issubclass(InternalInconsistencyError, RuntimeError)
