import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvebounds import constructions as cons
from curvebounds.curves import PolyCurve, sample, sample_count
from curvebounds.errors import DomainError, InvalidArgumentError
from curvebounds.integral import (barbier_check, crofton_length_2d, decompose_length, min_max_norm_bound,
                                  norm_bound_value, projected_lengths, spherical_crofton_length)
from curvebounds.metrics import width2d

from conftest import circle, random_rotation

XY = (np.array([[1.0, 0, 0], [0, 1.0, 0]]), np.array([[0, 0, 1.0]]))
Z_FIRST = (np.array([[0, 0, 1.0]]), np.array([[1.0, 0, 0], [0, 1.0, 0]]))


def reuleaux(n_per_arc: int = 2000) -> PolyCurve:
    verts = np.array([[math.cos(a), math.sin(a)] for a in (math.pi / 2, math.pi / 2 + 2 * math.pi / 3,
                                                            math.pi / 2 + 4 * math.pi / 3)])
    w = math.sqrt(3)
    pts = []
    for k in range(3):
        c = verts[k]
        a, b = verts[(k + 1) % 3], verts[(k + 2) % 3]
        t0 = math.atan2(*(a - c)[::-1])
        t1 = t0 + math.pi / 3
        t = np.linspace(t0, t1, n_per_arc, endpoint=False)
        pts.append(c + w * np.column_stack([np.cos(t), np.sin(t)]))
    return PolyCurve(np.vstack(pts), closed=True)


def test_crofton_segment_and_square():
    seg = PolyCurve([[0, 0, 0], [1, 2, 0], [3, 3, 0]])
    assert crofton_length_2d(seg) == pytest.approx(seg.length(), rel=1e-6)
    sq = PolyCurve([[0, 0], [1, 0], [1, 1], [0, 1]], closed=True)
    assert crofton_length_2d(sq) == pytest.approx(4.0, rel=1e-6)


def test_crofton_unit_circle():
    assert crofton_length_2d(circle(4000), 10_000) == pytest.approx(2 * math.pi, abs=1e-2)


def test_crofton_in_tilted_plane():
    rng = np.random.default_rng(3)
    c = circle(1000).transformed(random_rotation(rng), [1, 2, 3])
    assert crofton_length_2d(c) == pytest.approx(c.length(), rel=1e-6)


def test_crofton_rejects_space_curve():
    with pytest.raises((InvalidArgumentError, DomainError)):
        crofton_length_2d(sample_count(cons.gamma_h(2.0), 20))


def test_barbier_reuleaux_and_circle():
    r = reuleaux()
    length, pw, ok = barbier_check(r)
    assert ok
    assert width2d(r) == pytest.approx(math.sqrt(3), rel=1e-6)
    assert length == pytest.approx(pw, rel=1e-6)
    length, pw, ok = barbier_check(PolyCurve([[0, 0], [2, 0], [2, 1], [0, 1]], closed=True))
    assert ok and length > pw


def test_projected_lengths_chunking():
    c = sample_count(cons.gamma_h(1.5), 50)
    dirs = np.random.default_rng(0).normal(size=(37, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    assert np.allclose(projected_lengths(c, dirs), projected_lengths(c, dirs, chunk=100))


@pytest.mark.parametrize("h", [0.5, 1.97, 2.0, 3.0])
def test_decompose_equality_on_gamma_h(h):
    # helices make a constant angle with the axis, so the split is Pythagorean
    length, l1, l2 = decompose_length(sample_count(cons.gamma_h(h), 2000), Z_FIRST)
    assert abs(length ** 2 - (l1 ** 2 + l2 ** 2)) / length ** 2 <= 1e-6
    assert l1 == pytest.approx(4 * h, rel=1e-12)
    assert l2 == pytest.approx(2 * math.pi, rel=1e-6)


def test_decompose_exact_gamma_h():
    length, l1, l2 = decompose_length(cons.gamma_h(2.0), Z_FIRST)
    assert length == pytest.approx(math.hypot(8, 2 * math.pi), rel=1e-6)
    assert length ** 2 == pytest.approx(l1 ** 2 + l2 ** 2, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decompose_inequality_on_random_polylines(seed):
    rng = np.random.default_rng(seed)
    c = PolyCurve(rng.normal(size=(int(rng.integers(2, 30)), 3)), bool(rng.integers(2)))
    q = random_rotation(rng)
    length, l1, l2 = decompose_length(c, (q[:1], q[1:]))
    assert length ** 2 >= l1 ** 2 + l2 ** 2 - 1e-9 * length ** 2
    assert max(l1, l2) <= length + 1e-12


def test_decompose_rejects_bad_split():
    with pytest.raises(InvalidArgumentError):
        decompose_length(circle(10), (np.array([[1.0, 0, 0]]), np.array([[0, 1.0, 0]])))


def test_spherical_crofton_great_circle():
    great = circle(2000)
    for rho in (math.pi / 2, math.pi / 4):
        est = spherical_crofton_length(great, rho, 100_000, seed=42)
        assert abs(est.value - 2 * math.pi) <= est.abs_error


def test_spherical_crofton_half_circle():
    th = np.linspace(0, math.pi, 1001)
    half = PolyCurve(np.column_stack([np.cos(th), np.sin(th), np.zeros_like(th)]))
    est = spherical_crofton_length(half, math.pi / 3, 100_000, seed=1)
    assert abs(est.value - math.pi) <= est.abs_error


def test_spherical_crofton_small_circle_rotation_invariant():
    small = circle(1500, math.sin(0.6), math.cos(0.6))
    rng = np.random.default_rng(9)
    a = spherical_crofton_length(small, math.pi / 4, 50_000, seed=3)
    b = spherical_crofton_length(small.transformed(random_rotation(rng)), math.pi / 4, 50_000, seed=3)
    exact = 2 * math.pi * math.sin(0.6)
    assert abs(a.value - exact) <= a.abs_error
    assert abs(b.value - exact) <= b.abs_error


def test_spherical_crofton_validation():
    with pytest.raises(InvalidArgumentError):
        spherical_crofton_length(circle(100, 2.0))
    with pytest.raises(InvalidArgumentError):
        spherical_crofton_length(circle(100), rho=2.0)


def test_norm_bound_equality_on_baseball():
    big_m, small_m, bound = min_max_norm_bound(cons.baseball_curve())
    assert big_m == pytest.approx(math.sqrt(2), abs=1e-12)
    assert small_m == pytest.approx(math.sqrt(2), abs=1e-12)
    assert bound == pytest.approx(4 * math.pi, abs=1e-9)


def test_norm_bound_at_least_4pi_for_small_max_norm():
    # M/√(M²−1) decreases, so for M <= 2/√3 and m >= 1 the bound is at least 4π
    for big_m in np.linspace(1.0001, 2 / math.sqrt(3), 200):
        assert norm_bound_value(big_m, 1.0) >= 4 * math.pi - 1e-9


def test_norm_bound_domain():
    with pytest.raises(DomainError):
        norm_bound_value(1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        min_max_norm_bound(PolyCurve([[2, 0, 0], [0, 2, 0]]))


def test_norm_bound_on_sampled_baseball():
    big_m, small_m, bound = min_max_norm_bound(sample(cons.baseball_curve(), 12_000))
    assert bound <= sample(cons.baseball_curve(), 12_000).length() + 1e-6
