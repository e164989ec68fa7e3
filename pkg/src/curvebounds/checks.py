"""Reproduction checks for every published constant the library can recompute.

Each check returns a :class:`Check` row; ``run_checks`` collects them in a fixed
order.  The same rows back the ``verify-paper`` command.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import constructions as cons
from .curves import PolyCurve, sample, sample_count
from .horizon import (LOWER_BOUND, UPPER_FACTOR, horizon, horizon_by_counting, inner_integral_I,
                      is_efficient_inspection, line_distances, make_efficient, max_I,
                      verify_horizon_bounds)
from .integral import crofton_length_2d, decompose_length, min_max_norm_bound, spherical_crofton_length
from .metrics import inradius, inspects_sphere, width3d

BASEBALL_INSPECTION_DENSITY = 12_000.0
BASEBALL_METRIC_DENSITY = 300.0
BASEBALL_COUNTING_DENSITY = 150.0


@dataclass(frozen=True)
class Check:
    group: str
    name: str
    value: float
    target: str
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  [{self.group}] {self.name}: {self.value:.10g} (target {self.target})"


def _within(group, name, value, target, tol) -> Check:
    return Check(group, name, float(value), f"{target} ± {tol:g}", abs(value - target) <= tol)


def check_h0() -> list[Check]:
    h0 = cons.solve_h0()
    ratio = cons.gamma_h_length(h0) / cons.projected_width(h0)
    return [
        Check("h0", "h0 in (1.97078, 1.97080)", h0, "(1.97078, 1.97080)", 1.97078 < h0 < 1.97080),
        Check("h0", "L(h0)/w(h0) < 5.1151", ratio, "< 5.1151", ratio < 5.1151),
        Check("h0", "L(h0)/w(h0) > 5.114", ratio, "> 5.114", ratio > 5.114),
        Check("h0", "L(h0)/w(h0) > sqrt(pi^2+16)", ratio, f"> {cons.width_bound_closed():.6f}",
              ratio > cons.width_bound_closed()),
    ]


def check_gamma_width() -> list[Check]:
    h0 = cons.solve_h0()
    w, _ = width3d(sample_count(cons.gamma_h(h0), 1000))
    return [_within("width", "width3d(Gamma_h0, 4000 vertices) = h0", w, h0, 1e-3)]


def check_l5() -> list[Check]:
    length = cons.l5_length()
    cert = cons.l5_width_upper_bound()
    ratio = length / cert
    w, _ = width3d(sample(cons.l5_curve(), 2000))
    return [
        _within("L5", "L5 length = 5.0903", length, 5.0903, 5e-4),
        _within("L5", "L5 width certificate = 0.980582", cert, 0.980582, 1e-4),
        Check("L5", "L5 ratio >= 5.1911", ratio, ">= 5.1911 - 1e-3", ratio >= 5.1911 - 1e-3),
        Check("L5", "L5 ratio > Gamma_h0 ratio 5.1151", ratio, "> 5.1151", ratio > 5.1151),
        Check("L5", "width3d(L5) <= certificate", w, f"<= {cert + 1e-4:.6f}", w <= cert + 1e-4),
    ]


def check_baseball(n_mc: int = 100_000, seed: int = 42) -> list[Check]:
    curve = cons.baseball_curve()
    length = curve.length()
    dense = sample(curve, BASEBALL_INSPECTION_DENSITY)
    r, _ = inradius(sample(curve, BASEBALL_METRIC_DENSITY))
    h = horizon(dense)
    mc = horizon_by_counting(sample(curve, BASEBALL_COUNTING_DENSITY), n_mc, seed)
    lo, hv, hi = verify_horizon_bounds(dense)
    big_m, small_m, bound = min_max_norm_bound(curve)
    return [
        Check("baseball", "L = 4 pi", length, "4 pi exactly (1e-12)", abs(length - 4 * math.pi) <= 1e-12),
        _within("baseball", "inradius = 1", r, 1.0, 1e-4),
        Check("baseball", "inspects the unit sphere", float(inspects_sphere(dense)), "true", inspects_sphere(dense)),
        _within("baseball", "H = 8 pi (quadrature)", h.value, 8 * math.pi, 1e-3),
        Check("baseball", "H = 8 pi (counting, 3 sigma)", mc.value, f"8 pi ± {mc.abs_error:.3g}",
              abs(mc.value - 8 * math.pi) <= mc.abs_error),
        Check("baseball", "8 pi <= H <= 4 pi/(3 sqrt 3) L", hv, f"[{lo:.6f}, {hi:.6f}]",
              lo - 1e-6 * lo <= hv <= hi),
        _within("baseball", "norm bound 2 pi Mm/sqrt(M^2-1) = 4 pi", bound, 4 * math.pi, 1e-9),
    ]


def check_I() -> list[Check]:
    xs = np.linspace(1.05, 3.0, 20)
    err = float(np.max(np.abs(inner_integral_I(xs, 1 / xs) - 2 * math.pi * np.sqrt(xs ** 2 - 1) / xs ** 3)))
    value, x, _ = max_I(400, 400)
    return [
        Check("I(x,y)", "I(x,1/x) = 2 pi sqrt(x^2-1)/x^3 at 20 points", err, "max error <= 1e-10", err <= 1e-10),
        _within("I(x,y)", "max I on y >= 1/x = 4 pi/(3 sqrt 3)", value, UPPER_FACTOR, 1e-6),
        _within("I(x,y)", "argmax x^2 = 3/2", x * x, 1.5, 1e-4),
    ]


def check_integral(n_mc: int = 100_000, seed: int = 42) -> list[Check]:
    th = np.linspace(0, 2 * math.pi, 4000, endpoint=False)
    circle = PolyCurve(np.column_stack([np.cos(th), np.sin(th), np.zeros_like(th)]), closed=True)
    crofton = crofton_length_2d(circle, 10_000)
    h = 2.0
    length, l1, l2 = decompose_length(sample_count(cons.gamma_h(h), 2000),
                                      (np.array([[0, 0, 1.0]]), np.array([[1.0, 0, 0], [0, 1.0, 0]])))
    rel = abs(length ** 2 - (l1 ** 2 + l2 ** 2)) / length ** 2
    great = PolyCurve(circle.points[::2], closed=True)
    sph = spherical_crofton_length(great, math.pi / 4, n_mc, seed)
    return [
        _within("integral", "Crofton length of unit circle = 2 pi", crofton, 2 * math.pi, 1e-2),
        Check("integral", "L^2 = L_z^2 + L_xy^2 on Gamma_2", rel, "relative <= 1e-6", rel <= 1e-6),
        Check("integral", "spherical Crofton (great circle, rho = pi/4) = 2 pi", sph.value,
              f"2 pi ± {sph.abs_error:.3g}", abs(sph.value - 2 * math.pi) <= sph.abs_error),
    ]


def check_make_efficient() -> list[Check]:
    curve = PolyCurve(cons.dented_octahedron_loop(), closed=True)
    out, lengths = make_efficient(curve, return_history=True)
    d = float(line_distances(out).min())
    monotone = all(b <= a + 1e-12 for a, b in zip(lengths, lengths[1:]))
    return [
        Check("efficient", "output strictly shorter", out.length(), f"< {curve.length():.6f}",
              out.length() < curve.length()),
        Check("efficient", "length non-increasing at every step", float(len(lengths) - 1), "monotone", monotone),
        Check("efficient", "edge lines at distance >= 1 - 1e-9", d, ">= 1 - 1e-9", d >= 1 - 1e-9),
        Check("efficient", "inspection preserved", float(inspects_sphere(out)), "true", inspects_sphere(out)),
        Check("efficient", "output is an efficient inspection", float(is_efficient_inspection(out)), "true",
              is_efficient_inspection(out)),
    ]


def check_bound_table() -> list[Check]:
    row = cons.bound_table(1)[0]
    out = []
    for name, value, printed in (("open L/w", row.open_w, 3.7669), ("open L/r", row.open_r, 7.9104),
                                 ("closed L/w", row.closed_w, 5.0862), ("closed L/r", row.closed_r, 10.3923)):
        out.append(Check("bounds", f"k=1 {name} = {printed}", value, f"{printed} (4 decimals)",
                         abs(value - printed) < 1e-4))
    return out


CHECKS: dict[str, Callable[[], list[Check]]] = {
    "h0": check_h0,
    "width": check_gamma_width,
    "L5": check_l5,
    "baseball": check_baseball,
    "I(x,y)": check_I,
    "integral": check_integral,
    "efficient": check_make_efficient,
    "bounds": check_bound_table,
}


def run_checks(groups=None) -> list[tuple[Check, float]]:
    """Run the selected groups (all by default); returns rows with the group's runtime."""
    rows = []
    for key, fn in CHECKS.items():
        if groups is not None and key not in groups:
            continue
        t0 = time.perf_counter()
        results = fn()
        dt = time.perf_counter() - t0
        rows.extend((c, dt) for c in results)
    return rows
