"""Closed-form curves: the cylinder family Γ_h, Zalgaller's L5 curve, the
baseball-stitches curve, plus the scalar constants and bound formulas built on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import Arc, Helix, Line, PiecewiseCurve
from .errors import InvalidArgumentError
from .search import bisect, golden_section

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

# planar constants quoted from the literature, not recomputed here
CALIPER_RATIO = 2.2782  # Zalgaller's caliper curve, L/w
HORSESHOE_RATIO = math.pi + 2  # Joris' horseshoe, L/r


def caliper_constant() -> float:
    return CALIPER_RATIO


def horseshoe_constant() -> float:
    return HORSESHOE_RATIO


# ---------------------------------------------------------------------------
# Γ_h on the unit cylinder


@dataclass(frozen=True)
class GammaHParams:
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise InvalidArgumentError("cylinder height h must be positive")


def gamma_h_corners(h: float) -> np.ndarray:
    return np.array([[1, 0, h / 2], [0, 1, -h / 2], [-1, 0, h / 2], [0, -1, -h / 2]], dtype=float)


def gamma_h(h: float) -> PiecewiseCurve:
    """Closed curve of four helical arcs on x²+y²=1 joining the corners p1..p4 cyclically."""
    GammaHParams(h)
    segs = []
    for k in range(4):
        th0, th1 = k * math.pi / 2, (k + 1) * math.pi / 2
        z0 = h / 2 if k % 2 == 0 else -h / 2
        pitch = -z0 * 2 / (math.pi / 2)
        segs.append(Helix((0.0, 0.0, z0 - pitch * th0), (0.0, 0.0, 1.0), 1.0, pitch, th0, th1))
    return PiecewiseCurve(tuple(segs), closed=True)


def gamma_h_length(h: float) -> float:
    return math.hypot(4 * h, 2 * math.pi)


def _d_sq(t: float, h: float) -> float:
    return (math.cos(t) + 1) ** 2 + (2 * t / math.pi * h) ** 2


def d_of_h(h: float) -> float:
    """Distance from the tip p1 to the opposite branch of the xz-projection of Γ_h."""
    if not h > 0:
        raise InvalidArgumentError("h must be positive")
    ts = np.linspace(-math.pi / 2, 0.0, 101)
    vals = (np.cos(ts) + 1) ** 2 + (2 * ts / math.pi * h) ** 2
    k = int(np.argmin(vals))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, len(ts) - 1)]
    _, best = golden_section(lambda t: _d_sq(t, h), lo, hi, tol=1e-12)
    best = min(best, _d_sq(-math.pi / 2, h), _d_sq(0.0, h))
    return math.sqrt(best)


def projected_width(h: float) -> float:
    """Width of Γ_h, equal to the width of its xz-projection: min(h, d(h))."""
    return min(h, d_of_h(h))


def solve_h0(tol: float = 1e-12) -> float:
    """Root of d(h) = h in [1.9, 2.0]."""
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    g = lambda h: d_of_h(h) - h  # noqa: E731
    return bisect(g, 1.9, 2.0, tol=min(tol, 1e-12))


def sweep_h(h_from: float, h_to: float, steps: int) -> list[tuple[float, float, float, float, float]]:
    """Rows ``(h, L(h), d(h), w(h), L/w)`` over an even grid of heights."""
    rows = []
    for h in np.linspace(h_from, h_to, steps):
        L, d = gamma_h_length(h), d_of_h(h)
        w = min(h, d)
        rows.append((float(h), L, d, w, L / w))
    return rows


# ---------------------------------------------------------------------------
# Zalgaller's L5 curve


def tetrahedron() -> dict[str, np.ndarray]:
    """Regular tetrahedron with edge √2 (width 1) in the coordinates used for L5."""
    return {
        "A": np.array([1.0, SQRT2 / 2, 0.0]),
        "B": np.array([1.0, -SQRT2 / 2, 0.0]),
        "C": np.array([0.0, 0.0, SQRT2 / 2]),
        "D": np.array([0.0, 0.0, -SQRT2 / 2]),
    }


@dataclass(frozen=True)
class L5Geometry:
    a_prime: np.ndarray
    b_prime: np.ndarray
    height: float  # z of A', i.e. half the rise of one quarter piece
    tangent_angle: float  # polar angle of the tangent point E-bar on the unit circle
    projected_piece_length: float  # L of the xy-projection of A'B'
    piece_length: float
    slope: float  # rise per unit of projected arclength


def l5_geometry() -> L5Geometry:
    t = tetrahedron()
    a_prime = (1 - SQRT3 / 2) * t["C"] + SQRT3 / 2 * t["A"]
    b_prime = (1 - SQRT3 / 2) * t["D"] + SQRT3 / 2 * t["B"]
    height = float(a_prime[2])
    ax, ay = a_prime[:2]
    rho = math.hypot(ax, ay)
    # tangent point E on the unit circle: <E - A', E> = 0  <=>  <A', E> = 1
    theta = math.atan2(ay, ax) - math.acos(1 / rho)
    straight = math.sqrt(rho * rho - 1)
    proj = 2 * straight + 2 * theta
    return L5Geometry(a_prime, b_prime, height, theta, proj,
                      math.hypot(proj, 2 * height), height / (proj / 2))


def l5_angle_report() -> dict[str, float]:
    """Compare the derived tangent angle with the two printed closed forms."""
    g = l5_geometry()
    return {
        "derived": g.tangent_angle,
        "atan(sqrt2/5)": math.atan(SQRT2 / 5),
        "atan(sqrt5/2)": math.atan(math.sqrt(5) / 2),
        "length_with_atan(sqrt2/5)": 4 * math.hypot(1 / SQRT2 + 2 * math.atan(SQRT2 / 5), 2 * g.height),
        "length_with_atan(sqrt5/2)": 4 * math.hypot(1 / SQRT2 + 2 * math.atan(math.sqrt(5) / 2), 2 * g.height),
    }


def _tetra_rotation() -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal map (about the centroid) cycling A -> B -> C -> D -> A."""
    t = tetrahedron()
    m = sum(t.values()) / 4
    x = np.column_stack([t["A"] - m, t["B"] - m, t["C"] - m])
    y = np.column_stack([t["B"] - m, t["C"] - m, t["D"] - m])
    return y @ np.linalg.inv(x), m


def l5_curve() -> PiecewiseCurve:
    """Four congruent pieces A'B', B'C', C'D', D'A'.

    Each piece is the shortest path between its ends outside the unit cylinder
    about the opposite tetrahedron edge: straight segment, helical arc, straight
    segment, with constant rise per unit of projected arclength.
    """
    g = l5_geometry()
    th = g.tangent_angle
    e = np.array([math.cos(th), math.sin(th), g.slope * th])
    f = np.array([math.cos(th), -math.sin(th), -g.slope * th])
    piece = [
        Line(g.a_prime, e),
        Helix((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), 1.0, g.slope, th, -th),
        Line(f, g.b_prime),
    ]
    q, m = _tetra_rotation()
    segs = []
    current = piece
    for _ in range(4):
        segs.extend(current)
        current = [s.transformed(q, m - q @ m) for s in current]
    return PiecewiseCurve(tuple(segs), closed=True)


def l5_length() -> float:
    return 4 * l5_geometry().piece_length


def l5_width_upper_bound(height_rule: str = "scaled") -> float:
    """Width certificate 2‖Ẽ − M̃‖ from projecting along u = (0, 1, 1)/√2.

    ``height_rule`` picks the height of E.  ``"scaled"`` scales the linear height
    rule by L(Z)/8 (the full 3-D length), which reproduces 0.980582;
    ``"geodesic"`` uses half the projected piece length, which is the height of E
    on the constructed curve and gives 0.980364.
    """
    g = l5_geometry()
    th = g.tangent_angle
    if height_rule == "scaled":
        z_e = g.height / (l5_length() / 8) * th
    elif height_rule == "geodesic":
        z_e = g.slope * th
    else:
        raise InvalidArgumentError(f"unknown height rule {height_rule!r}")
    e = np.array([5 / (3 * SQRT3), SQRT2 / (3 * SQRT3), z_e])
    m = np.array([0.5, 0.0, 0.0])
    u = np.array([0.0, 1.0, 1.0]) / SQRT2
    et, mt = e - (e @ u) * u, m - (m @ u) * u
    return 2 * float(np.linalg.norm(et - mt))


# ---------------------------------------------------------------------------
# Baseball stitches


def baseball_curve(scale: float = 1.0) -> PiecewiseCurve:
    """Four unit semicircles on the sphere of radius √2, joined C¹.

    The semicircles lie in the planes x = ±1 and z = ±1 (each tangent to the unit
    sphere).  The x = ±1 halves bulge towards +y and the z = ±1 halves towards
    -y; consecutive arcs share the endpoints (±1, 0, ±1).
    """
    arcs = [
        Arc((1, 0, 0), 1, (0, 0, -1), (0, 1, 0), 0, math.pi),
        Arc((0, 0, 1), 1, (1, 0, 0), (0, -1, 0), 0, math.pi),
        Arc((-1, 0, 0), 1, (0, 0, 1), (0, 1, 0), 0, math.pi),
        Arc((0, 0, -1), 1, (-1, 0, 0), (0, -1, 0), 0, math.pi),
    ]
    curve = PiecewiseCurve(tuple(arcs), closed=True)
    if scale != 1.0:
        curve = PiecewiseCurve(tuple(Arc(a.center * scale, a.radius * scale, a.u, a.v, a.theta0, a.theta1)
                                     for a in arcs), closed=True)
    return curve


# ---------------------------------------------------------------------------
# Bound formulas


@dataclass(frozen=True)
class BoundTableRow:
    k: int
    open_w: float
    open_r: float
    closed_w: float
    closed_r: float


def bound_table(k_max: int) -> list[BoundTableRow]:
    """Lower bounds on L/w and L/r for curves in R^(2+k), k = 1..k_max."""
    if k_max < 1:
        raise InvalidArgumentError("k_max must be >= 1")
    rows = []
    for k in range(1, k_max + 1):
        rows.append(BoundTableRow(
            k,
            math.sqrt(CALIPER_RATIO ** 2 + 9 * k),
            math.sqrt(HORSESHOE_RATIO ** 2 + 36 * k),
            math.sqrt(math.pi ** 2 + 16 * k),
            math.sqrt((6 * SQRT3) ** 2 + 64 * (k - 1)),
        ))
    return rows


def width_bound_open() -> float:
    return math.hypot(3, CALIPER_RATIO)


def width_bound_closed() -> float:
    return math.hypot(4, math.pi)


def inradius_bound_open() -> float:
    return math.hypot(6, HORSESHOE_RATIO)


def inradius_bound_closed() -> float:
    return 6 * SQRT3


# ---------------------------------------------------------------------------
# Inspection curve with offending edges


def dented_octahedron_loop() -> np.ndarray:
    """Closed octagon inspecting the unit sphere with two edge lines entering it.

    Six vertices are the octahedron ±2e_i (inradius 2/√3 > 1); two more are
    pushed in close to the sphere, so the edges leaving (±2, 0, 0) point into it.
    """
    return np.array([
        [2.0, 0.0, 0.0], [1.0, 0.3, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0],
        [-2.0, 0.0, 0.0], [-1.0, -0.3, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -2.0],
    ])
