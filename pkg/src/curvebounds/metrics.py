"""Width, inradius and related extremal quantities of sampled curves."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull as _QHull
from scipy.spatial import QhullError
from scipy.stats import qmc

from . import constructions as cons
from .curves import ParamPoint, PiecewiseCurve, PolyCurve, as_polycurve
from .errors import InvalidArgumentError
from .hull import ConvexHull3, distance_to_boundary_inside, hull, min_distance_to_curve
from .search import fibonacci_sphere, lattice_spacing, pattern_search

log = logging.getLogger(__name__)

DEFAULT_WIDTH_TOL = 1e-6
DEFAULT_INRADIUS_TOL = 1e-5
BOUND_TOL = 1e-9


def _unit_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _perpendicular(u: np.ndarray) -> np.ndarray:
    ref = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    v = np.cross(u, ref)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# Width


def _widths(verts: np.ndarray, dirs: np.ndarray, chunk: int = 4096) -> np.ndarray:
    out = np.empty(len(dirs))
    for i in range(0, len(dirs), chunk):
        s = verts @ dirs[i:i + chunk].T
        out[i:i + chunk] = s.max(axis=0) - s.min(axis=0)
    return out


def _combinatorial_candidates(verts: np.ndarray, u: np.ndarray, k: int = 6) -> np.ndarray:
    """Normals of facets of the difference body near ``u``.

    Takes the ``k`` vertices closest to each support plane and returns the
    normals spanned by a pair on each side (edge-edge contacts) and by a triple
    on one side (facet-vertex contacts).  At an exact minimum the optimal
    direction is one of these.
    """
    s = verts @ u
    top = verts[np.argsort(-s)[:k]]
    bot = verts[np.argsort(s)[:k]]
    cands = []
    te = [a - b for a, b in combinations(top, 2)]
    be = [a - b for a, b in combinations(bot, 2)]
    for a in te:
        for b in be:
            cands.append(np.cross(a, b))
    for side in (top, bot):
        for a, b, c in combinations(side, 3):
            cands.append(np.cross(b - a, c - a))
    cands = np.array(cands)
    nrm = np.linalg.norm(cands, axis=1)
    cands = cands[nrm > 1e-14 * max(1.0, nrm.max(initial=0.0))]
    return _unit_rows(cands) if len(cands) else np.zeros((0, 3))


def width3d(curve: PolyCurve | PiecewiseCurve, tol: float = DEFAULT_WIDTH_TOL,
            n_dirs: int = 2000, seed: int = 0) -> tuple[float, np.ndarray]:
    """Minimal slab width over all directions, with a direction attaining it.

    Search: every hull facet normal and a Fibonacci lattice on the hemisphere,
    pattern-search refinement of the best few directions down to an angular step
    well below ``tol``, then a snap to the exact contact directions near the
    refined optimum.  The returned value is the true slab width in the returned
    direction.
    """
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    pts = as_polycurve(curve).points
    h = hull(pts)
    if h.dim == 1:
        d = h.vertices[1] - h.vertices[0]
        return 0.0, _perpendicular(d / np.linalg.norm(d))
    if h.dim == 2:
        return 0.0, h.normals[0].copy()
    verts = h.vertices
    diam = float(np.linalg.norm(np.ptp(verts, axis=0)))

    cands = [h.normals]
    lattice = fibonacci_sphere(n_dirs, hemisphere=True)
    cands.append(lattice)
    if len(h.normals) * len(verts) > 4e8:
        cands = [lattice]
    dirs = np.vstack(cands)
    w = _widths(verts, dirs)
    order = np.argsort(w)
    starts = []
    for i in order:
        if all(abs(dirs[i] @ s) < 1 - 1e-6 for s in starts):
            starts.append(dirs[i])
        if len(starts) == 8:
            break
    starts = np.array(starts)

    step = lattice_spacing(n_dirs, hemisphere=True)
    ang_tol = 0.05 * tol / max(diam, 1e-300)
    x, fx = pattern_search(lambda U: _widths(verts, U), starts, step, ang_tol,
                           project=_unit_rows, seed=seed)
    best_u = x[np.argmin(fx)]
    best_w = float(fx.min())
    if w[order[0]] < best_w:
        best_u, best_w = dirs[order[0]], float(w[order[0]])

    for u0 in x[np.argsort(fx)[:3]]:
        snap = _combinatorial_candidates(verts, u0)
        if len(snap):
            ws = _widths(verts, snap)
            i = int(np.argmin(ws))
            if ws[i] < best_w:
                best_u, best_w = snap[i], float(ws[i])
    if best_u[2] < 0 or (best_u[2] == 0 and best_u[1] < 0):
        best_u = -best_u
    return best_w, best_u


def _plane_frame(points: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    centre = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centre, full_matrices=False)
    if len(vt) == 3 and np.abs((points - centre) @ vt[2]).max() > tol:
        raise InvalidArgumentError("curve is not planar")
    return centre, vt[:2]


def planar_coordinates(curve: PolyCurve, tol: float = 1e-9) -> np.ndarray:
    """2-D coordinates of a planar curve's vertices in an orthonormal frame of its plane."""
    pts = curve.points
    if len(np.unique(pts, axis=0)) < 3:
        d = pts - pts[0]
        k = int(np.argmax(np.linalg.norm(d, axis=1)))
        e = d[k] / np.linalg.norm(d[k]) if np.any(d[k]) else np.array([1.0, 0.0, 0.0])
        return np.column_stack([d @ e, np.zeros(len(pts))])
    centre, frame = _plane_frame(pts, tol)
    return (pts - centre) @ frame.T


def _rotating_calipers(poly: np.ndarray) -> float:
    """Width of a convex polygon given counter-clockwise."""
    n = len(poly)
    if n < 3:
        return 0.0
    best = math.inf
    j = 1
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        e = b - a
        le = math.hypot(*e)
        if le == 0:
            continue

        def dist(k):
            p = poly[k % n] - a
            return (e[0] * p[1] - e[1] * p[0]) / le

        while dist(j + 1) >= dist(j):
            j += 1
        best = min(best, dist(j))
    return best


def width2d(curve: PolyCurve) -> float:
    """Width of a planar curve: the smallest distance between parallel support lines."""
    uv = planar_coordinates(curve)
    if len(np.unique(uv, axis=0)) < 3:
        return 0.0
    try:
        ch = _QHull(uv)
    except QhullError:
        return 0.0
    return float(_rotating_calipers(uv[ch.vertices]))


# ---------------------------------------------------------------------------
# Inradius


def _interior_starts(h: ConvexHull3, n: int, seed: int) -> np.ndarray:
    lo, hi = h.vertices.min(axis=0), h.vertices.max(axis=0)
    sampler = qmc.Halton(3, seed=seed)
    found = []
    for _ in range(8):
        pts = qmc.scale(sampler.random(max(4 * n, 64)), lo, hi)
        inside = pts[distance_to_boundary_inside(h, pts) > 0]
        found.extend(inside)
        if len(found) >= n:
            break
    return np.array(found[:n]).reshape(-1, 3)


def _chebyshev_centre(h: ConvexHull3) -> np.ndarray | None:
    a = np.column_stack([h.normals, np.ones(len(h.normals))])
    res = linprog([0, 0, 0, -1], A_ub=a, b_ub=h.offsets, bounds=[(None, None)] * 3 + [(0, None)],
                  method="highs")
    return res.x[:3] if res.success else None


def _ball_radius(curve: PolyCurve, h: ConvexHull3, c: np.ndarray, chunk: int = 2_000_000) -> np.ndarray:
    c = np.atleast_2d(c)
    m = max(1, chunk // max(1, len(curve.points)))
    d_curve = np.concatenate([min_distance_to_curve(curve, c[i:i + m]) for i in range(0, len(c), m)])
    return np.minimum(d_curve, distance_to_boundary_inside(h, c))


def _closest_on_edges(curve: PolyCurve, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a, b = curve.edges()
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", c - a, d) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    q = a + t[:, None] * d
    return q, np.linalg.norm(c - q, axis=1)


def _polish_centre(curve: PolyCurve, h: ConvexHull3, c: np.ndarray, tol: float,
                   max_iter: int = 200) -> tuple[np.ndarray, float]:
    """Sequential LP ascent on ``min(distance to curve, distance to boundary)``.

    Edge distances near the current minimum are linearized and the facet
    distances are exact; a box trust region shrinks whenever the LP step fails
    to improve the true objective.  Pattern search stalls where several
    distances tie, which is exactly where this step is effective.
    """
    c = np.array(c, dtype=float)
    r = float(_ball_radius(curve, h, c)[0])
    delta = max(r, tol) * 0.1
    nf = len(h.normals)
    for _ in range(max_iter):
        if delta < tol:
            break
        q, d = _closest_on_edges(curve, c)
        near = d <= r + 2 * math.sqrt(3) * delta
        g = (c - q[near]) / np.maximum(d[near, None], 1e-300)
        a_ub = np.vstack([np.column_stack([-g, np.ones(len(g))]),
                          np.column_stack([h.normals, np.ones(nf)])])
        b_ub = np.concatenate([d[near], h.offsets - h.normals @ c])
        res = linprog([0, 0, 0, -1], A_ub=a_ub, b_ub=b_ub,
                      bounds=[(-delta, delta)] * 3 + [(None, None)], method="highs")
        if not res.success:
            delta *= 0.25
            continue
        cand = c + res.x[:3]
        rc = float(_ball_radius(curve, h, cand)[0])
        if rc > r:
            if rc - r >= 0.5 * (res.x[3] - r):
                delta *= 2
            c, r = cand, rc
        else:
            delta *= 0.25
    return c, r


def inradius(curve: PolyCurve | PiecewiseCurve, tol: float = DEFAULT_INRADIUS_TOL,
             n_starts: int = 64, seed: int = 42) -> tuple[float, np.ndarray]:
    """Radius and centre of the largest ball inside conv(curve) that misses the curve.

    Maximizes ``min(distance to curve, distance to hull boundary)`` by a
    multi-start pattern search (hull centroid, Chebyshev centre of the hull and
    ``n_starts`` quasi-random interior points).  Flat hulls give ``(0, centroid)``.
    """
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    curve = as_polycurve(curve)
    h = hull(curve.points)
    if not h.is_solid:
        return 0.0, curve.points.mean(axis=0)
    starts = [h.centroid[None, :]]
    cheb = _chebyshev_centre(h)
    if cheb is not None:
        starts.append(cheb[None, :])
    starts.append(_interior_starts(h, n_starts, seed))
    starts = np.vstack(starts)
    diam = float(np.linalg.norm(np.ptp(h.vertices, axis=0)))

    def neg(c):
        return -_ball_radius(curve, h, c)

    x, fx = pattern_search(neg, starts, 0.1 * diam, 1e-3 * diam, seed=seed)
    keep = np.argsort(fx)[:4]
    x, fx = pattern_search(neg, x[keep], 1e-3 * diam, 0.1 * tol, seed=seed + 1)
    best = (-np.inf, x[0])
    for c0 in x:
        c, r = _polish_centre(curve, h, c0, 0.1 * tol)
        if r > best[0]:
            best = (r, c)
    return max(0.0, float(best[0])), best[1]


def inspects_sphere(curve: PolyCurve | PiecewiseCurve, tol: float = 1e-9) -> bool:
    """Curve stays outside the unit sphere and the sphere lies in its convex hull."""
    curve = as_polycurve(curve)
    origin = np.zeros(3)
    if min_distance_to_curve(curve, origin) < 1 - tol:
        return False
    h = hull(curve.points)
    if not h.is_solid:
        return False
    return distance_to_boundary_inside(h, origin) >= 1 - tol


# ---------------------------------------------------------------------------
# Wienholtz witness


@dataclass(frozen=True)
class SlabWitness:
    """Direction and four alternating contacts with the two support planes.

    ``params[0]`` and ``params[2]`` touch the plane listed first in ``planes``.
    """

    u: np.ndarray
    s_min: float
    s_max: float
    params: tuple
    residuals: tuple
    planes: tuple

    @property
    def residual(self) -> float:
        return float(max(self.residuals))


def _alternation_residual(proj: np.ndarray, return_path: bool = False):
    """Smallest residual admitting four alternating contacts, per direction.

    ``proj`` is ``(m, N)``: projections of the N vertices on m directions.  A
    residual r admits contacts i0 < i1 < i2 < i3 whose distances to their
    assigned planes (max, min, max, min or the reverse) are all <= r.
    """
    top = proj.max(axis=1, keepdims=True) - proj
    bot = proj - proj.min(axis=1, keepdims=True)
    best = None
    paths = []
    for pattern in ((top, bot, top, bot), (bot, top, bot, top)):
        stages = [pattern[0]]
        for cost in pattern[1:]:
            prev = np.minimum.accumulate(stages[-1], axis=1)
            shifted = np.full_like(prev, np.inf)
            shifted[:, 1:] = prev[:, :-1]
            stages.append(np.maximum(shifted, cost))
        r = stages[-1].min(axis=1)
        paths.append((stages, pattern))
        best = r if best is None else np.minimum(best, r)
    if not return_path:
        return best
    return best, paths


def _witness_path(proj: np.ndarray):
    best, paths = _alternation_residual(proj[None, :], return_path=True)
    r = best[0]
    for label, (stages, pattern) in zip(("max", "min"), paths):
        if stages[-1][0].min() > r:
            continue
        idx = [int(np.argmin(stages[3][0]))]
        for k in (2, 1, 0):
            idx.append(int(np.argmin(stages[k][0][: idx[-1]])))
        idx.reverse()
        res = tuple(float(pattern[k][0][i]) for k, i in enumerate(idx))
        planes = ("max", "min") if label == "max" else ("min", "max")
        return idx, res, planes
    raise AssertionError("no alternating path found")


def _witness_levels(n_dirs: int) -> list[int]:
    levels = [n_dirs]
    while levels[-1] // 2 >= 32:
        levels.append(levels[-1] // 2)
    return levels[::-1]


def wienholtz_witness(curve: PolyCurve | PiecewiseCurve, n_dirs: int = 512, seed: int = 0) -> SlabWitness:
    """Direction whose support slab meets the curve alternately at four points.

    Residuals are searched on nested Fibonacci lattices (n_dirs, n_dirs/2, ...)
    followed by pattern-search refinement, so doubling ``n_dirs`` never makes
    the best residual worse.
    """
    curve = as_polycurve(curve)
    pts = curve.points
    if len(pts) < 4:
        raise InvalidArgumentError("a witness needs at least 4 vertices")
    scale = max(1.0, float(np.linalg.norm(np.ptp(pts, axis=0))))

    def objective(U):
        return _alternation_residual(U @ pts.T)

    best_u, best_r = None, math.inf
    for n in _witness_levels(n_dirs):
        lattice = fibonacci_sphere(n, hemisphere=True)
        r = objective(lattice)
        starts = lattice[np.argsort(r)[:4]]
        x, fx = pattern_search(objective, starts, lattice_spacing(n, hemisphere=True),
                               1e-12, project=_unit_rows, seed=seed)
        cand_u = np.vstack([lattice, x])
        cand_r = np.concatenate([r, fx])
        i = int(np.argmin(cand_r))
        if cand_r[i] < best_r:
            best_u, best_r = cand_u[i], float(cand_r[i])
        if best_r <= 1e-15 * scale:
            break

    proj = pts @ best_u
    idx, res, planes = _witness_path(proj)
    n_edges = len(pts) if curve.closed else len(pts) - 1

    def param(i):
        return ParamPoint(i, 0.0) if i < n_edges else ParamPoint(n_edges - 1, 1.0)

    return SlabWitness(best_u, float(proj.min()), float(proj.max()),
                       tuple(param(i) for i in idx), res, planes)


# ---------------------------------------------------------------------------
# nth hull


def plane_crossings(curve: PolyCurve, p, normals: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """Transversal crossings of the curve with each plane through ``p``.

    Counted for the plane offsets shifted by +eps and -eps; the smaller count is
    returned so a vertex lying on the plane never inflates it.
    """
    s = (curve.points - np.asarray(p, dtype=float)) @ np.atleast_2d(normals).T
    nxt = np.roll(s, -1, axis=0) if curve.closed else s[1:]
    cur = s if curve.closed else s[:-1]
    counts = []
    for shift in (eps, -eps):
        a, b = cur - shift, nxt - shift
        counts.append(((a > 0) != (b > 0)).sum(axis=0))
    return np.minimum(*counts)


def nth_hull_membership(curve: PolyCurve, p, n: int, n_planes: int = 200) -> bool:
    """Whether every sampled plane through ``p`` meets the curve at least 2n times."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    if n_planes < 100:
        raise InvalidArgumentError("n_planes must be >= 100")
    normals = fibonacci_sphere(n_planes, hemisphere=True)
    return bool(np.all(plane_crossings(curve, p, normals) >= 2 * n))


# ---------------------------------------------------------------------------
# Bound verification


@dataclass(frozen=True)
class BoundCheck:
    name: str
    threshold: float
    satisfied: bool


@dataclass(frozen=True)
class MetricReport:
    length: float
    width: float
    inradius: float
    ratio_lw: float
    ratio_lr: float
    closed: bool
    bound_checks: tuple = field(default_factory=tuple)

    @property
    def consistent(self) -> bool:
        return all(b.satisfied for b in self.bound_checks)

    def to_json(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else None

        return {
            "length": self.length,
            "width": self.width,
            "inradius": self.inradius,
            "ratio_lw": num(self.ratio_lw),
            "ratio_lr": num(self.ratio_lr),
            "closed": self.closed,
            "bounds": [{"name": b.name, "threshold": b.threshold, "satisfied": b.satisfied}
                       for b in self.bound_checks],
        }


def applicable_bounds(closed: bool) -> list[tuple[str, str, float]]:
    """(name, ratio key, threshold) for every bound that applies."""
    out = [
        ("L/w >= sqrt(3^2 + 2.2782^2)", "lw", cons.width_bound_open()),
        ("L/r >= sqrt(6^2 + (pi+2)^2)", "lr", cons.inradius_bound_open()),
    ]
    if closed:
        out += [
            ("L/w >= sqrt(pi^2 + 16) [closed]", "lw", cons.width_bound_closed()),
            ("L/r >= 6 sqrt(3) [closed]", "lr", cons.inradius_bound_closed()),
        ]
    return out


def verify_bounds(curve: PolyCurve | PiecewiseCurve, width_tol: float = DEFAULT_WIDTH_TOL,
                  inradius_tol: float = DEFAULT_INRADIUS_TOL, closed: bool | None = None) -> MetricReport:
    """Length, width and inradius of a curve, checked against every applicable lower bound.

    A failed check on a valid curve means a computation bug, not a counterexample;
    it is logged as an internal inconsistency.
    """
    length = curve.length()
    poly = as_polycurve(curve)
    is_closed = poly.closed if closed is None else closed
    w, _ = width3d(poly, width_tol)
    r, _ = inradius(poly, inradius_tol)
    ratio_lw = length / w if w > 0 else math.inf
    ratio_lr = length / r if r > 0 else math.inf
    ratios = {"lw": ratio_lw, "lr": ratio_lr}
    checks = []
    for name, key, threshold in applicable_bounds(is_closed):
        ok = ratios[key] >= threshold - BOUND_TOL
        if not ok:
            log.error("internal inconsistency: %s violated (ratio %.9g)", name, ratios[key])
        checks.append(BoundCheck(name, threshold, bool(ok)))
    return MetricReport(length, w, r, ratio_lw, ratio_lr, is_closed, tuple(checks))
