"""Convex hulls of point clouds in R^3 and the queries built on them.

Solid hulls come from Qhull (via ``scipy.spatial``) without pre-merging, which
stays fast on large sets of coplanar points; if that hits a precision error the
input is joggled instead.  Triangle planes are recomputed from the original
coordinates and triangles whose planes agree within ``MERGE_TOL`` are merged
into polygonal facets.  Flat inputs (planar or
collinear) give a degenerate hull that still answers support queries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _QHull
from scipy.spatial import QhullError
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .curves import PolyCurve, segment_distances
from .errors import DegenerateCurveError, DegenerateHullError

MERGE_TOL = 1e-10
FLAT_TOL = 1e-12
NORMAL_AGREE = 1e-6


@dataclass(frozen=True, eq=False)
class ConvexHull3:
    """Hull vertices plus facet planes ``<normal, x> <= offset``.

    ``dim`` is 3 for a solid hull, 2 for a flat polygon, 1 for a segment.  For a
    flat polygon the two facets are the plane itself with both orientations and
    ``vertices`` are in boundary order.
    """

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    facets: tuple
    dim: int
    source_index: np.ndarray

    @property
    def is_solid(self) -> bool:
        return self.dim == 3

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def _distinct(points: np.ndarray) -> np.ndarray:
    return np.unique(points, axis=0)


def _planar_hull(points: np.ndarray, origin: np.ndarray, frame: np.ndarray, index: np.ndarray) -> ConvexHull3:
    e1, e2, n = frame
    uv = (points - origin) @ np.vstack([e1, e2]).T
    extent = np.ptp(uv, axis=0)
    if extent[1] <= FLAT_TOL * max(extent[0], 1e-300):
        order = np.argsort(uv[:, 0])
        ends = order[[0, -1]]
        return ConvexHull3(points[ends], np.zeros((0, 3)), np.zeros(0), (), 1, index[ends])
    try:
        h2 = _QHull(uv)
        ring = h2.vertices  # counter-clockwise for 2-D input
    except QhullError:
        order = np.argsort(uv[:, 0])
        ends = order[[0, -1]]
        return ConvexHull3(points[ends], np.zeros((0, 3)), np.zeros(0), (), 1, index[ends])
    verts = points[ring]
    c = float(np.mean(verts @ n))
    normals = np.vstack([n, -n])
    offsets = np.array([c, -c])
    loop = np.arange(len(ring))
    return ConvexHull3(verts, normals, offsets, (loop, loop[::-1]), 2, index[ring])


def hull(points) -> ConvexHull3:
    """Convex hull of a point cloud (or of a curve's vertices)."""
    if isinstance(points, PolyCurve):
        points = points.points
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    uniq = _distinct(pts)
    if len(uniq) < 2:
        raise DegenerateCurveError("hull needs at least 2 distinct points")
    index = np.arange(len(pts))
    centre = uniq.mean(axis=0)
    _, _, vt = np.linalg.svd(uniq - centre, full_matrices=False)
    thickness = np.ptp((uniq - centre) @ vt[2]) if vt.shape[0] == 3 else 0.0
    diameter = np.ptp((uniq - centre) @ vt[0])
    frame = vt if vt.shape[0] == 3 else np.vstack([vt, np.cross(vt[0], vt[1])])
    if thickness <= FLAT_TOL * diameter:
        return _planar_hull(pts, centre, frame, index)
    try:
        qh = _QHull(pts, qhull_options="Q0")
    except QhullError:
        try:
            qh = _QHull(pts, qhull_options="QJ")
        except QhullError:
            return _planar_hull(pts, centre, frame, index)
    return _merge_facets(pts, qh)


def _exact_planes(pts: np.ndarray, qh) -> np.ndarray:
    """Triangle planes ``(n, -offset)`` recomputed from the unjoggled vertices.

    Nearly degenerate triangles have an ill-conditioned exact plane; where it
    disagrees with Qhull's (joggled) normal by more than ``NORMAL_AGREE`` the
    Qhull normal is kept, with the offset taken over the triangle's vertices.
    """
    a, b, c = (pts[qh.simplices[:, k]] for k in range(3))
    n = np.cross(b - a, c - a)
    nn = np.linalg.norm(n, axis=1)
    q = qh.equations[:, :3]
    ok = nn > 0
    n[ok] /= nn[ok, None]
    n[ok] *= np.sign(np.einsum("ij,ij->i", n[ok], q[ok]))[:, None]
    ok &= np.linalg.norm(n - q, axis=1) <= NORMAL_AGREE
    n[~ok] = q[~ok]
    off = np.max(np.stack([np.einsum("ij,ij->i", n, v) for v in (a, b, c)]), axis=0)
    return np.column_stack([n, -off])


def _merge_facets(pts: np.ndarray, qh) -> ConvexHull3:
    eq = _exact_planes(pts, qh)
    n_tri = len(eq)
    scale = max(1.0, float(np.abs(pts).max()))
    i = np.repeat(np.arange(n_tri), 3)
    j = qh.neighbors.ravel()
    same = np.all(np.abs(eq[i] - eq[j]) <= MERGE_TOL * np.array([1, 1, 1, scale]), axis=1)
    graph = coo_matrix((np.ones(same.sum()), (i[same], j[same])), shape=(n_tri, n_tri))
    _, roots = connected_components(graph, directed=False)

    hull_idx = qh.vertices
    local = np.full(len(pts), -1)
    local[hull_idx] = np.arange(len(hull_idx))
    verts = pts[hull_idx]
    tri = local[qh.simplices]
    # orient every triangle counter-clockwise seen from outside
    a, b, c = verts[tri[:, 0]], verts[tri[:, 1]], verts[tri[:, 2]]
    flip = np.einsum("ij,ij->i", np.cross(b - a, c - a), eq[:, :3]) < 0
    tri[flip] = tri[flip][:, ::-1]

    sizes = np.bincount(roots)
    single = sizes[roots] == 1
    normals = [eq[single, :3]]
    offsets = [-eq[single, 3]]
    facets = list(tri[single])
    merged = np.flatnonzero(~single)
    if merged.size:
        area = np.linalg.norm(np.cross(b - a, c - a), axis=1)
        order = merged[np.lexsort((merged, roots[merged]))]
        group_sizes = sizes[roots[order]]
        # groups with the same triangle count are processed as one batch
        for k in np.unique(group_sizes):
            tris = order[group_sizes == k].reshape(-1, k)
            nrm = (eq[tris, :3] * area[tris][..., None]).sum(axis=1)
            zero = ~np.any(nrm, axis=1)
            nrm[zero] = eq[tris[zero], :3].sum(axis=1)
            nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
            ids = np.sort(tri[tris].reshape(len(tris), -1), axis=1)
            fresh = np.ones(ids.shape, dtype=bool)
            fresh[:, 1:] = np.diff(ids, axis=1) != 0
            counts = fresh.sum(axis=1)
            for m in np.unique(counts):
                rows = np.flatnonzero(counts == m)
                group_ids = ids[rows][fresh[rows]].reshape(len(rows), m)
                n_rows = nrm[rows]
                normals.append(n_rows)
                offsets.append(np.einsum("gmj,gj->gm", verts[group_ids], n_rows).max(axis=1))
                facets.extend(_order_facets(verts, group_ids, n_rows))
    return ConvexHull3(verts, np.vstack(normals), np.concatenate(offsets), tuple(facets), 3, hull_idx)


def _order_facets(verts: np.ndarray, ids: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Rows of facet vertex ids ordered counter-clockwise seen from outside."""
    p = verts[ids]
    c = p.mean(axis=1, keepdims=True)
    e1 = p[:, 0] - c[:, 0]
    e1 /= np.maximum(np.linalg.norm(e1, axis=1, keepdims=True), 1e-300)
    e2 = np.cross(normals, e1)
    d = p - c
    ang = np.arctan2(np.einsum("gmj,gj->gm", d, e2), np.einsum("gmj,gj->gm", d, e1))
    return np.take_along_axis(ids, np.argsort(ang, axis=1), axis=1)


def support(h: ConvexHull3, u) -> np.ndarray | float:
    """Support function ``max_v <v, u>``; ``u`` may be one direction or an ``(m, 3)`` stack."""
    u = np.asarray(u, dtype=float)
    vals = h.vertices @ u.T
    return float(vals.max()) if u.ndim == 1 else vals.max(axis=0)


def slab_width(h: ConvexHull3, u) -> np.ndarray | float:
    """``support(u) + support(-u)`` for unit ``u``."""
    u = np.asarray(u, dtype=float)
    vals = h.vertices @ u.T
    w = vals.max(axis=0) - vals.min(axis=0)
    return float(w) if u.ndim == 1 else w


def distance_to_boundary_inside(h: ConvexHull3, p) -> np.ndarray | float:
    """Signed distance from ``p`` to the hull boundary; positive inside.

    Inside the hull this is the radius of the largest ball centred at ``p`` that
    stays in the hull.  ``p`` may be a point or an ``(m, 3)`` stack.
    """
    if not h.is_solid:
        raise DegenerateHullError("flat hull has no interior")
    p = np.asarray(p, dtype=float)
    gaps = h.offsets[:, None] - h.normals @ np.atleast_2d(p).T
    d = gaps.min(axis=0)
    return float(d[0]) if p.ndim == 1 else d


def contains(h: ConvexHull3, p, tol: float = 1e-9) -> bool:
    return distance_to_boundary_inside(h, p) >= -tol


def min_distance_to_curve(curve: PolyCurve, p) -> np.ndarray | float:
    """Exact distance from ``p`` (or each row of an ``(m, 3)`` stack) to the polyline."""
    a, b = curve.edges()
    if len(a) == 0:
        a = b = curve.points[:1]
    d = segment_distances(p, a, b)
    return float(d.min()) if np.ndim(p) == 1 else d.min(axis=1)


def to_off(h: ConvexHull3) -> str:
    lines = ["OFF", f"{len(h.vertices)} {len(h.facets)} 0"]
    lines += [" ".join(repr(float(c)) for c in v) for v in h.vertices]
    lines += [f"{len(f)} " + " ".join(str(int(i)) for i in f) for f in h.facets]
    return "\n".join(lines) + "\n"
