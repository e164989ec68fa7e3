"""Integral-geometry length formulas and the length bounds derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import PiecewiseCurve, PolyCurve, as_polycurve, check_orthonormal, norms
from .errors import DomainError, InternalInconsistencyError, InvalidArgumentError
from .metrics import inspects_sphere, planar_coordinates, width2d

BARBIER_TOL = 1e-9
DECOMPOSE_TOL = 1e-9
NORM_BOUND_TOL = 1e-6
SPHERE_TOL = 1e-6


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    abs_error: float  # three standard errors
    n: int
    seed: int

    def to_json(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error, "n": self.n, "seed": self.seed}


def projected_lengths(curve: PolyCurve, dirs: np.ndarray, chunk: int = 4_000_000) -> np.ndarray:
    """Length with multiplicity of the projection onto each direction: Σ |⟨edge, u⟩|."""
    e = curve.edge_vectors()
    dirs = np.atleast_2d(dirs)
    m = max(1, chunk // max(1, len(e)))
    return np.concatenate([np.abs(e @ dirs[i:i + m].T).sum(axis=0) for i in range(0, len(dirs), m)])


def crofton_length_2d(curve: PolyCurve, n_dirs: int = 10_000) -> float:
    """Length of a planar curve as a quarter of the mean projected length times 2π."""
    if n_dirs < 4:
        raise InvalidArgumentError("n_dirs must be >= 4")
    uv = planar_coordinates(curve)
    planar = PolyCurve(np.column_stack([uv, np.zeros(len(uv))]), curve.closed)
    theta = 2 * math.pi * np.arange(n_dirs) / n_dirs
    dirs = np.column_stack([np.cos(theta), np.sin(theta), np.zeros(n_dirs)])
    return 0.25 * (2 * math.pi / n_dirs) * float(projected_lengths(planar, dirs).sum())


def barbier_check(curve: PolyCurve) -> tuple[float, float, bool]:
    """``(L, π w, L >= π w)`` for a closed planar curve."""
    if not curve.closed:
        raise InvalidArgumentError("Barbier's bound needs a closed curve")
    length = curve.length()
    pw = math.pi * width2d(curve)
    return length, pw, bool(length >= pw - BARBIER_TOL)


def decompose_length(curve: PolyCurve | PiecewiseCurve, basis_split) -> tuple[float, float, float]:
    """``(L, L1, L2)``: length and the lengths of the projections onto two complementary subspaces.

    ``basis_split`` is a pair of orthonormal row stacks that together span R^3.
    Always ``L² >= L1² + L2²``; equality iff the edge directions make a constant
    angle with the first subspace.  Piecewise curves are sampled at the default
    density, so all three lengths are polygonal.
    """
    first, second = (np.atleast_2d(np.asarray(b, dtype=float)) for b in basis_split)
    full = check_orthonormal(np.vstack([first, second]))
    if len(full) != 3:
        raise InvalidArgumentError("the two subspaces must span R^3")
    poly = as_polycurve(curve)
    e = poly.edge_vectors()
    l1 = float(np.linalg.norm(e @ first.T, axis=1).sum())
    l2 = float(np.linalg.norm(e @ second.T, axis=1).sum())
    length = poly.length()
    if length * length < l1 * l1 + l2 * l2 - DECOMPOSE_TOL * max(1.0, length * length):
        raise InternalInconsistencyError("projected lengths exceed the curve length")
    return length, l1, l2


def _arc_frames(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit tangent ``w`` at ``a`` and angular span of each great-circle arc a_i -> b_i."""
    dot = np.clip(np.einsum("ij,ij->i", a, b), -1.0, 1.0)
    w = b - dot[:, None] * a
    wn = np.linalg.norm(w, axis=1)
    if np.any(wn <= 1e-15):
        raise InvalidArgumentError("arc endpoints must be distinct and not antipodal")
    return w / wn[:, None], np.arctan2(wn, dot)


def _closed_form_crossings(a, w, span, p, cos_rho) -> np.ndarray:
    """Roots of ``⟨a cos φ + w sin φ, p⟩ = cos ρ`` in [0, span), elementwise over rows.

    On the arc ``⟨x, p⟩ = R cos(φ − ψ)``.
    """
    ca = np.einsum("ij,ij->i", p, a)
    cw = np.einsum("ij,ij->i", p, w)
    r = np.hypot(ca, cw)
    psi = np.arctan2(cw, ca)
    with np.errstate(invalid="ignore", divide="ignore"):
        delta = np.arccos(np.clip(cos_rho / r, -1.0, 1.0))
    hit = r > cos_rho
    count = np.zeros(len(r), dtype=np.int64)
    for sign in (1.0, -1.0):
        phi = np.mod(psi + sign * delta, 2 * math.pi)
        count += (hit & (phi < span)).astype(np.int64)
    return count


def _circle_counts(pts: np.ndarray, closed: bool, p: np.ndarray, cos_rho: float) -> np.ndarray:
    """Intersections of the spherical polygon with each circle ``⟨x, p_j⟩ = cos ρ``.

    An arc shorter than π meets the circle once when its end values straddle it
    and zero or two times otherwise.  Two crossings need an end value within the
    arc's angular span of the circle (the value is 1-Lipschitz in angle), so only
    those pairs are solved in closed form.
    """
    a = pts if closed else pts[:-1]
    b = np.roll(pts, -1, axis=0) if closed else pts[1:]
    w, span = _arc_frames(a, b)
    f = p @ pts.T - cos_rho
    if closed:
        fa, fb = f, np.roll(f, -1, axis=1)
    else:
        fa, fb = f[:, :-1], f[:, 1:]
    straddle = (fa >= 0) != (fb >= 0)
    counts = straddle.sum(axis=1)
    near = ~straddle & (np.minimum(np.abs(fa), np.abs(fb)) < span[None, :])
    jp, je = np.nonzero(near)
    if jp.size:
        extra = _closed_form_crossings(a[je], w[je], span[je], p[jp], cos_rho)
        counts = counts + np.bincount(jp, weights=extra, minlength=len(p)).astype(counts.dtype)
    return counts


def spherical_crofton_length(curve: PolyCurve, rho: float = math.pi / 2, n_circles: int = 100_000,
                             seed: int = 42, chunk: int = 4_000_000) -> MonteCarloEstimate:
    """Length of a curve on the unit sphere from random circles of spherical radius ``rho``.

    L = (π / sin ρ) · E[#(curve ∩ C_ρ(p))] for p uniform on the sphere.  Edges are
    great-circle arcs between the (normalized) vertices.
    """
    if not 0 < rho <= math.pi / 2:
        raise InvalidArgumentError("rho must lie in (0, π/2]")
    if n_circles < 2:
        raise InvalidArgumentError("n_circles must be >= 2")
    pts = curve.points
    nrm = np.linalg.norm(pts, axis=1)
    if np.max(np.abs(nrm - 1)) > SPHERE_TOL:
        raise InvalidArgumentError("vertices must lie on the unit sphere")
    pts = pts / nrm[:, None]
    rng = np.random.default_rng(seed)
    p = rng.standard_normal((n_circles, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    cos_rho = math.cos(rho)
    m = max(1, chunk // len(pts))
    counts = np.concatenate([_circle_counts(pts, curve.closed, p[i:i + m], cos_rho)
                             for i in range(0, n_circles, m)]).astype(float)
    scale = math.pi / math.sin(rho)
    err = 3 * counts.std(ddof=1) / math.sqrt(n_circles)
    if err == 0:
        err = 3 / n_circles * max(2.0, counts.mean())  # rule of three when every count agrees
    return MonteCarloEstimate(scale * float(counts.mean()), scale * float(err), n_circles, seed)


def norm_bound_value(big_m: float, small_m: float) -> float:
    """``2π M m / √(M² − 1)``."""
    if not big_m > 1:
        raise DomainError("max norm must exceed 1")
    return 2 * math.pi * big_m * small_m / math.sqrt(big_m * big_m - 1)


def min_max_norm_bound(curve: PolyCurve | PiecewiseCurve, density: float = 12_000.0,
                       check_inspection: bool = True) -> tuple[float, float, float]:
    """``(M, m, 2π M m / √(M² − 1))`` for a closed inspection curve, checked against its length.

    For a piecewise curve M and m are taken over a dense sample of curve points
    and the length is exact.
    """
    if not curve.closed:
        raise InvalidArgumentError("the norm bound needs a closed curve")
    if isinstance(curve, PiecewiseCurve):
        poly = as_polycurve(curve, density)
        r = np.linalg.norm(poly.points, axis=1)
        big_m, small_m = float(r.max()), float(r.min())
    else:
        poly = curve
        big_m, small_m = norms(curve)
    if check_inspection and not inspects_sphere(poly):
        raise InvalidArgumentError("curve does not inspect the unit sphere")
    bound = norm_bound_value(big_m, small_m)
    if curve.length() < bound - NORM_BOUND_TOL:
        raise InternalInconsistencyError(f"length {curve.length()} below norm bound {bound}")
    return big_m, small_m, bound
