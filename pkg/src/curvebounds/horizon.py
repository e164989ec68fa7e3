"""The horizon functional of curves outside the unit sphere.

For a curve outside the unit sphere, H counts (with multiplicity) the points p of
the sphere whose tangent plane meets the curve.  Along the curve the tangent-plane
family sweeps an area element, and integrating over the circle of horizon
directions leaves a one-dimensional integral of a closed-form inner integral.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .curves import PolyCurve, as_polycurve
from .errors import DomainError, InternalInconsistencyError, InvalidArgumentError, NonTerminationError
from .metrics import inspects_sphere
from .search import bisect, golden_section, pattern_search

log = logging.getLogger(__name__)

LOWER_BOUND = 8 * math.pi
UPPER_FACTOR = 4 * math.pi / (3 * math.sqrt(3))
OUTSIDE_TOL = 1e-9
LINE_TOL = 1e-9

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class HorizonEstimate:
    value: float
    abs_error: float
    method: str

    def to_json(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error, "method": self.method}


@dataclass(frozen=True)
class FrameSample:
    """Curve point data at arclength ``t``: its norm and the angle between position and tangent."""

    t: float
    gamma_norm: float
    alpha: float

    @property
    def r(self) -> float:
        return math.sqrt(max(self.gamma_norm ** 2 - 1, 0.0)) / self.gamma_norm

    @property
    def h(self) -> float:
        return 1 / self.gamma_norm


def abs_cos_integral(a, b, disc=None):
    """``∫_0^{2π} |a cos θ + b| dθ``, elementwise.

    ``disc`` may supply ``a² − b²`` computed without cancellation; near
    ``|a| = |b|`` its square root otherwise loses half the digits.
    """
    a = np.abs(np.asarray(a, dtype=float))
    b = np.abs(np.asarray(b, dtype=float))
    if disc is None:
        disc = (a - b) * (a + b)
    disc = np.asarray(disc, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(a > 0, np.minimum(b / np.where(a > 0, a, 1.0), 1.0), 1.0)
        mixed = 4 * np.sqrt(np.maximum(disc, 0.0)) + 4 * b * np.arcsin(ratio)
    return np.where(disc <= 0, 2 * math.pi * b, mixed)


def _density(dist2, s: np.ndarray) -> np.ndarray:
    """Horizon density at ``foot + s·dir`` for a line at squared distance ``dist2``.

    With ``A = √(‖γ‖²−1) sin α`` and ``B = cos α`` one has ``A² − B² = dist2 − 1``.
    """
    norm2 = dist2 + s * s
    cos_alpha = s / np.sqrt(norm2)
    sin_alpha = np.sqrt(np.maximum(1 - cos_alpha ** 2, 0.0))
    a = np.sqrt(np.maximum(norm2 - 1, 0.0)) * sin_alpha
    disc = np.broadcast_to(dist2 - 1, np.shape(s))
    return abs_cos_integral(a, cos_alpha, disc) / norm2


def _edge_pieces(curve: PolyCurve):
    """Unit-speed edge pieces ``(foot, dir, s0, s1)`` split at the closest point to the origin.

    On each piece the curve is ``foot + s * dir`` with ``foot ⟂ dir``, and the
    horizon density is analytic in ``s``.
    """
    a, b = curve.edges()
    e = b - a
    ell = np.linalg.norm(e, axis=1)
    keep = ell > 0
    a, e, ell = a[keep], e[keep], ell[keep]
    d = e / ell[:, None]
    s0 = np.einsum("ij,ij->i", a, d)
    foot = a - s0[:, None] * d
    s1 = s0 + ell
    split = (s0 < 0) & (s1 > 0)
    edge_id = np.flatnonzero(keep)
    lo = np.concatenate([s0, np.zeros(split.sum())])
    hi = np.concatenate([np.where(split, 0.0, s1), s1[split]])
    idx = np.concatenate([np.arange(len(s0)), np.flatnonzero(split)])
    return foot[idx], d[idx], lo, hi, edge_id[idx]


def _gl(foot, d, lo, hi):
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    s = mid[:, None] + half[:, None] * _GL_X[None, :]
    dist2 = np.einsum("ij,ij->i", foot, foot)
    vals = _density(dist2[:, None], s)
    return half * (vals @ _GL_W)


def _adaptive(foot, d, lo, hi, tol: float, max_depth: int = 40):
    """Composite Gauss-Legendre with interval bisection; returns per-piece values and total error."""
    total_len = float(np.sum(hi - lo))
    owner = np.arange(len(lo))
    out = np.zeros(len(lo))
    err = 0.0
    whole = _gl(foot, d, lo, hi)
    for _ in range(max_depth):
        if len(lo) == 0:
            break
        mid = 0.5 * (lo + hi)
        left = _gl(foot, d, lo, mid)
        right = _gl(foot, d, mid, hi)
        diff = np.abs(left + right - whole)
        ok = diff <= tol * (hi - lo) / total_len
        np.add.at(out, owner[ok], left[ok] + right[ok])
        err += float(diff[ok].sum())
        bad = ~ok
        owner = np.concatenate([owner[bad], owner[bad]])
        foot = np.concatenate([foot[bad], foot[bad]])
        d = np.concatenate([d[bad], d[bad]])
        lo, hi = np.concatenate([lo[bad], mid[bad]]), np.concatenate([mid[bad], hi[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    if len(lo):
        np.add.at(out, owner, whole)
        err += float(tol)
        log.warning("horizon quadrature hit the depth limit on %d intervals", len(lo))
    return out, err


def _check_outside(curve: PolyCurve) -> None:
    a, b = curve.edges()
    from .curves import segment_distances

    if len(a) == 0 or segment_distances(np.zeros(3), a, b).min() <= 1 + OUTSIDE_TOL:
        raise DomainError("curve must stay strictly outside the unit sphere")


def horizon(curve, tol: float = 1e-8) -> HorizonEstimate:
    """Horizon functional by quadrature over arclength of the closed-form θ-integral."""
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    curve = as_polycurve(curve)
    _check_outside(curve)
    foot, d, lo, hi, _ = _edge_pieces(curve)
    vals, err = _adaptive(foot, d, lo, hi, tol)
    return HorizonEstimate(float(vals.sum()), err, "closed_form_inner")


def horizon_full_quadrature(curve, n_theta: int = 2048) -> HorizonEstimate:
    """Horizon by brute-force 2-D quadrature: no closed form for the θ-integral.

    Independent check of :func:`horizon`; the periodic θ-rule uses equispaced
    nodes, the arclength rule Gauss-Legendre per edge piece.
    """
    curve = as_polycurve(curve)
    _check_outside(curve)
    foot, d, lo, hi, _ = _edge_pieces(curve)
    theta = np.linspace(0, 2 * math.pi, n_theta, endpoint=False)
    cos_t = np.cos(theta)
    total = 0.0
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    dist2 = np.einsum("ij,ij->i", foot, foot)
    for k, x in enumerate(_GL_X):
        s = mid + half * x
        n2 = dist2 + s * s
        ca = s / np.sqrt(n2)
        sa = np.sqrt(np.maximum(1 - ca * ca, 0))
        a = np.sqrt(np.maximum(n2 - 1, 0)) * sa
        inner = np.abs(a[:, None] * cos_t[None, :] + ca[:, None]).mean(axis=1) * 2 * math.pi
        total += float(np.sum(_GL_W[k] * half * inner / n2))
    return HorizonEstimate(total, float("nan"), "full_quadrature")


def horizon_by_counting(curve, n_points: int = 100_000, seed: int = 42,
                        chunk: int = 4_000_000) -> HorizonEstimate:
    """Monte-Carlo horizon: 4π times the mean number of crossings of ⟨γ, p⟩ = 1.

    ``p`` is uniform on the sphere; the reported error is three standard errors.
    """
    if n_points < 2:
        raise InvalidArgumentError("n_points must be >= 2")
    curve = as_polycurve(curve)
    rng = np.random.default_rng(seed)
    p = rng.standard_normal((n_points, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    pts = curve.points
    m = max(1, chunk // len(pts))
    counts = np.empty(n_points)
    for i in range(0, n_points, m):
        s = pts @ p[i:i + m].T - 1
        pos = s > 0
        nxt = np.roll(pos, -1, axis=0) if curve.closed else pos[1:]
        cur = pos if curve.closed else pos[:-1]
        counts[i:i + m] = (cur != nxt).sum(axis=0)
    mean = counts.mean()
    err = 3 * counts.std(ddof=1) / math.sqrt(n_points)
    if err == 0:
        # every sample gave the same count: rule-of-three bound on the unseen fraction
        err = 3 / n_points * max(2.0, float(mean))
    return HorizonEstimate(4 * math.pi * float(mean), 4 * math.pi * err, "monte_carlo_counting")


def constant_norm_horizon(length: float, c: float) -> float:
    """Horizon of any curve lying on the sphere of radius c > 1."""
    return 4 * length * math.sqrt(c * c - 1) / (c * c)


# ---------------------------------------------------------------------------
# Diagnostics


def frame_sample(curve: PolyCurve, t: float) -> FrameSample:
    """Norm and position/tangent angle at arclength ``t`` (inside an edge)."""
    curve = as_polycurve(curve)
    a, b = curve.edges()
    ell = np.linalg.norm(b - a, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(ell)])
    k = int(np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(ell) - 1))
    d = (b[k] - a[k]) / ell[k]
    x = a[k] + (t - cum[k]) * d
    nx = float(np.linalg.norm(x))
    alpha = math.acos(max(-1.0, min(1.0, float(x @ d) / nx)))
    return FrameSample(float(t), nx, alpha)


def horizon_diagnostics(curve) -> list[dict]:
    """Per-edge rows: arclength at the midpoint, norm and angle there, contribution, radial flag."""
    curve = as_polycurve(curve)
    _check_outside(curve)
    foot, d, lo, hi, edge = _edge_pieces(curve)
    vals, _ = _adaptive(foot, d, lo, hi, 1e-10)
    a, b = curve.edges()
    ell = np.linalg.norm(b - a, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(ell)])
    contrib = np.zeros(len(ell))
    np.add.at(contrib, edge, vals)
    rows = []
    line_dist = np.linalg.norm(foot, axis=1)
    radial = np.zeros(len(ell), dtype=bool)
    radial[edge[line_dist < 1e-12]] = True
    for k in range(len(ell)):
        if ell[k] == 0:
            continue
        fs = frame_sample(curve, cum[k] + 0.5 * ell[k])
        rows.append({"edge": k, "t": fs.t, "gamma_norm": fs.gamma_norm, "alpha": fs.alpha,
                     "contribution": float(contrib[k]), "radial": bool(radial[k])})
    return rows


# ---------------------------------------------------------------------------
# I(x, y)


def inner_integral_I(x, y):
    """``(1/x²) ∫_0^{2π} |√(x²−1) y cos θ + √(1−y²)| dθ`` for x ≥ 1, 0 ≤ y ≤ 1."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~(x >= 1)) or np.any(~((y >= 0) & (y <= 1))):
        raise InvalidArgumentError("inner_integral_I needs x >= 1 and 0 <= y <= 1")
    xy = x * y
    val = abs_cos_integral(np.sqrt(x * x - 1) * y, np.sqrt(1 - y * y), (xy - 1) * (xy + 1)) / (x * x)
    return float(val) if val.ndim == 0 else val


def i_grid(nx: int, ny: int, x_max: float = 3.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """I over x ∈ [1, x_max], y ∈ [1/x, 1]; returns ``(X, Y, I)`` of shape ``(nx, ny)``."""
    if nx < 2 or ny < 2:
        raise InvalidArgumentError("grid needs at least 2 points per axis")
    xs = np.linspace(1.0, x_max, nx)
    s = np.linspace(0.0, 1.0, ny)
    X = np.repeat(xs[:, None], ny, axis=1)
    Y = 1 / X + s[None, :] * (1 - 1 / X)
    return X, Y, inner_integral_I(X, Y)


def max_I(nx: int = 400, ny: int = 400, x_max: float = 3.0, refine: bool = True) -> tuple[float, float, float]:
    """Maximum of I over the efficient region; ``(value, x, y)``.

    A grid search followed (optionally) by a pattern-search polish in the
    coordinates ``(x, s)`` with ``y = 1/x + s (1 − 1/x)``.
    """
    X, Y, Z = i_grid(nx, ny, x_max)
    k = np.unravel_index(int(np.argmax(Z)), Z.shape)
    best = (float(Z[k]), float(X[k]), float(Y[k]))
    if not refine:
        return best

    def to_xy(v):
        x = np.clip(v[:, 0], 1.0, x_max)
        s = np.clip(v[:, 1], 0.0, 1.0)
        return x, 1 / x + s * (1 - 1 / x)

    def neg(v):
        return -inner_integral_I(*to_xy(v))

    s0 = (best[2] - 1 / best[1]) / (1 - 1 / best[1]) if best[1] > 1 else 0.0
    step = max((x_max - 1) / (nx - 1), 1 / (ny - 1))
    v, fv = pattern_search(neg, np.array([[best[1], s0]]), step, 1e-10)
    x, y = to_xy(v)
    if -fv[0] > best[0]:
        best = (float(-fv[0]), float(x[0]), float(y[0]))
    return best


def boundary_maximum() -> tuple[float, float]:
    """Maximum of 2π√(x²−1)/x³ (I on y = 1/x), by golden section; ``(value, x)``."""
    x, f = golden_section(lambda x: -2 * math.pi * math.sqrt(x * x - 1) / x ** 3, 1.0, 3.0, 1e-12)
    return -f, x


# ---------------------------------------------------------------------------
# Efficient inspection


def line_distances(curve: PolyCurve) -> np.ndarray:
    """Distance from the origin to the supporting line of every (non-degenerate) edge."""
    a, b = curve.edges()
    e = b - a
    ell2 = np.einsum("ij,ij->i", e, e)
    keep = ell2 > 0
    a, e, ell2 = a[keep], e[keep], ell2[keep]
    t = -np.einsum("ij,ij->i", a, e) / ell2
    return np.linalg.norm(a + t[:, None] * e, axis=1)


def is_efficient_inspection(curve) -> bool:
    """Inspects the sphere and no edge line enters it."""
    curve = as_polycurve(curve)
    if not inspects_sphere(curve):
        return False
    return bool(np.all(line_distances(curve) >= 1 - LINE_TOL))


def _first_offending(pts: np.ndarray) -> int | None:
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        e = b - a
        ee = e @ e
        if ee == 0:
            continue
        foot = a - (a @ e) / ee * e
        if np.linalg.norm(foot) < 1 - LINE_TOL:
            return i
    return None


def _cone_gap(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Positive strictly inside the tangent cone from ``p`` to the unit sphere."""
    np_ = np.linalg.norm(p)
    axis = -p / np_
    cos_beta = math.sqrt(1 - 1 / (np_ * np_))
    v = np.atleast_2d(x) - p
    return v @ axis - np.linalg.norm(v, axis=1) * cos_beta


def _shortcut(pts: np.ndarray, i: int) -> np.ndarray:
    """One step of the shortcut: remove the offending edge i -> i+1."""
    n = len(pts)
    j = (i + 1) % n
    a, b = pts[i], pts[j]
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na > nb or (na == nb and tuple(a) <= tuple(b)):
        forward = True  # p = pts[i], arc runs i+1, i+2, ..., back to i
    else:
        forward = False
    order = np.arange(n) if forward else (n - 1 - np.arange(n))
    seq = pts[order]
    start = i if forward else n - 1 - j
    seq = np.roll(seq, -start, axis=0)  # seq[0] = p, seq[1] = p'
    p = seq[0]
    gaps = _cone_gap(seq[1:], p)
    out = np.flatnonzero(gaps <= 0)
    if out.size == 0 or gaps[0] <= 0:
        raise InternalInconsistencyError("shortcut: arc never leaves the tangent cone")
    k = int(out[0]) + 1  # first vertex of the arc outside the cone (index into seq)
    lo_pt, hi_pt = seq[k - 1], seq[k]
    if k == len(seq) - 0 or not np.any(hi_pt - p):
        raise InternalInconsistencyError("shortcut: cone exit only at the apex")

    def g(s):
        return float(_cone_gap(lo_pt + s * (hi_pt - lo_pt), p)[0])

    s = bisect(g, 0.0, 1.0, tol=1e-12)
    if g(s) > 0:
        s = min(1.0, s + 1e-12)
    while g(s) > 0 and s < 1.0:
        s = min(1.0, s + 1e-10)
    q = lo_pt + s * (hi_pt - lo_pt)
    rest = seq[k:]
    if np.linalg.norm(rest[0] - q) <= 1e-12:
        rest = rest[1:]
    new = np.vstack([p[None, :], q[None, :], rest])
    return new if forward else new[::-1]


def make_efficient(curve: PolyCurve, return_history: bool = False):
    """Shortcut offending edges until no edge line enters the sphere.

    While some edge line enters the sphere, take the edge's vertex p farther
    from the origin, walk the curve from the edge's other end away from p until
    it leaves the tangent cone from p to the sphere, and replace that stretch by
    the straight segment from p to the exit point.  Length never increases.
    """
    if not isinstance(curve, PolyCurve) or not curve.closed:
        raise InvalidArgumentError("make_efficient needs a closed polygon")
    if not inspects_sphere(curve):
        raise InvalidArgumentError("make_efficient needs an inspection curve")
    pts = np.array(curve.points)
    cap = 10 * len(pts)
    lengths = [curve.length()]
    for _ in range(cap):
        i = _first_offending(pts)
        if i is None:
            break
        pts = _shortcut(pts, i)
        lengths.append(PolyCurve(pts, closed=True).length())
        if lengths[-1] > lengths[-2] + 1e-12:
            raise InternalInconsistencyError("shortcut increased the length")
    else:
        if _first_offending(pts) is not None:
            raise NonTerminationError(f"make_efficient exceeded {cap} iterations")
    out = curve if len(lengths) == 1 else PolyCurve(pts, closed=True)
    return (out, lengths) if return_history else out


def verify_horizon_bounds(curve, tol: float = 1e-8, rel_slack: float = 1e-6) -> tuple[float, float, float]:
    """``(8π, H, 4π/(3√3) L)``; the upper entry is ``inf`` unless the inspection is efficient.

    Raises :class:`InternalInconsistencyError` if the sandwich fails by more than
    the quadrature error plus ``rel_slack`` relative: a polygonal sample of a
    smooth inspection curve misses the sphere by the sampling sagitta.
    """
    poly = as_polycurve(curve)
    if not poly.closed:
        raise InvalidArgumentError("horizon bounds need a closed curve")
    est = horizon(poly, tol)
    slack = est.abs_error + tol + rel_slack * est.value
    if est.value < LOWER_BOUND - slack:
        raise InternalInconsistencyError(f"horizon {est.value} below 8π")
    upper = math.inf
    if is_efficient_inspection(poly):
        upper = UPPER_FACTOR * poly.length()
        if est.value > upper + slack:
            raise InternalInconsistencyError(f"horizon {est.value} above {upper}")
    return LOWER_BOUND, est.value, upper
