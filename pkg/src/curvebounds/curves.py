"""Curve representations: sampled polylines and exact piecewise-analytic curves.

Points are plain ``numpy`` arrays of shape ``(3,)``; a :class:`PolyCurve` holds an
``(N, 3)`` vertex array.  Piecewise curves are chains of :class:`Line`,
:class:`Arc` and :class:`Helix` segments with closed-form lengths.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import DegenerateCurveError, InvalidArgumentError

CHAIN_TOL = 1e-9
ORTHO_TOL = 1e-12


def _vec(p) -> np.ndarray:
    a = np.array(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError(f"non-finite coordinates: {p!r}")
    a.setflags(write=False)
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class ParamPoint(NamedTuple):
    """Location on a curve: segment (edge) index plus local parameter in [0, 1]."""

    segment: int
    s: float


# ---------------------------------------------------------------------------
# Polylines


@dataclass(frozen=True, eq=False)
class PolyCurve:
    """Ordered vertices; when ``closed`` the last vertex joins back to the first."""

    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise InvalidArgumentError(f"expected an (N, 3) vertex array, got shape {pts.shape}")
        if pts.shape[1] == 2:
            pts = np.column_stack([pts, np.zeros(len(pts))])
        if len(pts) < 2:
            raise InvalidArgumentError("a PolyCurve needs at least 2 vertices")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("PolyCurve vertices must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Start and end points of every edge, including the closing edge."""
        p = self.points
        if self.closed:
            return p, np.roll(p, -1, axis=0)
        return p[:-1], p[1:]

    def edge_vectors(self) -> np.ndarray:
        a, b = self.edges()
        return b - a

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edge_vectors(), axis=1)

    def length(self) -> float:
        return float(self.edge_lengths().sum())

    def point_at(self, where: ParamPoint) -> np.ndarray:
        a, b = self.edges()
        return a[where.segment] + where.s * (b[where.segment] - a[where.segment])

    def transformed(self, rotation=None, translation=None, scale: float = 1.0) -> "PolyCurve":
        p = self.points * scale
        if rotation is not None:
            p = p @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            p = p + np.asarray(translation, dtype=float)
        return PolyCurve(p, self.closed)

    def repeated(self, times: int) -> "PolyCurve":
        """The same closed curve traversed ``times`` times."""
        if not self.closed:
            raise InvalidArgumentError("only closed curves can be traversed repeatedly")
        return PolyCurve(np.tile(self.points, (times, 1)), True)

    def to_json(self) -> dict:
        return {"kind": "polyline", "closed": bool(self.closed), "points": self.points.tolist()}


# ---------------------------------------------------------------------------
# Exact segments


def _helix_frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Canonical (e1, e2) completing ``axis`` to a right-handed frame."""
    ref = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = ref - (ref @ axis) * axis
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(axis, e1)


@dataclass(frozen=True, eq=False)
class Line:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _vec(self.a))
        object.__setattr__(self, "b", _vec(self.b))

    @property
    def exact_length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    def at(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)[..., None]
        return self.a + s * (self.b - self.a)

    def transformed(self, q: np.ndarray, t: np.ndarray) -> "Line":
        return Line(q @ self.a + t, q @ self.b + t)

    def to_json(self) -> dict:
        return {"type": "line", "a": self.a.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True, eq=False)
class Arc:
    """Circular arc ``center + radius (cos θ u + sin θ v)`` for θ from theta0 to theta1."""

    center: np.ndarray
    radius: float
    u: np.ndarray
    v: np.ndarray
    theta0: float
    theta1: float

    def __post_init__(self):
        for name in ("center", "u", "v"):
            object.__setattr__(self, name, _vec(getattr(self, name)))
        if self.radius <= 0:
            raise InvalidArgumentError("arc radius must be positive")
        if (abs(np.linalg.norm(self.u) - 1) > ORTHO_TOL or abs(np.linalg.norm(self.v) - 1) > ORTHO_TOL
                or abs(self.u @ self.v) > ORTHO_TOL):
            raise InvalidArgumentError("arc plane basis (u, v) must be orthonormal")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "theta0", float(self.theta0))
        object.__setattr__(self, "theta1", float(self.theta1))

    @property
    def exact_length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)

    def at(self, s) -> np.ndarray:
        th = self.theta0 + np.asarray(s, dtype=float)[..., None] * (self.theta1 - self.theta0)
        return self.center + self.radius * (np.cos(th) * self.u + np.sin(th) * self.v)

    def transformed(self, q: np.ndarray, t: np.ndarray) -> "Arc":
        return Arc(q @ self.center + t, self.radius, q @ self.u, q @ self.v, self.theta0, self.theta1)

    def to_json(self) -> dict:
        return {"type": "arc", "center": self.center.tolist(), "radius": self.radius,
                "u": self.u.tolist(), "v": self.v.tolist(),
                "theta0": self.theta0, "theta1": self.theta1}


@dataclass(frozen=True, eq=False)
class Helix:
    """Helical arc ``origin + pitch θ axis + radius (cos θ e1 + sin θ e2)``.

    ``(e1, e2, axis)`` is the canonical right-handed frame built from ``axis``
    alone (see :func:`_helix_frame`), so the JSON form needs no extra basis.
    ``pitch`` is the rise per radian; its sign sets the handedness.
    """

    origin: np.ndarray
    axis: np.ndarray
    radius: float
    pitch: float
    theta0: float
    theta1: float

    def __post_init__(self):
        object.__setattr__(self, "origin", _vec(self.origin))
        axis = _vec(self.axis)
        n = np.linalg.norm(axis)
        if n == 0:
            raise InvalidArgumentError("helix axis must be nonzero")
        object.__setattr__(self, "axis", _frozen(axis / n))
        if self.radius <= 0:
            raise InvalidArgumentError("helix radius must be positive")
        for name in ("radius", "pitch", "theta0", "theta1"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        return _helix_frame(self.axis)

    @property
    def exact_length(self) -> float:
        return abs(self.theta1 - self.theta0) * math.hypot(self.radius, self.pitch)

    def at(self, s) -> np.ndarray:
        e1, e2 = self.frame
        th = self.theta0 + np.asarray(s, dtype=float)[..., None] * (self.theta1 - self.theta0)
        return (self.origin + self.pitch * th * self.axis
                + self.radius * (np.cos(th) * e1 + np.sin(th) * e2))

    def transformed(self, q: np.ndarray, t: np.ndarray) -> "Helix":
        """Image under ``x -> q x + t`` for any orthogonal ``q`` (proper or not)."""
        e1, e2 = self.frame
        new_e1, new_e2 = q @ e1, q @ e2
        new_axis = np.cross(new_e1, new_e2)  # keeps (e1, e2, axis) right-handed
        pitch = self.pitch * float(new_axis @ (q @ self.axis))
        c1, c2 = _helix_frame(new_axis)
        offset = math.atan2(new_e1 @ c2, new_e1 @ c1)
        origin = q @ self.origin + t - pitch * offset * new_axis
        return Helix(origin, new_axis, self.radius, pitch, self.theta0 + offset, self.theta1 + offset)

    def to_json(self) -> dict:
        return {"type": "helix", "origin": self.origin.tolist(), "axis": self.axis.tolist(),
                "radius": self.radius, "pitch": self.pitch,
                "theta0": self.theta0, "theta1": self.theta1}


Segment = Union[Line, Arc, Helix]


@dataclass(frozen=True, eq=False)
class PiecewiseCurve:
    segments: tuple
    closed: bool = False

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise InvalidArgumentError("a PiecewiseCurve needs at least one segment")
        object.__setattr__(self, "segments", segs)
        links = list(zip(segs[:-1], segs[1:]))
        if self.closed:
            links.append((segs[-1], segs[0]))
        for i, (s0, s1) in enumerate(links):
            gap = np.linalg.norm(s0.at(1.0) - s1.at(0.0))
            if gap > CHAIN_TOL:
                raise InvalidArgumentError(f"segments {i} and {(i + 1) % len(segs)} do not meet (gap {gap:.3g})")

    @property
    def exact_length(self) -> float:
        return float(sum(s.exact_length for s in self.segments))

    def length(self) -> float:
        return self.exact_length

    def point_at(self, where: ParamPoint) -> np.ndarray:
        return self.segments[where.segment].at(where.s)

    def corners(self) -> np.ndarray:
        """Start point of every segment."""
        return np.array([s.at(0.0) for s in self.segments])

    def transformed(self, q, t=None) -> "PiecewiseCurve":
        q = np.asarray(q, dtype=float)
        t = np.zeros(3) if t is None else np.asarray(t, dtype=float)
        return PiecewiseCurve(tuple(s.transformed(q, t) for s in self.segments), self.closed)

    def to_json(self) -> dict:
        return {"kind": "piecewise", "closed": bool(self.closed),
                "segments": [s.to_json() for s in self.segments]}


# ---------------------------------------------------------------------------
# Operations


def length(curve: PolyCurve | PiecewiseCurve) -> float:
    """Polygonal length of a polyline, or the exact analytic length of a piecewise curve."""
    return curve.length()


def sample(curve: PiecewiseCurve, points_per_unit_length: float) -> PolyCurve:
    """Inscribed polyline with roughly ``points_per_unit_length`` vertices per unit length.

    Line segments keep only their endpoints since they are already exact.
    """
    if not points_per_unit_length > 0:
        raise InvalidArgumentError("sampling density must be positive")
    chunks = []
    for seg in curve.segments:
        if isinstance(seg, Line):
            n = 1
        else:
            n = max(1, math.ceil(seg.exact_length * points_per_unit_length))
        chunks.append(seg.at(np.linspace(0.0, 1.0, n + 1))[:-1])
    if not curve.closed:
        chunks.append(curve.segments[-1].at(1.0)[None, :])
    return PolyCurve(np.vstack(chunks), curve.closed)


def sample_count(curve: PiecewiseCurve, per_segment: int) -> PolyCurve:
    """Inscribed polyline with exactly ``per_segment`` edges on each segment."""
    if per_segment < 1:
        raise InvalidArgumentError("per_segment must be >= 1")
    chunks = [seg.at(np.linspace(0.0, 1.0, per_segment + 1))[:-1] for seg in curve.segments]
    if not curve.closed:
        chunks.append(curve.segments[-1].at(1.0)[None, :])
    return PolyCurve(np.vstack(chunks), curve.closed)


def as_polycurve(curve: PolyCurve | PiecewiseCurve, density: float = 200.0) -> PolyCurve:
    if isinstance(curve, PolyCurve):
        return curve
    return sample(curve, density)


def check_orthonormal(basis: Sequence, tol: float = ORTHO_TOL) -> np.ndarray:
    b = np.atleast_2d(np.asarray(basis, dtype=float))
    if b.shape[1] != 3 or not 1 <= b.shape[0] <= 3:
        raise InvalidArgumentError("basis must be 1 to 3 vectors in R^3")
    if np.max(np.abs(b @ b.T - np.eye(len(b)))) > tol:
        raise InvalidArgumentError("basis vectors must be unit length and pairwise orthogonal")
    return b


def project(curve: PolyCurve, basis: Sequence) -> PolyCurve:
    """Orthogonal projection onto span(basis), in basis coordinates, zero-padded to 3D."""
    b = check_orthonormal(basis)
    coords = curve.points @ b.T
    out = np.zeros((len(coords), 3))
    out[:, : b.shape[0]] = coords
    return PolyCurve(out, curve.closed)


def arclength_reparam(curve: PolyCurve, n: int) -> PolyCurve:
    """``n`` vertices equally spaced in arclength.

    Open curves keep both endpoints; closed curves start at the first vertex and
    space the ``n`` vertices evenly around the whole loop.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    a, b = curve.edges()
    seg = np.linalg.norm(b - a, axis=1)
    total = seg.sum()
    if total <= 0:
        raise DegenerateCurveError("cannot reparametrize a zero-length curve")
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, total, n, endpoint=not curve.closed)
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(seg) - 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(seg[idx] > 0, (targets - cum[idx]) / seg[idx], 0.0)
    pts = a[idx] + np.clip(s, 0.0, 1.0)[:, None] * (b[idx] - a[idx])
    if not curve.closed:
        pts[-1] = curve.points[-1]
    return PolyCurve(pts, curve.closed)


def norms(curve: PolyCurve) -> tuple[float, float]:
    """(max, min) of ||γ|| over the polyline, the min taken over edges, not just vertices."""
    a, b = curve.edges()
    return float(np.linalg.norm(curve.points, axis=1).max()), float(segment_distances(np.zeros(3), a, b).min())


def segment_distances(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from point(s) ``p`` to segments ``[a_i, b_i]``.

    ``p`` may be ``(3,)`` (returns ``(E,)``) or ``(M, 3)`` (returns ``(M, E)``).
    """
    p = np.asarray(p, dtype=float)
    d = b - a
    dd = np.einsum("ij,ij->i", d, d)
    safe = np.where(dd > 0, dd, 1.0)
    if p.ndim == 1:
        ap = p - a
        t = np.clip(np.einsum("ij,ij->i", ap, d) / safe, 0.0, 1.0)
        return np.linalg.norm(ap - t[:, None] * d, axis=1)
    ap = p[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("mij,ij->mi", ap, d) / safe, 0.0, 1.0)
    return np.linalg.norm(ap - t[..., None] * d, axis=2)


# ---------------------------------------------------------------------------
# JSON


_SEGMENT_TYPES = {"line": Line, "arc": Arc, "helix": Helix}


def curve_from_json(obj: dict) -> PolyCurve | PiecewiseCurve:
    kind = obj.get("kind")
    closed = bool(obj.get("closed", False))
    if kind == "polyline":
        return PolyCurve(np.array(obj["points"], dtype=float), closed)
    if kind == "piecewise":
        segs = []
        for raw in obj["segments"]:
            raw = dict(raw)
            cls = _SEGMENT_TYPES.get(raw.pop("type", None))
            if cls is None:
                raise InvalidArgumentError(f"unknown segment type in {raw!r}")
            segs.append(cls(**raw))
        return PiecewiseCurve(tuple(segs), closed)
    raise InvalidArgumentError(f"unknown curve kind {kind!r}")


def dumps(curve: PolyCurve | PiecewiseCurve, indent: int | None = None) -> str:
    # float repr is the shortest string that round-trips bit-identically
    return json.dumps(curve.to_json(), indent=indent)


def loads(text: str) -> PolyCurve | PiecewiseCurve:
    return curve_from_json(json.loads(text))
