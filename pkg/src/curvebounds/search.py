"""Small derivative-free search routines shared by the metric computations."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2
GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))


def fibonacci_sphere(n: int, hemisphere: bool = False) -> np.ndarray:
    """``n`` near-uniform unit vectors; with ``hemisphere`` only z >= 0 (antipodes dropped)."""
    i = np.arange(n) + 0.5
    z = 1 - i / n if hemisphere else 1 - 2 * i / n
    rho = np.sqrt(np.maximum(0.0, 1 - z * z))
    phi = GOLDEN_ANGLE * i
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def lattice_spacing(n: int, hemisphere: bool = False) -> float:
    """Typical angular distance between neighbouring lattice points."""
    area = 2 * math.pi if hemisphere else 4 * math.pi
    return math.sqrt(area / n)


def _poll_directions(dim: int) -> np.ndarray:
    if dim == 2:
        ang = np.arange(8) * math.pi / 4
        return np.column_stack([np.cos(ang), np.sin(ang)])
    axes = np.vstack([np.eye(3), -np.eye(3)])
    diag = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]) / math.sqrt(3)
    return np.vstack([axes, diag])


def _random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def pattern_search(
    f: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    step: float | np.ndarray,
    tol: float,
    *,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    seed: int = 0,
    max_iter: int = 10_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimize ``f`` from several starts at once by compass polling.

    ``f`` maps an ``(m, d)`` array of points to ``(m,)`` values.  Every start keeps
    its own step; a failed poll halves it, and a start is done once its step drops
    below ``tol``.  The poll stencil is re-rotated randomly each round so that
    non-smooth ridges do not stall the search.  ``project`` (if given) maps
    accepted points back onto a constraint set, e.g. the unit sphere.

    Returns the final points ``(S, d)`` and their values ``(S,)``.
    """
    x = np.atleast_2d(np.array(x0, dtype=float))
    if project is not None:
        x = project(x)
    n_starts, dim = x.shape
    h = np.broadcast_to(np.asarray(step, dtype=float), (n_starts,)).copy()
    fx = f(x)
    base = _poll_directions(dim)
    rng = np.random.default_rng(seed)
    for _ in range(max_iter):
        active = np.flatnonzero(h >= tol)
        if active.size == 0:
            break
        dirs = base @ _random_rotation(rng, dim).T
        k = len(dirs)
        cand = x[active, None, :] + h[active, None, None] * dirs[None, :, :]
        cand = cand.reshape(-1, dim)
        if project is not None:
            cand = project(cand)
        fc = f(cand).reshape(len(active), k)
        best = np.argmin(fc, axis=1)
        fbest = fc[np.arange(len(active)), best]
        improved = fbest < fx[active]
        moved = active[improved]
        x[moved] = cand.reshape(len(active), k, dim)[improved, best[improved]]
        fx[moved] = fbest[improved]
        h[active[~improved]] *= 0.5
    return x, fx


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def bisect(g: Callable[[float], float], a: float, b: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of ``g`` in ``[a, b]`` where ``g(a)`` and ``g(b)`` differ in sign."""
    ga, gb = g(a), g(b)
    if ga == 0:
        return a
    if gb == 0:
        return b
    if (ga > 0) == (gb > 0):
        raise ValueError("bisect: root is not bracketed")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        gm = g(m)
        if gm == 0 or b - a < tol:
            return m
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)
