"""Planar tests on convex polygons: equal parallel chords (central symmetry),
inscribed rectangles through two points, the rectangle-iteration orbit, and
circle fitting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .body import Polygon2, Segment, chord, hausdorff_distance
from .errors import (
    ConstructionBreakdown,
    DegenerateChord,
    DegenerateInput,
    PointOutsideBody,
    PointOutsideCircle,
)
from .geometry import as_point, unit

INTERIOR_MARGIN = 1e-9


def uniform_directions(n_dirs: int) -> np.ndarray:
    """Unit vectors at angles ``k * pi / n_dirs``, ``k = 0 .. n_dirs - 1``."""
    t = np.pi * np.arange(n_dirs) / n_dirs
    return np.c_[np.cos(t), np.sin(t)]


def boundary_tolerance(poly: Polygon2) -> float:
    """``2 (1 - cos(pi / N)) R`` for an N-gon of circumradius R about its centroid."""
    n = len(poly)
    radius = float(np.linalg.norm(poly.vertices - poly.centroid, axis=1).max())
    return 2.0 * (1.0 - np.cos(np.pi / n)) * radius


def _require_interior(poly: Polygon2, *points) -> None:
    for p in points:
        if not poly.contains(p, margin=INTERIOR_MARGIN)[0]:
            raise PointOutsideBody(f"point {np.asarray(p).tolist()} is not interior to the polygon")


@dataclass(frozen=True, eq=False)
class SymmetryVerdict:
    passed: bool
    center: np.ndarray
    max_length_mismatch: float
    worst_direction: np.ndarray
    point_symmetry_distance: float
    tol: float
    n_dirs: int


def central_symmetry_test(poly: Polygon2, a, b, n_dirs: int = 128, tol: float = 1e-9) -> SymmetryVerdict:
    """Compare parallel chords through ``a`` and ``b`` over ``n_dirs`` directions.

    Equal lengths in every direction force central symmetry about the
    midpoint of ``[a, b]``; the polygon's Hausdorff distance to its point
    reflection about that midpoint is measured too, and the larger of the
    two discrepancies is reported.
    """
    a = as_point(a, 2)
    b = as_point(b, 2)
    _require_interior(poly, a, b)
    dirs = uniform_directions(n_dirs)
    mismatch = np.array([abs(chord(poly, a, u).length - chord(poly, b, u).length) for u in dirs])
    worst = int(np.argmax(mismatch))
    center = 0.5 * (a + b)
    flipped = Polygon2.hull_of(2.0 * center - poly.vertices)
    sym = hausdorff_distance(poly, flipped)
    total = max(float(mismatch[worst]), sym)
    return SymmetryVerdict(total <= tol, center, total, dirs[worst], sym, tol, n_dirs)


@dataclass(frozen=True, eq=False)
class RectangleRecord:
    """Residuals of the rectangle spanned by parallel chords through ``a`` and ``b``.

    ``ortho_residual`` is the largest offset, along the chord direction,
    between corresponding endpoints of the two chords. ``corner_residual``
    is the largest distance from the boundary of a corner obtained by
    carrying one chord's endpoints perpendicularly onto the other chord's
    line.
    """

    direction: np.ndarray
    chord_a: Segment
    chord_b: Segment
    length_residual: float
    ortho_residual: float
    corner_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.length_residual, self.ortho_residual, self.corner_residual) <= self.tol

    @property
    def angle(self) -> float:
        return float(np.arctan2(self.direction[1], self.direction[0]))


@dataclass(frozen=True, eq=False)
class RectangleVerdict:
    passed: bool
    records: list[RectangleRecord]
    tol: float

    @property
    def max_residual(self) -> float:
        return max(max(r.length_residual, r.ortho_residual, r.corner_residual) for r in self.records)


def inscribed_rectangle_test(poly: Polygon2, a, b, direction, tol: float | None = None) -> RectangleRecord:
    a = as_point(a, 2)
    b = as_point(b, 2)
    u = unit(as_point(direction, 2))
    _require_interior(poly, a, b)
    tol = boundary_tolerance(poly) if tol is None else tol
    ca = chord(poly, a, u)
    cb = chord(poly, b, u)
    if ca.length <= 1e-12 or cb.length <= 1e-12:
        raise DegenerateChord("chord through a or b is degenerate")
    ends_a = np.stack([ca.a, ca.b])
    ends_b = np.stack([cb.a, cb.b])
    ortho = float(np.abs((ends_b - ends_a) @ u).max())
    nu = np.array([-u[1], u[0]])
    onto_b = ends_a + np.outer((b - ends_a) @ nu, nu)
    onto_a = ends_b + np.outer((a - ends_b) @ nu, nu)
    corner = float(poly.boundary_distance(np.concatenate([onto_b, onto_a])).max())
    return RectangleRecord(u, ca, cb, abs(ca.length - cb.length), ortho, corner, tol)


def rectangle_battery(poly: Polygon2, a, b, n_dirs: int = 128, tol: float | None = None) -> RectangleVerdict:
    """Run :func:`inscribed_rectangle_test` over uniformly spaced directions.

    Passing on sampled directions is only a surrogate for the every-direction
    hypothesis of the circle characterization.
    """
    tol = boundary_tolerance(poly) if tol is None else tol
    records = [inscribed_rectangle_test(poly, a, b, u, tol) for u in uniform_directions(n_dirs)]
    return RectangleVerdict(all(r.passed for r in records), records, tol)


# --------------------------------------------------------------------------
# circle fitting
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CircleFit:
    center: np.ndarray
    radius: float
    max_radial_deviation: float
    tol: float | None = None

    @property
    def passed(self) -> bool | None:
        return None if self.tol is None else self.max_radial_deviation <= self.tol


def _kasa(points: np.ndarray) -> tuple[np.ndarray, float]:
    x, y = points[:, 0], points[:, 1]
    A = np.c_[2.0 * x, 2.0 * y, np.ones_like(x)]
    sol, *_ = np.linalg.lstsq(A, x * x + y * y, rcond=None)
    center = sol[:2]
    return center, float(np.sqrt(sol[2] + center @ center))


def _boundary_samples(poly: Polygon2, total: int) -> np.ndarray:
    a, b = poly.edges()
    lengths = np.linalg.norm(b - a, axis=1)
    counts = np.maximum(1, np.round(total * lengths / lengths.sum()).astype(int))
    parts = [a[i] + np.outer(np.arange(c) / c, b[i] - a[i]) for i, c in enumerate(counts)]
    return np.concatenate(parts)


def circle_fit(poly: Polygon2, tol: float | None = None) -> CircleFit:
    """Least-squares (Kasa) circle through the polygon boundary.

    The boundary is sampled uniformly by arc length, so a square is not
    mistaken for its circumcircle. The reported deviation is exact over the
    whole boundary: the farthest vertex and the nearest edge point are both
    compared with the fitted radius.
    """
    if len(poly) < 3 or abs(poly.area) <= 1e-14 * max(1.0, float(np.ptp(poly.vertices)) ** 2):
        raise DegenerateInput("circle fit needs a polygon with nonzero area")
    samples = _boundary_samples(poly, max(1024, 8 * len(poly)))
    center, radius = _kasa(samples)
    far = float(np.linalg.norm(poly.vertices - center, axis=1).max())
    near = float(poly.boundary_distance(center)[0])
    if not poly.contains(center)[0]:
        near = float(np.linalg.norm(samples - center, axis=1).min())
    deviation = max(far - radius, radius - near)
    return CircleFit(center, radius, deviation, tol)


def circumcircle(points) -> tuple[np.ndarray, float]:
    """Center and radius of the least-squares circle through a few points."""
    pts = np.asarray(points, dtype=float)
    if np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-12) < 2:
        raise DegenerateInput("points are collinear")
    return _kasa(pts)


def circle_chord_halflength(r: float, t: float, direction) -> float:
    """Half the length of the chord of the circle ``|x| = r`` through ``(t, 0)``
    along ``direction``: ``sqrt(r^2 - t^2 sin^2 theta)``."""
    if not 0.0 <= t < r:
        raise PointOutsideCircle(f"need 0 <= t < r, got t={t}, r={r}")
    d = as_point(direction, 2)
    sin2 = d[1] * d[1] / (d[0] * d[0] + d[1] * d[1])
    return float(np.sqrt(r * r - t * t * sin2))


# --------------------------------------------------------------------------
# rectangle iteration
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RectangleOrbit:
    """Corner sequence of the iterated inscribed rectangles.

    ``c[n], d[n]`` are the endpoints of the n-th chord through ``a``;
    ``gaps[n]`` is the distance between the circumcircle point chosen at
    step n and the corresponding boundary point of the polygon.
    """

    c: np.ndarray
    d: np.ndarray
    circle_center: np.ndarray
    circle_radius: float
    gaps: np.ndarray
    limit_points: tuple[np.ndarray, np.ndarray]
    converged: bool

    @property
    def steps(self) -> int:
        return len(self.c) - 1

    def distance_to_limit(self) -> np.ndarray:
        lc, ld = self.limit_points
        return np.minimum(np.linalg.norm(self.c - lc, axis=1), np.linalg.norm(self.c - ld, axis=1))


def _second_circle_point(center, radius, start, through) -> np.ndarray:
    """Other intersection of the line ``start -> through`` with the circle."""
    u = unit(through - start)
    w = start - center
    bq = float(u @ w)
    disc = bq * bq - (float(w @ w) - radius * radius)
    if disc < 0.0:
        raise ConstructionBreakdown("line misses the circumcircle")
    roots = (-bq - np.sqrt(disc), -bq + np.sqrt(disc))
    s = roots[0] if abs(roots[0]) > abs(roots[1]) else roots[1]
    return start + s * u


def _second_polygon_point(poly: Polygon2, start, through) -> np.ndarray:
    u = unit(through - start)
    seg = chord(poly, through, u)
    if seg.empty:
        raise ConstructionBreakdown("line misses the polygon")
    ends = np.stack([seg.a, seg.b])
    return ends[int(np.argmax(np.linalg.norm(ends - start, axis=1)))]


def iterate_rectangles(
    poly: Polygon2,
    a,
    b,
    dir0,
    steps: int = 50,
    tol: float | None = None,
) -> RectangleOrbit:
    """Iterate the inscribed-rectangle construction starting from direction ``dir0``.

    From chords ``[c0, d0]`` through ``a`` and ``[c0', d0']`` through ``b``
    the next corner ``c1`` is the second point of the first rectangle's
    circumcircle on the line through ``d0'`` and ``a``, and ``d1'`` the second
    point on the line through ``c0`` and ``b``; then ``d1 = d0'``,
    ``c1' = c0`` and the step repeats. Each circle point is compared with
    the polygon's own boundary point on the same line; a gap above ``tol``
    (default ``2 * boundary_tolerance(poly)``) raises
    :class:`ConstructionBreakdown`. Stops early once ``c`` moves less than
    1e-12.
    """
    a = as_point(a, 2)
    b = as_point(b, 2)
    if np.linalg.norm(a - b) <= 1e-12:
        raise DegenerateInput("a and b must be distinct")
    tol = 2.0 * boundary_tolerance(poly) if tol is None else tol
    first = inscribed_rectangle_test(poly, a, b, dir0, tol)
    if not first.passed:
        raise ConstructionBreakdown("chords through a and b do not span an inscribed rectangle")
    c, d = first.chord_a.a, first.chord_a.b
    cp, dp = first.chord_b.a, first.chord_b.b
    center, radius = circumcircle(np.stack([c, d, dp, cp]))

    axis = chord(poly, a, b - a)
    limits = (axis.a, axis.b)

    cs, ds, gaps = [c], [d], [0.0]
    converged = False
    for _ in range(steps):
        c_next = _second_circle_point(center, radius, dp, a)
        gap_c = float(np.linalg.norm(c_next - _second_polygon_point(poly, dp, a)))
        dp_next = _second_circle_point(center, radius, c, b)
        gap_d = float(np.linalg.norm(dp_next - _second_polygon_point(poly, c, b)))
        gap = max(gap_c, gap_d)
        if gap > tol:
            raise ConstructionBreakdown(f"circumcircle point is {gap:.3g} away from the polygon boundary")
        c, d, cp, dp = c_next, dp, c, dp_next
        moved = float(np.linalg.norm(c - cs[-1]))
        cs.append(c)
        ds.append(d)
        gaps.append(gap)
        if moved < 1e-12:
            converged = True
            break
    return RectangleOrbit(np.array(cs), np.array(ds), center, radius, np.array(gaps), limits, converged)
