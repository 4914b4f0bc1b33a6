"""Convex polytopes and the body-level constructions built on them.

A convex body is represented by the extreme points of a polytope. Planar
work (sections, projections onto a plane, chords) happens on
:class:`Polygon2`, a counter-clockwise vertex cycle in the 2D coordinates of
a :class:`~mirrortomo.geometry.SectionFrame`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial.distance import pdist

from .errors import DegenerateInput, EmptyOperand, GeometryError, UnboundedProjection
from .geometry import (
    Hyperplane,
    SectionFrame,
    as_point,
    complement_basis,
    orthogonal_project_point,
    section_frame,
    unit,
)

DEDUP_REL_TOL = 1e-12


# --------------------------------------------------------------------------
# planar polygons
# --------------------------------------------------------------------------


def _cross2(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _dedupe(points: np.ndarray, rel_tol: float = DEDUP_REL_TOL) -> np.ndarray:
    """Indices of the points kept after merging near-duplicates (first occurrence wins)."""
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    span = points.max(axis=0) - points.min(axis=0)
    tol = rel_tol * max(float(np.linalg.norm(span)), 1e-300)
    order = np.lexsort(points.T[::-1])
    keep = []
    last = None
    for i in order:
        if last is not None and np.linalg.norm(points[i] - points[last]) <= tol:
            continue
        keep.append(i)
        last = i
    return np.sort(np.array(keep, dtype=int))


def hull2d_indices(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull. Returns indices of the extreme points in CCW order.

    Collinear boundary points are dropped. Starts from the lexicographically
    smallest point so the output is deterministic.
    """
    pts = np.asarray(points, dtype=float)
    idx = _dedupe(pts)
    if len(idx) <= 2:
        return idx[np.lexsort(pts[idx].T[::-1])] if len(idx) else idx
    idx = idx[np.lexsort(pts[idx].T[::-1])]
    lower: list[int] = []
    for i in idx:
        while len(lower) >= 2 and _cross2(pts[lower[-2]], pts[lower[-1]], pts[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper: list[int] = []
    for i in idx[::-1]:
        while len(upper) >= 2 and _cross2(pts[upper[-2]], pts[upper[-1]], pts[i]) <= 0:
            upper.pop()
        upper.append(i)
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 2:
        # all points collinear: monotone chain collapses to the two extremes
        ring = [idx[0], idx[-1]]
    return np.array(ring, dtype=int)


@dataclass(frozen=True, eq=False)
class Polygon2:
    """Convex polygon, vertices ``(k, 2)`` in counter-clockwise order.

    ``k`` may be 0 (empty), 1 (point) or 2 (segment) for degenerate
    sections; such polygons still work with :func:`hausdorff_distance`.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def hull_of(cls, points) -> "Polygon2":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return cls(pts[hull2d_indices(pts)])

    @classmethod
    def empty(cls) -> "Polygon2":
        return cls(np.zeros((0, 2)))

    @classmethod
    def regular(cls, n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> "Polygon2":
        t = phase + 2.0 * np.pi * np.arange(n) / n
        return cls(np.asarray(center, dtype=float) + radius * np.c_[np.cos(t), np.sin(t)])

    @classmethod
    def ellipse(cls, a: float, b: float, n: int) -> "Polygon2":
        t = 2.0 * np.pi * np.arange(n) / n
        return cls(np.c_[a * np.cos(t), b * np.sin(t)])

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3

    @property
    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Start points and end points of the boundary edges."""
        v = self.vertices
        if len(v) == 2:
            return v[:1], v[1:]
        return v, np.roll(v, -1, axis=0)

    def contains(self, x, margin: float = 0.0) -> np.ndarray:
        """True where the point is inside with clearance at least ``margin``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if len(self.vertices) < 3:
            return np.zeros(len(x), dtype=bool)
        a, b = self.edges()
        e = b - a
        el = np.linalg.norm(e, axis=1)
        rel = x[:, None, :] - a[None, :, :]
        signed = (e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]) / el[None, :]
        return np.all(signed >= margin, axis=1)

    def boundary_distance(self, x) -> np.ndarray:
        """Unsigned distance from each point to the boundary curve."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if len(self.vertices) == 1:
            return np.linalg.norm(x - self.vertices[0], axis=1)
        a, b = self.edges()
        return _point_segments_distance(x, a, b).min(axis=1)

    def distance(self, x) -> np.ndarray:
        """Distance from each point to the polygon as a filled convex set."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.is_empty:
            raise EmptyOperand("distance to an empty polygon")
        d = self.boundary_distance(x)
        if len(self.vertices) >= 3:
            d = np.where(self.contains(x), 0.0, d)
        return d


def _point_segments_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances, shape ``(len(x), len(a))``, from points to segments ``[a_i, b_i]``."""
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    rel = x[:, None, :] - a[None, :, :]
    t = np.einsum("kij,ij->ki", rel, ab) / np.where(denom > 0, denom, 1.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a[None, :, :] + t[..., None] * ab[None, :, :]
    return np.linalg.norm(x[:, None, :] - closest, axis=-1)


@dataclass(frozen=True, eq=False)
class Segment:
    a: np.ndarray
    b: np.ndarray
    empty: bool = False

    @property
    def length(self) -> float:
        return 0.0 if self.empty else float(np.linalg.norm(self.b - self.a))


# --------------------------------------------------------------------------
# polytopes
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex polytope given by its extreme points, ``vertices`` of shape ``(k, dim)``.

    ``flat`` marks a lower-dimensional body kept in ambient coordinates
    (for instance an orthogonal projection onto a hyperplane).
    """

    vertices: np.ndarray
    flat: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2:
            raise GeometryError("vertices must be a (k, dim) array")
        if not np.all(np.isfinite(v)):
            raise GeometryError("vertices must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @cached_property
    def diameter(self) -> float:
        return float(pdist(self.vertices).max()) if len(self.vertices) > 1 else 0.0

    @cached_property
    def hull(self) -> ConvexHull:
        if self.flat:
            raise GeometryError("flat polytope has no full-dimensional hull")
        return ConvexHull(self.vertices)

    @cached_property
    def edges(self) -> np.ndarray:
        """Unique vertex-index pairs of the triangulated hull (facet diagonals included)."""
        simp = self.hull.simplices
        k = simp.shape[1]
        pairs = np.concatenate([simp[:, [i, j]] for i in range(k) for j in range(i + 1, k)])
        pairs.sort(axis=1)
        return np.unique(pairs, axis=0)

    @cached_property
    def facet_equations(self) -> np.ndarray:
        """Rows ``(normal, d)`` with unit outward normal; interior is ``normal . x + d <= 0``."""
        eq = self.hull.equations
        return eq / np.linalg.norm(eq[:, :-1], axis=1, keepdims=True)

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        eq = self.facet_equations
        return np.all(x @ eq[:, :-1].T + eq[:, -1] <= tol, axis=1)

    def interior_margin(self, x) -> np.ndarray:
        """Distance from each point to the boundary, negative outside."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        eq = self.facet_equations
        return -(x @ eq[:, :-1].T + eq[:, -1]).max(axis=1)

    def transformed(self, fn) -> "Polytope":
        return Polytope(fn(self.vertices), flat=self.flat)


def _affine_frame(points: np.ndarray):
    """Centroid, singular values and right singular vectors of the centered cloud."""
    c = points.mean(axis=0)
    _, s, vt = np.linalg.svd(points - c, full_matrices=False)
    return c, s, vt


def convex_hull(points, dim: int | None = None) -> Polytope:
    """Reduce a point cloud to the extreme points of its convex hull.

    Parameters
    ----------
    points : (k, n) array_like
    dim : int, optional
        Dimension of the affine hull of the points; defaults to ``n``. When
        smaller than ``n`` the hull is computed inside the affine span and
        the result is flagged ``flat``, coordinates staying in n-space.

    For ``dim == 2`` the vertices come out in counter-clockwise order of the
    span's own coordinates. Output order is deterministic for a given input
    order.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise DegenerateInput("points must be a (k, n) array")
    n = pts.shape[1]
    dim = n if dim is None else dim
    if not 1 <= dim <= n:
        raise DegenerateInput(f"hull dimension {dim} invalid for {n}-dimensional points")
    keep = _dedupe(pts)
    pts_u = pts[keep]
    if len(pts_u) < dim + 1:
        raise DegenerateInput(f"need at least {dim + 1} distinct points, got {len(pts_u)}")
    c, s, vt = _affine_frame(pts_u)
    scale = max(float(s[0]), 1e-300)
    rank = int(np.sum(s > 1e-12 * scale)) if s[0] > 0 else 0
    if rank < dim:
        raise DegenerateInput(f"points span only {rank} dimensions, need {dim}")
    if dim < n and rank > dim and s[dim] > 1e-9 * scale:
        raise DegenerateInput(f"points are not contained in a {dim}-dimensional flat")
    local = (pts_u - c) @ vt[:dim].T if dim < n else pts_u
    if dim == 2:
        idx = hull2d_indices(local)
    elif dim == 1:
        idx = np.array([int(np.argmin(local[:, 0])), int(np.argmax(local[:, 0]))])
    else:
        idx = ConvexHull(local).vertices
    return Polytope(pts_u[idx], flat=dim < n)


@dataclass(frozen=True, eq=False)
class EmbeddedSection:
    polygon: Polygon2
    frame: SectionFrame

    @property
    def is_empty(self) -> bool:
        return self.polygon.is_empty

    @property
    def points3d(self) -> np.ndarray:
        if self.polygon.is_empty:
            return np.zeros((0, 3))
        return self.frame.embed(self.polygon.vertices)

    @property
    def area(self) -> float:
        return self.polygon.area


def plane_section(body: Polytope, plane: Hyperplane) -> EmbeddedSection:
    """Section of a 3D polytope by a plane, as a polygon in the plane's frame.

    The polygon is the hull of the crossings of all hull edges with the plane
    together with the vertices lying on it. The frame is
    ``section_frame(plane, body.centroid)``.
    """
    if body.dim != 3 or body.flat:
        raise GeometryError("plane_section needs a full-dimensional 3D polytope")
    frame = section_frame(plane, body.centroid)
    v = body.vertices
    s = plane.signed_distance(v)
    tol = 1e-12 * max(1.0, body.diameter)
    on = np.abs(s) <= tol
    e = body.edges
    sa, sb = s[e[:, 0]], s[e[:, 1]]
    crossing = (sa * sb < 0) & ~on[e[:, 0]] & ~on[e[:, 1]]
    ec = e[crossing]
    t = (sa[crossing] / (sa[crossing] - sb[crossing]))[:, None]
    pts = np.concatenate([v[on], v[ec[:, 0]] + t * (v[ec[:, 1]] - v[ec[:, 0]])])
    if len(pts) == 0:
        return EmbeddedSection(Polygon2.empty(), frame)
    return EmbeddedSection(Polygon2.hull_of(frame.coords(pts)), frame)


def orthogonal_projection_body(body: Polytope, target: Hyperplane) -> Polytope:
    """Hull of the orthogonal projections of the vertices; flagged flat."""
    if target.dim != body.dim:
        raise GeometryError("dimension mismatch between body and target plane")
    proj = orthogonal_project_point(target, body.vertices)
    return convex_hull(proj, dim=body.dim - 1)


def central_projection(body: Polytope, center, target: Hyperplane) -> Polygon2:
    """Image of the body under rays from ``center`` onto ``target``.

    Coordinates are those of ``section_frame(target, origin)``, so two
    projections onto the same plane are directly comparable.
    """
    c = as_point(center, 3)
    dc = float(target.signed_distance(c))
    if abs(dc) <= 1e-9:
        raise UnboundedProjection("projection center lies on the target plane")
    rel = body.vertices - c
    denom = rel @ target.normal
    t = -dc / np.where(denom == 0.0, np.nan, denom)
    if not np.all(np.isfinite(t)) or np.any(t <= 0.0) or np.any(np.abs(denom) <= 1e-12):
        raise UnboundedProjection("some ray from the center misses the target plane")
    hits = c + t[:, None] * rel
    frame = section_frame(target, np.zeros(3))
    return Polygon2.hull_of(frame.coords(hits))


def shadow_boundary(body: Polytope, direction, tol: float = 1e-9) -> np.ndarray:
    """Vertices on the shadow boundary of the polytope for light along ``direction``.

    These are the vertices whose projection along ``direction`` lies on the
    boundary of the projected hull (within ``tol`` scaled by the diameter),
    so vertical columns of vertices are returned whole. Rows are ordered
    cyclically by the angle of their projection, ties broken by height
    along ``direction``.
    """
    d = unit(as_point(direction, body.dim))
    basis = complement_basis(d)
    flat = body.vertices @ basis.T
    shadow = Polygon2.hull_of(flat)
    scale = max(1.0, body.diameter)
    on = shadow.boundary_distance(flat) <= tol * scale
    sel = np.flatnonzero(on)
    rel = flat[sel] - shadow.centroid
    ang = np.round(np.arctan2(rel[:, 1], rel[:, 0]), 12)
    height = body.vertices[sel] @ d
    order = np.lexsort((height, ang))
    return body.vertices[sel[order]]


def ball_section_area(radius: float, center, plane: Hyperplane) -> float:
    """Area of the disc cut from a ball by a plane: ``pi (r^2 - d^2)``, or 0 if disjoint."""
    if not radius > 0:
        raise GeometryError("radius must be positive")
    d = abs(float(plane.signed_distance(as_point(center, plane.dim))))
    if d >= radius:
        return 0.0
    return float(np.pi * (radius * radius - d * d))


def chord(poly: Polygon2, through, direction) -> Segment:
    """Intersection of the line ``through + t * direction`` with the polygon.

    Endpoints are ordered by increasing ``t``. Empty intersections, and lines
    that only touch the boundary at a single point, come back with
    ``empty=True``.
    """
    q = as_point(through, 2)
    d = unit(as_point(direction, 2))
    if len(poly) < 3:
        return Segment(q, q, empty=True)
    a, b = poly.edges()
    e = b - a
    el = np.linalg.norm(e, axis=1)
    f0 = (e[:, 0] * (q[1] - a[:, 1]) - e[:, 1] * (q[0] - a[:, 0])) / el
    f1 = (e[:, 0] * d[1] - e[:, 1] * d[0]) / el
    lo, hi = -np.inf, np.inf
    for c0, c1 in zip(f0, f1):
        if abs(c1) < 1e-15:
            if c0 < 0:
                return Segment(q, q, empty=True)
            continue
        t = -c0 / c1
        if c1 > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if not hi > lo:
        return Segment(q, q, empty=True)
    return Segment(q + lo * d, q + hi * d)


def _as_planar_sets(a, b) -> tuple[Polygon2, Polygon2]:
    def raw(x):
        if isinstance(x, Polygon2):
            return x.vertices
        if isinstance(x, EmbeddedSection):
            return x.points3d
        arr = np.asarray(x, dtype=float)
        return arr.reshape(1, -1) if arr.ndim == 1 else arr

    pa, pb = raw(a), raw(b)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyOperand("hausdorff distance of an empty set")
    if pa.shape[1] != pb.shape[1]:
        raise GeometryError("operands live in different dimensions")
    if pa.shape[1] == 3:
        both = np.concatenate([pa, pb])
        c, s, vt = _affine_frame(both)
        if len(s) > 2 and s[2] > 1e-9 * max(1.0, float(s[0])):
            raise GeometryError("3D operands of hausdorff_distance must be coplanar")
        pa, pb = (pa - c) @ vt[:2].T, (pb - c) @ vt[:2].T
    elif pa.shape[1] != 2:
        raise GeometryError("hausdorff_distance works on planar sets")
    return Polygon2.hull_of(pa), Polygon2.hull_of(pb)


def directed_hausdorff(a: Polygon2, b: Polygon2) -> float:
    # distance to a convex set is convex, so the sup over a is at a vertex
    return float(b.distance(a.vertices).max())


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two convex planar sets.

    Operands are :class:`Polygon2`, :class:`EmbeddedSection`, or point
    arrays in 2D or (coplanar) 3D, each standing for the hull of its points.
    """
    pa, pb = _as_planar_sets(a, b)
    return max(directed_hausdorff(pa, pb), directed_hausdorff(pb, pa))


def vertex_set_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two finite point sets (any dimension)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise EmptyOperand("hausdorff distance of an empty set")
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return float(max(da.max(), db.max()))
