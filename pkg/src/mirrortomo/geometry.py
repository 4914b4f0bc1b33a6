"""Affine and Euclidean primitives: points, lines, hyperplanes, reflections,
orthogonal projections, dihedral bisectors and 2D frames inside 3D planes.

Points are plain float64 numpy arrays. Most functions accept a single point
of shape ``(n,)`` or a stack of points of shape ``(k, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpan, GeometryError, LineNotOnPlane

UNIT_TOL = 1e-12
PLANE_DOT_TOL = 1e-10
PLANE_OFFSET_TOL = 1e-9


def as_point(x, dim: int | None = None) -> np.ndarray:
    p = np.asarray(x, dtype=float)
    if p.ndim != 1:
        raise GeometryError(f"expected a point, got array of shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise GeometryError(f"expected a point of dimension {dim}, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise GeometryError("point has non-finite coordinates")
    return p


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0 or not np.isfinite(n):
        raise GeometryError("cannot normalize a zero or non-finite vector")
    return v / n


@dataclass(frozen=True, eq=False)
class Line:
    """Line ``{base + t * direction}``; ``direction`` is normalized on construction."""

    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        base = as_point(self.base)
        d = unit(as_point(self.direction, base.shape[0]))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", d)

    @classmethod
    def through(cls, a, b) -> "Line":
        a = as_point(a)
        return cls(a, as_point(b, a.shape[0]) - a)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def point(self, t: float) -> np.ndarray:
        return self.base + t * self.direction

    def distance(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        rel = x - self.base
        along = rel @ self.direction
        perp = rel - np.multiply.outer(along, self.direction)
        return np.linalg.norm(perp, axis=-1)

    def as_dict(self) -> dict:
        return {"base": self.base.tolist(), "direction": self.direction.tolist()}


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The set ``{x : <normal, x> = offset}``.

    The normal is rescaled to unit length on construction (the offset is
    rescaled with it). ``(n, c)`` and ``(-n, -c)`` describe the same plane;
    use :func:`planes_equal` rather than ``==``.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        raw = as_point(self.normal)
        norm = float(np.linalg.norm(raw))
        if norm == 0.0:
            raise GeometryError("hyperplane normal must be nonzero")
        object.__setattr__(self, "normal", raw / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @classmethod
    def from_point_normal(cls, point, normal) -> "Hyperplane":
        n = unit(as_point(normal))
        return cls(n, float(n @ as_point(point, n.shape[0])))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def signed_distance(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.normal - self.offset

    def contains(self, x, tol: float = 1e-10) -> bool:
        return bool(np.all(np.abs(self.signed_distance(x)) <= tol))

    def contains_line(self, line: Line, tol: float = 1e-9) -> bool:
        return self.contains(np.stack([line.base, line.base + line.direction]), tol)

    def as_dict(self) -> dict:
        return {"normal": self.normal.tolist(), "offset": self.offset}


def planes_equal(p: Hyperplane, q: Hyperplane) -> bool:
    dot = float(p.normal @ q.normal)
    if abs(dot) <= 1.0 - PLANE_DOT_TOL:
        return False
    sign = 1.0 if dot > 0 else -1.0
    return abs(p.offset - sign * q.offset) < PLANE_OFFSET_TOL * (1.0 + abs(p.offset))


def reflect_point(mirror: Hyperplane, x) -> np.ndarray:
    """Reflect ``x`` (one point or a ``(k, n)`` stack) across ``mirror``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != mirror.dim:
        raise GeometryError("dimension mismatch between mirror and point")
    s = x @ mirror.normal - mirror.offset
    return x - 2.0 * np.multiply.outer(s, mirror.normal)


def orthogonal_project_point(target: Hyperplane, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != target.dim:
        raise GeometryError("dimension mismatch between plane and point")
    s = x @ target.normal - target.offset
    return x - np.multiply.outer(s, target.normal)


def reflect_plane(mirror: Hyperplane, plane: Hyperplane) -> Hyperplane:
    n = plane.normal - 2.0 * (plane.normal @ mirror.normal) * mirror.normal
    # a point of the plane, reflected, fixes the new offset
    foot = plane.offset * plane.normal
    return Hyperplane(n, float(n @ reflect_point(mirror, foot)))


def plane_through(point, line: Line) -> Hyperplane:
    """Plane spanned by a point and a line in 3-space.

    Raises :class:`DegenerateSpan` when the point lies on the line
    (distance at most 1e-10).
    """
    p = as_point(point, 3)
    if line.dim != 3:
        raise GeometryError("plane_through is defined in 3-space only")
    rel = p - line.base
    perp = rel - (rel @ line.direction) * line.direction
    if np.linalg.norm(perp) <= 1e-10:
        raise DegenerateSpan("point lies on the line; the span is not a plane")
    n = unit(np.cross(line.direction, perp))
    return Hyperplane(n, float(n @ line.base))


def dihedral_bisectors(plane1: Hyperplane, plane2: Hyperplane, common: Line) -> list[Hyperplane]:
    """Planes through ``common`` whose reflection carries ``plane2`` onto ``plane1``.

    For coincident planes the two valid mirrors are the plane itself and
    the plane through the line perpendicular to it. Otherwise these are the
    two angle bisectors, with normals ``(n1 + n2)`` and ``(n1 - n2)``
    normalized; a bisector whose normal sum vanishes is dropped.
    """
    if common.dim != 3:
        raise GeometryError("dihedral_bisectors is defined in 3-space only")
    for pl in (plane1, plane2):
        if not pl.contains_line(common, tol=1e-9):
            raise LineNotOnPlane("common line is not contained in both planes")
    if planes_equal(plane1, plane2):
        perp = unit(np.cross(common.direction, plane1.normal))
        return [plane1, Hyperplane(perp, float(perp @ common.base))]
    out = []
    for raw in (plane1.normal + plane2.normal, plane1.normal - plane2.normal):
        norm = float(np.linalg.norm(raw))
        if norm < 1e-12:
            continue
        n = raw / norm
        out.append(Hyperplane(n, float(n @ common.base)))
    return out


def complement_basis(normal) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement of ``normal``.

    Deterministic: Gram-Schmidt over the coordinate axes, starting from the
    axis least aligned with the normal.
    """
    n = unit(normal)
    dim = n.shape[0]
    order = np.argsort(np.abs(n), kind="stable")
    basis = []
    for i in order:
        v = np.zeros(dim)
        v[i] = 1.0
        v = v - (v @ n) * n
        for b in basis:
            v = v - (v @ b) * b
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == dim - 1:
            break
    return np.array(basis)


@dataclass(frozen=True, eq=False)
class SectionFrame:
    """Isometric embedding ``(u, v) -> origin + u * e1 + v * e2`` of the plane into 3-space."""

    origin: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.e1, self.e2)

    @property
    def plane(self) -> Hyperplane:
        return Hyperplane.from_point_normal(self.origin, self.normal)

    def embed(self, uv) -> np.ndarray:
        uv = np.asarray(uv, dtype=float)
        return self.origin + np.multiply.outer(uv[..., 0], self.e1) + np.multiply.outer(uv[..., 1], self.e2)

    def coords(self, x) -> np.ndarray:
        rel = np.asarray(x, dtype=float) - self.origin
        return np.stack([rel @ self.e1, rel @ self.e2], axis=-1)


def section_frame(plane: Hyperplane, hint_origin) -> SectionFrame:
    if plane.dim != 3:
        raise GeometryError("section frames exist for planes in 3-space only")
    origin = orthogonal_project_point(plane, as_point(hint_origin, 3))
    n = plane.normal
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(n)))] = 1.0
    e1 = unit(axis - (axis @ n) * n)
    e2 = np.cross(n, e1)
    return SectionFrame(origin, e1, e2)


def line_plane_intersection(line: Line, plane: Hyperplane) -> np.ndarray | None:
    denom = float(line.direction @ plane.normal)
    if abs(denom) < 1e-14:
        return None
    t = (plane.offset - float(line.base @ plane.normal)) / denom
    return line.point(t)
