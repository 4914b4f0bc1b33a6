"""Body generators for building test scenarios."""

from __future__ import annotations

import zlib

import numpy as np

from .body import Polytope, convex_hull
from .errors import DegenerateInput
from .geometry import Hyperplane, reflect_point

SHAPE_CLASSES = ("sphere", "ball", "cube", "gaussian")


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Independent generator stream for ``label`` derived from one master seed."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(zlib.crc32(label.encode()),))
    return np.random.default_rng(ss)


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / n)
    azim = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.c_[np.cos(azim) * np.sin(polar), np.sin(azim) * np.sin(polar), np.cos(polar)]


def make_ball(center=(0.0, 0.0, 0.0), r: float = 1.0, n: int = 500) -> Polytope:
    """Polytope inscribed in a sphere, vertices on a Fibonacci lattice."""
    if n < 4 or not r > 0:
        raise DegenerateInput("make_ball needs n >= 4 and r > 0")
    return convex_hull(np.asarray(center, dtype=float) + r * fibonacci_sphere(n))


def make_ellipsoid(semiaxes, n: int = 500, center=(0.0, 0.0, 0.0)) -> Polytope:
    axes = np.asarray(semiaxes, dtype=float)
    if n < 4 or axes.shape != (3,) or np.any(axes <= 0):
        raise DegenerateInput("make_ellipsoid needs n >= 4 and three positive semiaxes")
    return convex_hull(np.asarray(center, dtype=float) + fibonacci_sphere(n) * axes)


def make_revolution_body(profile, n: int = 24, center=(0.0, 0.0, 0.0)) -> Polytope:
    """Body of revolution about the vertical axis through ``center``.

    ``profile`` is a sequence of ``(radius, height)`` rings; each ring with
    positive radius becomes a regular n-gon, a zero radius becomes a point
    on the axis.
    """
    prof = np.asarray(profile, dtype=float).reshape(-1, 2)
    if n < 4 or np.any(prof[:, 0] < 0):
        raise DegenerateInput("make_revolution_body needs n >= 4 and nonnegative radii")
    t = 2.0 * np.pi * np.arange(n) / n
    rings = []
    for radius, height in prof:
        if radius == 0.0:
            rings.append(np.array([[0.0, 0.0, height]]))
        else:
            rings.append(np.c_[radius * np.cos(t), radius * np.sin(t), np.full(n, height)])
    return convex_hull(np.asarray(center, dtype=float) + np.concatenate(rings))


def make_random_polytope(seed: int, n: int, shape_class: str = "sphere", dim: int = 3) -> Polytope:
    """Hull of ``n`` random points; ``"sphere"`` puts every point on the unit sphere
    so all of them survive as vertices."""
    if n < dim + 1:
        raise DegenerateInput(f"need at least {dim + 1} points")
    rng = np.random.default_rng(seed)
    if shape_class == "sphere":
        g = rng.standard_normal((n, dim))
        pts = g / np.linalg.norm(g, axis=1, keepdims=True)
    elif shape_class == "ball":
        g = rng.standard_normal((n, dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        pts = g * rng.random(n)[:, None] ** (1.0 / dim)
    elif shape_class == "cube":
        pts = rng.uniform(-1.0, 1.0, (n, dim))
    elif shape_class == "gaussian":
        pts = rng.standard_normal((n, dim))
    else:
        raise DegenerateInput(f"unknown shape class {shape_class!r}; choose from {SHAPE_CLASSES}")
    return convex_hull(pts)


def make_box(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0)) -> Polytope:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    dim = lo.shape[0]
    corners = np.array(np.meshgrid(*[[0, 1]] * dim, indexing="ij")).reshape(dim, -1).T
    return convex_hull(lo + corners * (hi - lo))


def make_cross_polytope(radius: float = 1.0, dim: int = 3, center=None) -> Polytope:
    """Octahedron in 3D: the points ``center +- radius * e_i``."""
    eye = np.eye(dim) * radius
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    return convex_hull(c + np.concatenate([eye, -eye]))


def make_mirror_pair(body: Polytope, mirror: Hyperplane) -> tuple[Polytope, Polytope]:
    """``(body, reflection of body)`` with vertex lists in matching order."""
    return body, Polytope(reflect_point(mirror, body.vertices), flat=body.flat)


def facet_sag(body: Polytope, semiaxes, center=(0.0, 0.0, 0.0)) -> float:
    """Largest gap, over facet normals, between an ellipsoid's support function
    and the inscribed polytope's facet planes.

    For a ball this is ``r - min facet distance``, the discretization bound
    used for tolerances on curved bodies.
    """
    axes = np.broadcast_to(np.asarray(semiaxes, dtype=float), (body.dim,))
    eq = body.facet_equations
    normals, offsets = eq[:, :-1], -eq[:, -1] - eq[:, :-1] @ np.asarray(center, dtype=float)
    support = np.sqrt(((normals * axes) ** 2).sum(axis=1))
    return float((support - offsets).max())
