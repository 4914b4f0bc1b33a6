"""Two ball configurations in which no mirror can exist between the sections.

* :func:`sphere_offset_counterexample`: ball centered at the origin, points
  ``q = (x0, 0, 0)`` and ``-q``, and the line ``M_k = {x = x0, z = -k}``. The
  plane through ``q`` and ``M_k`` cuts a strictly smaller disc than the plane
  through ``-q`` and ``M_k``, so the sections cannot be isometric.
* :func:`ball_unequal_distance_search`: points ``q1, q2`` on a line through
  the center and a plane ``H0`` perpendicular to that line; some line in
  ``H0`` gives the two spanned planes sections of different area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .body import ball_section_area
from .errors import BadConfiguration, BadParameters
from .generators import facet_sag, make_ball
from .geometry import Hyperplane, Line, as_point, plane_through, section_frame, unit
from .harness import MirrorTestResult, SamplingPolicy, Scenario, TolerancePolicy, section_mirror_test


@dataclass(frozen=True, eq=False)
class SphereOffsetResult:
    r: float
    x0: float
    k: float
    A: float
    A_k: float
    great_disc_area: float
    plane_distance: float
    discretization_bound: float
    mirror_result: MirrorTestResult

    @property
    def margin(self) -> float:
        return self.A_k - self.A

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "x0": self.x0,
            "k": self.k,
            "A": self.A,
            "A_k": self.A_k,
            "margin": self.margin,
            "great_disc_area": self.great_disc_area,
            "A_k_within_great_disc": self.A_k <= self.great_disc_area,
            "plane_distance": self.plane_distance,
            "discretization_bound": self.discretization_bound,
            "mirror_status": self.mirror_result.status.value,
            "mirror_distances": list(self.mirror_result.distances),
            "mirror_threshold": self.mirror_result.threshold,
        }


def sphere_offset_counterexample(
    r: float, x0: float, k: float, n_vertices: int = 2000, tol_factor: float = 5.0
) -> SphereOffsetResult:
    """Closed-form areas plus a mirror test on a discretized ball.

    The mirror tolerance is ``tol_factor`` times the ball's facet sag.
    """
    if not (r > 0 and 0 < x0 < r and k > 0):
        raise BadParameters(f"need r > 0, 0 < x0 < r and k > 0; got r={r}, x0={x0}, k={k}")
    q = np.array([x0, 0.0, 0.0])
    M = Line(np.array([x0, 0.0, -k]), np.array([0.0, 1.0, 0.0]))
    origin = np.zeros(3)
    pi1 = plane_through(q, M)
    pi2 = plane_through(-q, M)
    A = ball_section_area(r, origin, pi1)
    A_k = ball_section_area(r, origin, pi2)

    ball = make_ball(origin, r, n_vertices)
    bound = facet_sag(ball, r)
    scenario = Scenario(
        ball, ball, Hyperplane([0.0, 0.0, 1.0], -k), q, -q,
        tol=TolerancePolicy(mirror_tol=tol_factor * bound / ball.diameter),
        sampling=SamplingPolicy(0, 0, 0),
        name=f"sphere-offset r={r} x0={x0} k={k}",
    )
    result = section_mirror_test(scenario, M)
    return SphereOffsetResult(
        r, x0, k, A, A_k, float(np.pi * r * r), abs(float(pi2.signed_distance(origin))), bound, result
    )


@dataclass(frozen=True, eq=False)
class UnequalDistanceResult:
    """Outcome of the line search; ``witness`` is None when nothing exceeded the threshold."""

    witness: dict | None
    symmetric: bool
    max_gap: float
    axis_gap: float
    n_lines: int
    threshold: float

    @property
    def status(self) -> str:
        if self.witness is not None:
            return "WITNESS"
        return "NO_WITNESS_SYMMETRIC" if self.symmetric else "NO_WITNESS"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "symmetric": self.symmetric,
            "witness": self.witness,
            "max_gap": self.max_gap,
            "axis_gap": self.axis_gap,
            "n_lines": self.n_lines,
            "threshold": self.threshold,
        }


def ball_unequal_distance_search(
    r: float,
    q1,
    q2,
    H0: Hyperplane,
    n_angles: int = 64,
    n_offsets: int = 16,
    threshold: float = 1e-3,
    center=(0.0, 0.0, 0.0),
    max_offset: float | None = None,
) -> UnequalDistanceResult:
    """Grid-search lines ``M`` in ``H0`` for unequal section areas of the planes
    through ``q1, M`` and ``q2, M``.

    Lines have angles ``i pi / n_angles`` and offsets, from the foot of the
    center on ``H0``, evenly spaced over ``[0, max_offset]`` (default
    ``2 r``); offset 0 gives the lines through the axis, where both planes
    contain the center. ``symmetric`` flags ``|q1 - O| = |q2 - O|``.
    """
    O = as_point(center, 3)
    q1 = as_point(q1, 3)
    q2 = as_point(q2, 3)
    if not r > 0:
        raise BadConfiguration("radius must be positive")
    if np.linalg.norm(q1 - O) >= r or np.linalg.norm(q2 - O) >= r:
        raise BadConfiguration("q1 and q2 must be interior to the ball")
    if np.linalg.norm(q1 - q2) <= 1e-12:
        raise BadConfiguration("q1 and q2 must differ")
    axis = unit(q2 - q1)
    if np.linalg.norm(np.cross(axis, q1 - O)) > 1e-12 * max(1.0, r):
        raise BadConfiguration("the center is not on the line through q1 and q2")
    if abs(float(axis @ H0.normal)) < 1.0 - 1e-10:
        raise BadConfiguration("H0 is not perpendicular to the line through q1 and q2")
    s1, s2 = float(H0.signed_distance(q1)), float(H0.signed_distance(q2))
    if s1 * s2 < 0:
        raise BadConfiguration("H0 meets the open segment between q1 and q2")

    frame = section_frame(H0, O)
    R = 2.0 * r if max_offset is None else max_offset
    offsets = np.linspace(0.0, R, n_offsets)
    symmetric = abs(np.linalg.norm(q1 - O) - np.linalg.norm(q2 - O)) <= 1e-12 * max(1.0, r)

    witness = None
    max_gap = axis_gap = 0.0
    for i in range(n_angles):
        angle = np.pi * i / n_angles
        d = np.cos(angle) * frame.e1 + np.sin(angle) * frame.e2
        nu = -np.sin(angle) * frame.e1 + np.cos(angle) * frame.e2
        for s in offsets:
            M = Line(frame.origin + s * nu, d)
            a1 = ball_section_area(r, O, plane_through(q1, M))
            a2 = ball_section_area(r, O, plane_through(q2, M))
            gap = abs(a1 - a2)
            max_gap = max(max_gap, gap)
            if s == 0.0:
                axis_gap = max(axis_gap, gap)
            if witness is None and gap > threshold:
                witness = {"line": M.as_dict(), "angle": float(angle), "offset": float(s), "a1": a1, "a2": a2}
    return UnequalDistanceResult(witness, bool(symmetric), max_gap, axis_gap, n_angles * n_offsets, threshold)
