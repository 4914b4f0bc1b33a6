"""The mirror-section experiment harness.

A :class:`Scenario` holds two 3D bodies, a hyperplane ``H`` and two points
``p1, p2`` off ``H``. For every sampled line ``M`` in ``H`` the harness cuts
``K1`` with the plane spanned by ``p1`` and ``M``, ``K2`` with the plane
spanned by ``p2`` and ``M``, and asks whether a reflection in some plane
through ``M`` carries the second section onto the first. Only the dihedral
bisectors of the two cutting planes can do that, so two candidates are
checked per line.
"""

from __future__ import annotations

import enum
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .body import (
    Polygon2,
    Polytope,
    convex_hull,
    hausdorff_distance,
    plane_section,
    shadow_boundary,
    vertex_set_hausdorff,
)
from .errors import BadConfiguration, GeometryError, NotOrthogonal
from .generators import rng_for
from .geometry import (
    Hyperplane,
    Line,
    as_point,
    complement_basis,
    dihedral_bisectors,
    orthogonal_project_point,
    plane_through,
    reflect_point,
    section_frame,
    unit,
)
from .planar import circle_fit

log = logging.getLogger(__name__)


def worker_count() -> int:
    env = os.environ.get("MT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer MT_THREADS=%r", env)
    return os.cpu_count() or 1


def _ordered_map(fn, items, workers: int | None = None):
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# scenario data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TolerancePolicy:
    """Tolerances relative to the larger body diameter."""

    mirror_tol: float = 1e-8
    conclusion_tol: float = 1e-8


@dataclass(frozen=True)
class SamplingPolicy:
    n_angles: int = 16
    n_offsets: int = 8
    n_random: int = 32
    seed: int = 0

    @property
    def n_lines(self) -> int:
        return self.n_angles * self.n_offsets + self.n_random


@dataclass(frozen=True, eq=False)
class Scenario:
    K1: Polytope
    K2: Polytope
    H: Hyperplane
    p1: np.ndarray
    p2: np.ndarray
    tol: TolerancePolicy = field(default_factory=TolerancePolicy)
    sampling: SamplingPolicy = field(default_factory=SamplingPolicy)
    name: str = ""

    def __post_init__(self):
        dim = self.H.dim
        p1 = as_point(self.p1, dim)
        p2 = as_point(self.p2, dim)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        if self.K1.dim != dim or self.K2.dim != dim:
            raise BadConfiguration("bodies, hyperplane and points must share a dimension")
        if self.K1.flat or self.K2.flat:
            raise BadConfiguration("bodies must be full-dimensional")
        for label, p in (("p1", p1), ("p2", p2)):
            if abs(float(self.H.signed_distance(p))) <= 1e-9:
                raise BadConfiguration(f"{label} lies on H")
        if np.linalg.norm(p1 - p2) <= 1e-12:
            raise BadConfiguration("p1 and p2 must differ")

    @property
    def dim(self) -> int:
        return self.H.dim

    @cached_property
    def diameter(self) -> float:
        return max(self.K1.diameter, self.K2.diameter)


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED_EMPTY = "SKIPPED_EMPTY"


class Verdict(str, enum.Enum):
    CONSISTENT = "CONSISTENT"
    HYPOTHESIS_FAILS = "HYPOTHESIS_FAILS"
    INCONSISTENT_WITNESS = "INCONSISTENT_WITNESS"


@dataclass(frozen=True, eq=False)
class LineSample:
    line: Line
    provenance: dict

    @property
    def index(self) -> int:
        return self.provenance["index"]


@dataclass(frozen=True, eq=False)
class MirrorTestResult:
    line: LineSample
    status: Status
    best_mirror: Hyperplane | None
    distances: list[float]
    section_areas: tuple[float, float]
    threshold: float

    @property
    def min_distance(self) -> float | None:
        return min(self.distances) if self.distances else None


@dataclass(frozen=True, eq=False)
class Footprint:
    center: np.ndarray
    radius: float


# --------------------------------------------------------------------------
# line sampling and the per-line mirror test
# --------------------------------------------------------------------------


def footprint(scenario: Scenario) -> Footprint:
    """Bounding disc, inflated by 10%, of everything projected onto H."""
    pts = np.concatenate([scenario.K1.vertices, scenario.K2.vertices, [scenario.p1, scenario.p2]])
    frame = section_frame(scenario.H, np.zeros(3))
    uv = frame.coords(orthogonal_project_point(scenario.H, pts))
    mid = 0.5 * (uv.min(axis=0) + uv.max(axis=0))
    radius = 1.1 * float(np.linalg.norm(uv - mid, axis=1).max())
    return Footprint(frame.embed(mid), max(radius, 1e-9))


def sample_lines(H: Hyperplane, disc: Footprint, sampling: SamplingPolicy) -> list[LineSample]:
    """Grid of ``n_angles x n_offsets`` lines in H plus ``n_random`` seeded random lines.

    Grid angles are ``i * pi / n_angles``; grid offsets are cell midpoints
    across the footprint diameter.
    """
    if not disc.radius > 0:
        raise GeometryError("footprint radius must be positive")
    frame = section_frame(H, disc.center)
    R = disc.radius

    def make(angle: float, offset: float, prov: dict) -> LineSample:
        d = np.cos(angle) * frame.e1 + np.sin(angle) * frame.e2
        nu = -np.sin(angle) * frame.e1 + np.cos(angle) * frame.e2
        prov = {**prov, "angle": float(angle), "offset": float(offset)}
        return LineSample(Line(frame.origin + offset * nu, d), prov)

    out = []
    for i in range(sampling.n_angles):
        for j in range(sampling.n_offsets):
            angle = np.pi * i / sampling.n_angles
            offset = R * (-1.0 + (2 * j + 1) / sampling.n_offsets)
            out.append(make(angle, offset, {"index": len(out), "kind": "grid", "i": i, "j": j}))
    rng = rng_for(sampling.seed, "lines")
    for k in range(sampling.n_random):
        angle, offset = rng.uniform(0.0, np.pi), rng.uniform(-R, R)
        out.append(make(angle, offset, {"index": len(out), "kind": "random", "draw": k}))
    return out


def cutting_planes(scenario: Scenario, M: Line) -> tuple[Hyperplane, Hyperplane]:
    return plane_through(scenario.p1, M), plane_through(scenario.p2, M)


def candidate_mirrors(scenario: Scenario, M: Line) -> list[Hyperplane]:
    """The planes through M whose reflection carries ``aff{p2, M}`` onto ``aff{p1, M}``."""
    pi1, pi2 = cutting_planes(scenario, M)
    return dihedral_bisectors(pi1, pi2, M)


def section_mirror_test(scenario: Scenario, M: Line | LineSample) -> MirrorTestResult:
    sample = M if isinstance(M, LineSample) else LineSample(M, {"index": 0, "kind": "given"})
    line = sample.line
    pi1, pi2 = cutting_planes(scenario, line)
    s1 = plane_section(scenario.K1, pi1)
    s2 = plane_section(scenario.K2, pi2)
    areas = (abs(s1.area), abs(s2.area))
    threshold = scenario.tol.mirror_tol * scenario.diameter
    if s1.is_empty or s2.is_empty:
        return MirrorTestResult(sample, Status.SKIPPED_EMPTY, None, [], areas, threshold)
    mirrors = dihedral_bisectors(pi1, pi2, line)
    x2 = s2.points3d
    distances = []
    for B in mirrors:
        moved = Polygon2.hull_of(s1.frame.coords(reflect_point(B, x2)))
        distances.append(hausdorff_distance(s1.polygon, moved))
    best = int(np.argmin(distances))
    status = Status.PASS if distances[best] <= threshold else Status.FAIL
    return MirrorTestResult(sample, status, mirrors[best], distances, areas, threshold)


# --------------------------------------------------------------------------
# whole-theorem run
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TheoremReport:
    scenario_name: str
    results: list[MirrorTestResult]
    hypothesis_pass_rate: float
    conclusion_distance: float
    point_check: float
    verdict: Verdict
    diameter: float
    conclusion_threshold: float
    sigma: dict | None
    substituted: bool

    def count(self, status: Status) -> int:
        return sum(r.status is status for r in self.results)

    @property
    def verdict_text(self) -> str:
        n_pass, n_fail, n_skip = (self.count(s) for s in Status)
        text = {
            Verdict.CONSISTENT: "hypothesis held on every sampled line and the bodies are mirror images across H",
            Verdict.HYPOTHESIS_FAILS: "some sampled line admits no mirror between its two sections",
            Verdict.INCONSISTENT_WITNESS: "hypothesis held on every sampled line but the bodies are not mirror images",
        }[self.verdict]
        return f"{text} ({n_pass} pass, {n_fail} fail, {n_skip} skipped; sampled directions only)"


def sigma_diagnostics(p1: np.ndarray, p2: np.ndarray, H: Hyperplane) -> dict | None:
    """Where the line through p1, p2 meets H, with both distances to it; None if parallel."""
    d = p2 - p1
    denom = float(H.normal @ d)
    if abs(denom) <= 1e-12 * float(np.linalg.norm(d)):
        return None
    t = (H.offset - float(H.normal @ p1)) / denom
    sigma = p1 + t * d
    r1, r2 = float(np.linalg.norm(p1 - sigma)), float(np.linalg.norm(p2 - sigma))
    return {"point": sigma.tolist(), "dist_p1": r1, "dist_p2": r2, "dist_gap": abs(r1 - r2)}


def verify_theorem(scenario: Scenario, workers: int | None = None) -> TheoremReport:
    """Sample lines in H, run the mirror test on each and check the conclusion.

    If the line through p1 and p2 is parallel to H, K2 and p2 are first
    replaced by their reflections across H (recorded as ``substituted``).
    """
    if scenario.dim != 3:
        raise GeometryError("verify_theorem works on 3D scenarios; reduce higher dimensions first")
    H = scenario.H
    sigma = sigma_diagnostics(scenario.p1, scenario.p2, H)
    substituted = sigma is None
    if substituted:
        scenario = replace(
            scenario,
            K2=scenario.K2.transformed(lambda v: reflect_point(H, v)),
            p2=reflect_point(H, scenario.p2),
        )
        sigma = sigma_diagnostics(scenario.p1, scenario.p2, H)
    for body in (scenario.K1, scenario.K2):
        body.edges  # build hull caches before fanning out

    lines = sample_lines(H, footprint(scenario), scenario.sampling)
    results = _ordered_map(lambda s: section_mirror_test(scenario, s), lines, workers)

    n_pass = sum(r.status is Status.PASS for r in results)
    n_fail = sum(r.status is Status.FAIL for r in results)
    tested = n_pass + n_fail
    rate = n_pass / tested if tested else 1.0

    conclusion = vertex_set_hausdorff(reflect_point(H, scenario.K2.vertices), scenario.K1.vertices)
    point_check = float(np.linalg.norm(reflect_point(H, scenario.p2) - scenario.p1))
    threshold = scenario.tol.conclusion_tol * scenario.diameter
    if n_fail:
        verdict = Verdict.HYPOTHESIS_FAILS
    elif conclusion <= threshold and point_check <= threshold:
        verdict = Verdict.CONSISTENT
    else:
        verdict = Verdict.INCONSISTENT_WITNESS
        log.warning("scenario %r: hypothesis held but conclusion failed", scenario.name)
    return TheoremReport(
        scenario.name, results, rate, conclusion, point_check, verdict,
        scenario.diameter, threshold, sigma, substituted,
    )


# --------------------------------------------------------------------------
# projections and dimension reduction
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProjectionSymmetryVerdict:
    passed: bool
    angles: np.ndarray
    distances: np.ndarray
    worst_direction: np.ndarray
    conclusion_distance: float
    tol: float

    @property
    def co_occurs(self) -> bool:
        """Passing on projections should go together with S_H(K2) = K1."""
        return self.passed == (self.conclusion_distance <= self.tol)


def projection_symmetry_check(
    K1: Polytope, K2: Polytope, H: Hyperplane, n_dirs: int = 50, tol: float = 1e-10
) -> ProjectionSymmetryVerdict:
    """Project both bodies onto planes orthogonal to H and compare one with the
    mirror image of the other across the trace of H.

    The planes have normals ``cos(t) e1 + sin(t) e2`` for ``t = k pi / n_dirs``,
    with ``e1, e2`` spanning the direction space of H.
    """
    if H.dim != 3:
        raise GeometryError("projection_symmetry_check works in 3D")
    frame = section_frame(H, np.zeros(3))
    angles = np.pi * np.arange(n_dirs) / n_dirs
    dists = np.empty(n_dirs)
    normals = []
    for k, t in enumerate(angles):
        g = np.cos(t) * frame.e1 + np.sin(t) * frame.e2
        trace = unit(np.cross(H.normal, g))

        def coords(v, flip=False):
            rel = v - frame.origin
            height = rel @ H.normal
            return np.c_[rel @ trace, -height if flip else height]

        dists[k] = hausdorff_distance(
            Polygon2.hull_of(coords(K1.vertices)), Polygon2.hull_of(coords(K2.vertices, flip=True))
        )
        normals.append(g)
    worst = int(np.argmax(dists))
    conclusion = vertex_set_hausdorff(reflect_point(H, K2.vertices), K1.vertices)
    return ProjectionSymmetryVerdict(
        bool(np.all(dists <= tol)), angles, dists, normals[worst], conclusion, tol
    )


def projection_reduction(scenario: Scenario, gamma: Hyperplane) -> Scenario:
    """Project a 4D scenario onto a hyperplane orthogonal to H, in 3D coordinates of it.

    The coordinates are ``(x - o) @ B.T`` where ``o`` is the point of gamma
    nearest the origin and the rows of ``B`` are
    ``complement_basis(gamma.normal)``.
    """
    if scenario.dim != 4 or gamma.dim != 4:
        raise GeometryError("projection_reduction expects a 4D scenario and a 4D hyperplane")
    if abs(float(gamma.normal @ scenario.H.normal)) > 1e-10:
        raise NotOrthogonal("gamma is not orthogonal to H")
    basis = complement_basis(gamma.normal)
    origin = gamma.offset * gamma.normal

    def to3(x):
        return (np.asarray(x, dtype=float) - origin) @ basis.T

    H3 = Hyperplane(basis @ scenario.H.normal, scenario.H.offset - float(scenario.H.normal @ origin))
    return Scenario(
        convex_hull(to3(scenario.K1.vertices)),
        convex_hull(to3(scenario.K2.vertices)),
        H3,
        to3(scenario.p1),
        to3(scenario.p2),
        scenario.tol,
        scenario.sampling,
        name=f"{scenario.name}/reduced" if scenario.name else "reduced",
    )


# --------------------------------------------------------------------------
# bodies of revolution and shadow boundaries
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RevolutionVerdict:
    passed: bool
    heights: np.ndarray
    deviations: np.ndarray
    center_offsets: np.ndarray
    radii: np.ndarray
    tol: float


def revolution_axis_test(K: Polytope, axis: Line, n_planes: int = 9, tol: float = 1e-3) -> RevolutionVerdict:
    """Fit circles to sections perpendicular to ``axis`` at cell midpoints of
    the body's extent along it."""
    t = (K.vertices - axis.base) @ axis.direction
    lo, hi = float(t.min()), float(t.max())
    heights = lo + (np.arange(n_planes) + 0.5) * (hi - lo) / n_planes
    if not np.any(K.interior_margin(axis.base + np.outer(heights, axis.direction)) > 0):
        raise BadConfiguration("axis does not meet the interior of the body")
    devs, offs, radii = [], [], []
    for h in heights:
        sec = plane_section(K, Hyperplane(axis.direction, float(axis.direction @ axis.base) + h))
        fit = circle_fit(sec.polygon)
        devs.append(fit.max_radial_deviation)
        offs.append(float(axis.distance(sec.frame.embed(fit.center))))
        radii.append(fit.radius)
    devs, offs = np.array(devs), np.array(offs)
    passed = bool(np.all(devs <= tol) and np.all(offs <= tol))
    return RevolutionVerdict(passed, heights, devs, offs, np.array(radii), tol)


@dataclass(frozen=True, eq=False)
class ShadowVerdict:
    passed: bool
    section_to_band: float
    band_to_section: float
    n_section: int
    n_band: int
    tol: float


def shadow_section_test(K: Polytope, gamma: Hyperplane, tol: float) -> ShadowVerdict:
    """Compare the section by ``gamma`` with the shadow boundary for light
    orthogonal to ``gamma``, in both directions."""
    sec = plane_section(K, gamma)
    band = shadow_boundary(K, gamma.normal)
    if sec.is_empty:
        return ShadowVerdict(False, np.inf, np.inf, 0, len(band), tol)
    pts = sec.points3d
    forward = float(np.sqrt(((pts[:, None, :] - band[None, :, :]) ** 2).sum(-1)).min(axis=1).max())
    height = gamma.signed_distance(band)
    inplane = sec.polygon.distance(sec.frame.coords(band))
    backward = float(np.sqrt(inplane**2 + height**2).max())
    passed = forward <= tol and backward <= tol
    return ShadowVerdict(passed, forward, backward, len(pts), len(band), tol)
