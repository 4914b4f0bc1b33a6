import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrortomo.body import (
    Polygon2,
    ball_section_area,
    central_projection,
    chord,
    convex_hull,
    hausdorff_distance,
    orthogonal_projection_body,
    plane_section,
    shadow_boundary,
    vertex_set_hausdorff,
)
from mirrortomo.errors import DegenerateInput, EmptyOperand, UnboundedProjection
from mirrortomo.generators import (
    facet_sag,
    make_ball,
    make_box,
    make_cross_polytope,
    make_ellipsoid,
    make_mirror_pair,
    make_random_polytope,
    make_revolution_body,
)
from mirrortomo.geometry import Hyperplane, reflect_plane, reflect_point, section_frame
from mirrortomo.planar import circle_fit

import oracles

UNIT_SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)


def random_section_case(rng):
    pts = rng.standard_normal((int(rng.integers(6, 14)), 3))
    body = convex_hull(pts)
    inner = rng.dirichlet(np.ones(len(body.vertices))) @ body.vertices
    plane = Hyperplane.from_point_normal(inner, rng.standard_normal(3))
    return body, plane


def assert_matches_clipping(body, plane, tol=1e-10):
    sec = plane_section(body, plane)
    f = sec.frame
    expect = oracles.section_by_clipping(body.vertices, f.origin, f.e1, f.e2)
    assert len(expect) >= 3
    assert hausdorff_distance(sec.polygon, Polygon2.hull_of(expect)) < tol


# ---- hulls -----------------------------------------------------------------


def test_hull_2d_drops_interior_point():
    body = convex_hull(np.r_[UNIT_SQUARE, [[0.5, 0.5]]])
    assert len(body.vertices) == 4
    assert {tuple(v) for v in body.vertices} == {tuple(v) for v in UNIT_SQUARE}


def test_hull_keeps_octahedron():
    assert len(make_cross_polytope().vertices) == 6


def test_hull_contains_its_inputs():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((200, 3))
    pts = g / np.linalg.norm(g, axis=1, keepdims=True) * rng.random(200)[:, None] ** (1 / 3)
    body = convex_hull(pts)
    # every output vertex survives a rehull, and all inputs lie inside the
    # half-spaces found by brute-force triple enumeration
    assert len(convex_hull(body.vertices).vertices) == len(body.vertices)
    facets = oracles.facets_by_triples(body.vertices)
    for n, c in facets:
        assert np.all(pts @ n <= c + 1e-10)


def test_hull_rejects_degenerate_input():
    with pytest.raises(DegenerateInput):
        convex_hull([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]])


def test_hull_is_deterministic_in_input_order():
    pts = np.random.default_rng(5).standard_normal((40, 3))
    a, b = convex_hull(pts), convex_hull(pts)
    assert np.array_equal(a.vertices, b.vertices)


# ---- sections ----------------------------------------------------------------


def test_cube_sections():
    cube = make_box()
    sec = plane_section(cube, Hyperplane([0, 0, 1], 0.5))
    assert sec.area == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(sec.points3d[:, 2], 0.5)
    assert plane_section(cube, Hyperplane([0, 0, 1], 2.0)).is_empty


def test_octahedron_section_matches_clipping_oracle():
    octa = make_cross_polytope()
    plane = Hyperplane([0, 0, 1], 0.25)
    sec = plane_section(octa, plane)
    assert sec.area == pytest.approx(1.125, abs=1e-14)
    expect = np.array([[0.75, 0, 0.25], [0, 0.75, 0.25], [-0.75, 0, 0.25], [0, -0.75, 0.25]])
    assert vertex_set_hausdorff(sec.points3d, expect) < 1e-14
    assert_matches_clipping(octa, plane)


@pytest.mark.parametrize("seed", range(20))
def test_section_matches_clipping_oracle(seed):
    body, plane = random_section_case(np.random.default_rng(seed))
    assert_matches_clipping(body, plane)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_section_commutes_with_reflection(seed):
    rng = np.random.default_rng(seed)
    body, plane = random_section_case(rng)
    mirror = Hyperplane(rng.standard_normal(3), rng.normal())
    moved = body.transformed(lambda v: reflect_point(mirror, v))
    lhs = plane_section(moved, reflect_plane(mirror, plane))
    rhs = reflect_point(mirror, plane_section(body, plane).points3d)
    assert hausdorff_distance(lhs.points3d, rhs) < 1e-10


# ---- projections ---------------------------------------------------------------


def test_orthogonal_projection_examples():
    sq = orthogonal_projection_body(make_box(), Hyperplane([0, 0, 1], 0))
    assert sq.flat
    assert {tuple(np.round(v, 12)) for v in sq.vertices} == {(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)}
    oc = orthogonal_projection_body(make_cross_polytope(), Hyperplane([0, 0, 1], 0))
    assert {tuple(np.round(v, 12) + 0.0) for v in oc.vertices} == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)}


def test_projection_commutes_with_hull_in_4d():
    rng = np.random.default_rng(11)
    pts = rng.standard_normal((60, 4))
    target = Hyperplane([0, 0, 0, 1], 0)
    proj_of_hull = orthogonal_projection_body(convex_hull(pts), target)
    hull_of_proj = convex_hull(pts * [1, 1, 1, 0], dim=3)
    assert vertex_set_hausdorff(proj_of_hull.vertices, hull_of_proj.vertices) < 1e-12
    # membership oracle: projected convex combinations land in the projection
    inner = rng.dirichlet(np.ones(60), size=50) @ pts
    local = proj_of_hull.vertices[:, :3]
    box = convex_hull(local)
    assert np.all(box.contains(inner[:, :3], tol=1e-10))


def test_central_projection_of_translated_cube_is_a_scaled_square():
    cube = make_box([0, 0, 2], [1, 1, 3])
    img = central_projection(cube, [0, 0, 0], Hyperplane([0, 0, 1], 1))
    # the near face (z = 2) projects to [0, .5]^2 and contains the far face's image
    assert img.area == pytest.approx(0.25, abs=1e-14)


def test_central_projection_rays_land_inside():
    octa = make_cross_polytope(center=[0, 0, 2])
    target = Hyperplane([0, 0, 1], 1)
    img = central_projection(octa, [0, 0, 0], target)
    frame = section_frame(target, np.zeros(3))
    hits = octa.vertices / octa.vertices[:, 2:3]
    assert np.all(img.distance(frame.coords(hits)) < 1e-12)
    # the equator (+-1, 0, 2), (0, +-1, 2) lands on (+-.5, 0), (0, +-.5): a diamond of area 0.5
    assert img.area == pytest.approx(0.5, abs=1e-14)
    # symmetric about the origin of the target
    assert hausdorff_distance(img, Polygon2.hull_of(-img.vertices)) < 1e-12


def test_central_projection_straddling_horizon_is_unbounded():
    with pytest.raises(UnboundedProjection):
        central_projection(make_box([-1, -1, -1], [1, 1, 1]), [0, 0, 0], Hyperplane([0, 0, 1], 2))


# ---- shadow boundaries ---------------------------------------------------------


def test_cube_shadow_boundary_is_four_columns():
    band = shadow_boundary(make_box(), [0, 0, 1])
    assert len(band) == 8
    assert {tuple(v[:2]) for v in band} == {(0, 0), (1, 0), (1, 1), (0, 1)}


def test_octahedron_shadow_boundary_is_equator():
    band = shadow_boundary(make_cross_polytope(), [0, 0, 1])
    assert {tuple(v + 0.0) for v in band} == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)}


def test_sphere_shadow_boundary_hugs_the_equator():
    ball = make_ball(r=1.0, n=500)
    sag = facet_sag(ball, 1.0)
    band = shadow_boundary(ball, [0, 0, 1])
    # the projection contains the inscribed disc of radius 1 - sag, so a
    # boundary vertex has planar radius >= 1 - sag, hence |z| <= sqrt(1 - (1 - sag)^2)
    assert np.abs(band[:, 2]).max() <= np.sqrt(1 - (1 - sag) ** 2)
    assert len(band) >= 20


# ---- balls -------------------------------------------------------------------


def test_ball_section_area_examples():
    assert ball_section_area(1, [0, 0, 0], Hyperplane([0, 0, 1], 0)) == pytest.approx(np.pi)
    assert ball_section_area(1, [0, 0, 0], Hyperplane([0, 0, 1], 0.6)) == pytest.approx(0.64 * np.pi)
    assert ball_section_area(1, [0, 0, 0], Hyperplane([0, 0, 1], 1.5)) == 0.0


def test_ball_section_area_against_monte_carlo():
    mc = oracles.monte_carlo_section_area(1.0, 0.6, 10_000_000, seed=1)
    assert abs(mc - ball_section_area(1, [0, 0, 0], Hyperplane([0, 0, 1], 0.6))) < 5e-3


def test_ball_section_area_strictly_decreasing():
    d = np.linspace(0, 0.999, 400)
    a = [ball_section_area(1, [0, 0, 0], Hyperplane([0, 0, 1], x)) for x in d]
    assert np.all(np.diff(a) < 0)


# ---- chords and planar distances -------------------------------------------------


def test_chord_examples():
    sq = Polygon2.hull_of(UNIT_SQUARE)
    c = chord(sq, [0.5, 0.5], [1, 0])
    assert np.allclose([c.a, c.b], [[0, 0.5], [1, 0.5]]) and c.length == pytest.approx(1)
    assert chord(sq, [2, 2], [1, 0]).empty


def test_hexagon_chord_against_edge_intersections():
    hexagon = Polygon2.regular(6)
    u = np.array([np.cos(np.deg2rad(17)), np.sin(np.deg2rad(17))])
    c = chord(hexagon, [0, 0], u)
    ts = []
    v = hexagon.vertices
    for p, q in zip(v, np.roll(v, -1, axis=0)):
        A = np.c_[u, p - q]
        if abs(np.linalg.det(A)) < 1e-14:
            continue
        t, s = np.linalg.solve(A, p)
        if -1e-12 <= s <= 1 + 1e-12:
            ts.append(t)
    assert c.length == pytest.approx(max(ts) - min(ts), abs=1e-14)
    apothem = np.cos(np.pi / 6)
    assert c.length == pytest.approx(2 * apothem / np.cos(np.deg2rad(17 - 30)), abs=1e-14)


def test_hausdorff_examples():
    sq = Polygon2.hull_of(UNIT_SQUARE)
    assert hausdorff_distance(sq, sq) == 0.0
    assert hausdorff_distance(sq, Polygon2.hull_of(UNIT_SQUARE + [0.1, 0])) == pytest.approx(0.1, abs=1e-15)
    quarter = np.array([[1, 1], [-1, 1]]) / np.sqrt(2)
    # square of circumradius 1: circumradius minus apothem
    diamond = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    got = hausdorff_distance(Polygon2.hull_of(diamond), Polygon2.hull_of(diamond @ quarter))
    assert got == pytest.approx((np.sqrt(2) - 1) / np.sqrt(2), abs=1e-15)
    assert got == pytest.approx(oracles.sampled_hausdorff(diamond, diamond @ quarter), abs=1e-3)
    # side-1 square centered at the origin
    c = UNIT_SQUARE - 0.5
    got = hausdorff_distance(Polygon2.hull_of(c), Polygon2.hull_of(c @ quarter))
    assert got == pytest.approx(np.sqrt(0.5) - 0.5, abs=1e-15)
    assert got == pytest.approx(oracles.sampled_hausdorff(c, c @ quarter), abs=1e-3)


def test_hausdorff_rejects_empty():
    with pytest.raises(EmptyOperand):
        hausdorff_distance(Polygon2.empty(), Polygon2.hull_of(UNIT_SQUARE))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hausdorff_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (Polygon2.hull_of(rng.standard_normal((8, 2)) + rng.normal(size=2)) for _ in range(3))
    ab, ba = hausdorff_distance(a, b), hausdorff_distance(b, a)
    assert ab == ba
    assert ab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-12
    assert hausdorff_distance(a, a) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_chord_length_is_concave_across_parallel_lines(seed):
    rng = np.random.default_rng(seed)
    poly = Polygon2.hull_of(rng.standard_normal((12, 2)))
    t = rng.uniform(0, np.pi)
    u = np.array([np.cos(t), np.sin(t)])
    nu = np.array([-u[1], u[0]])
    h = poly.vertices @ nu
    offs = np.linspace(h.min(), h.max(), 201)[1:-1]
    lengths = np.array([chord(poly, s * nu, u).length for s in offs])
    peak = int(np.argmax(lengths))
    assert np.all(np.diff(lengths[peak:]) <= 1e-9)
    assert np.all(np.diff(lengths[: peak + 1]) >= -1e-9)
    # concavity: second differences never positive
    assert np.all(np.diff(lengths, 2) <= 1e-9)


# ---- generators ----------------------------------------------------------------


def test_make_ball_vertices_on_sphere():
    ball = make_ball(r=1.0, n=100)
    assert len(ball.vertices) == 100
    assert np.allclose(np.linalg.norm(ball.vertices, axis=1), 1.0, atol=1e-12)


def test_make_mirror_pair_negates_z():
    a, b = make_mirror_pair(make_box([-1, -2, 0.5], [1, 1, 2]), Hyperplane([0, 0, 1], 0))
    assert np.array_equal(b.vertices, a.vertices * [1, 1, -1])


def test_revolution_body_sections_are_circles():
    n = 24
    heights = np.linspace(-1, 1, 10)
    radii = 1.0 + 0.3 * np.cos(np.pi * heights)
    body = make_revolution_body(np.c_[radii, heights], n)
    for h in (heights[:-1] + heights[1:]) / 2:
        sec = plane_section(body, Hyperplane([0, 0, 1], h))
        fit = circle_fit(sec.polygon)
        assert fit.max_radial_deviation < 2 * (1 - np.cos(np.pi / n)) * radii.max()


def test_random_polytope_shape_classes():
    for cls in ("sphere", "ball", "cube", "gaussian"):
        body = make_random_polytope(1, 30, cls)
        assert body.dim == 3 and len(body.vertices) >= 4
    assert len(make_random_polytope(1, 30, "sphere").vertices) == 30
    with pytest.raises(DegenerateInput):
        make_random_polytope(1, 30, "torus")


def test_facet_sag_of_ellipsoid_is_small_and_positive():
    e = make_ellipsoid([1, 1, 2], 800)
    s = facet_sag(e, [1, 1, 2])
    assert 0 < s < 0.05
