import numpy as np
import pytest

from mirrortomo.errors import BadConfiguration, BadParameters
from mirrortomo.geometry import Hyperplane, Line
from mirrortomo.harness import Status
from mirrortomo.sphere import ball_unequal_distance_search, sphere_offset_counterexample

H0 = Hyperplane([0, 0, 1], -0.8)


def plane_distance_closed_form(x0, k):
    """Distance from the origin to the plane through (-x0, 0, 0) and the line x = x0, z = -k.

    The plane contains (-x0, 0, 0), (x0, 0, -k) and the y direction, so its
    normal is (k, 0, 2 x0) up to scale.
    """
    return k * x0 / np.sqrt(k * k + 4 * x0 * x0)


@pytest.mark.parametrize("x0,k", [(0.25, 0.1), (0.5, 0.25), (0.5, 2.0), (0.75, 0.5)])
def test_offset_areas_match_closed_form(x0, k):
    res = sphere_offset_counterexample(1.0, x0, k, n_vertices=300)
    assert res.A == pytest.approx(np.pi * (1 - x0 * x0), abs=1e-14)
    d = plane_distance_closed_form(x0, k)
    assert res.plane_distance == pytest.approx(d, abs=1e-14)
    assert res.A_k == pytest.approx(np.pi * (1 - d * d), abs=1e-14)
    assert res.margin > 0
    assert res.A_k <= res.great_disc_area


def test_offset_example_r1_x05_k025():
    res = sphere_offset_counterexample(1.0, 0.5, 0.25, n_vertices=2000)
    assert res.A == pytest.approx(2.35619, abs=1e-5)
    assert res.plane_distance < 0.5
    assert res.mirror_result.status is Status.FAIL


def test_offset_margin_vanishes_as_k_grows():
    margins = [sphere_offset_counterexample(1.0, 0.5, k, n_vertices=100).margin for k in (1, 10, 100, 1000, 1e5)]
    assert all(m > 0 for m in margins)
    assert all(a > b for a, b in zip(margins, margins[1:]))
    assert margins[-1] < 1e-8


@pytest.mark.parametrize("x0,k", [(0.0, 1.0), (1.0, 1.0), (1.2, 1.0), (0.5, 0.0), (0.5, -1.0)])
def test_offset_rejects_bad_parameters(x0, k):
    with pytest.raises(BadParameters):
        sphere_offset_counterexample(1.0, x0, k)


def test_unequal_distance_search_finds_witness():
    res = ball_unequal_distance_search(1.0, (0, 0, 0.3), (0, 0, -0.5), H0)
    assert res.status == "WITNESS" and not res.symmetric
    w = res.witness
    assert abs(w["a1"] - w["a2"]) > 1e-3
    assert res.n_lines == 64 * 16


def test_symmetric_pair_gives_equality_through_the_axis():
    res = ball_unequal_distance_search(1.0, (0, 0, 0.4), (0, 0, -0.4), H0)
    assert res.symmetric
    assert res.axis_gap < 1e-12


def test_symmetric_pair_without_witness_is_flagged():
    # restricted to lines through the axis foot nothing can differ
    res = ball_unequal_distance_search(1.0, (0, 0, 0.3), (0, 0, -0.3), H0, n_offsets=1)
    assert res.status == "NO_WITNESS_SYMMETRIC"


def test_witness_line_lies_in_h0():
    res = ball_unequal_distance_search(1.0, (0, 0, 0.3), (0, 0, -0.5), H0)
    line = Line(res.witness["line"]["base"], res.witness["line"]["direction"])
    assert H0.contains_line(line, tol=1e-12)


@pytest.mark.parametrize(
    "q1,q2,h0",
    [
        ((0.1, 0, 0.3), (0, 0, -0.5), H0),  # not collinear with the center
        ((0, 0, 0.3), (0, 0, -1.5), H0),  # q2 outside the ball
        ((0, 0, 0.3), (0, 0, -0.5), Hyperplane([0, 1, 1], -0.8)),  # not perpendicular
        ((0, 0, 0.3), (0, 0, -0.5), Hyperplane([0, 0, 1], 0.0)),  # cuts the segment
    ],
)
def test_search_rejects_bad_configurations(q1, q2, h0):
    with pytest.raises(BadConfiguration):
        ball_unequal_distance_search(1.0, q1, q2, h0)
