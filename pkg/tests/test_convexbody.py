import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capillary_lab.charts import sphere, torus
from capillary_lab.convexbody import (
    SmoothConvexBody,
    af_pair_slack,
    ball,
    cube,
    disk,
    ellipse,
    hull,
    icosphere,
    inequality_suite,
    minkowski_sum,
    mixed_volume_2d,
    mixed_volumes_3d,
    parallel_quotient_scan,
    polytope,
    quermass,
    quotient_derivative,
    random_suite,
    regular_polygon,
    smooth_ellipsoid,
    square,
    steiner,
    steiner_check,
    unit_ball_polytope,
)
from capillary_lab.exceptions import (
    DegeneracyError,
    DimensionMismatchError,
    NonConvexError,
    ParameterError,
)
from tests import shoelace

point_clouds = st.lists(
    st.tuples(
        st.floats(min_value=-3, max_value=3, allow_nan=False),
        st.floats(min_value=-3, max_value=3, allow_nan=False),
    ),
    min_size=3,
    max_size=12,
)


def test_square_quermass():
    values = quermass(square()).values
    np.testing.assert_allclose(values, [1.0, 2.0, math.pi], atol=1e-12)


def test_cube_quermass():
    np.testing.assert_allclose(
        quermass(cube()).values, [1.0, 2.0, math.pi, 4 * math.pi / 3], atol=1e-12
    )


def test_cube_face_structure():
    body = cube()
    assert len(body.vertices) == 8
    assert len(body.facets) == 6
    assert len(body.edges) == 12
    np.testing.assert_allclose(body.edge_angles, 0.5 * math.pi, atol=1e-12)
    assert body.euler_characteristic == 2


def test_hull_drops_interior_points():
    body = hull([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.5, 0.0]])
    assert len(body.vertices) == 4
    assert body.volume == pytest.approx(1.0)
    assert body.boundary_measure == pytest.approx(4.0)


def test_hull_of_sphere_points_has_euler_two():
    rng = np.random.default_rng(3)
    points = rng.normal(size=(60, 3))
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    body = hull(points)
    assert len(body.vertices) == 60
    assert body.euler_characteristic == 2


def test_icosahedron_counts():
    body = icosphere(0)
    assert (len(body.vertices), len(body.edges), len(body.facets)) == (12, 30, 20)


@pytest.mark.parametrize(
    "points",
    [
        [[0, 0], [1, 1], [2, 2], [3, 3]],
        [[0, 0], [1, 0]],
        [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0.5, 0.2, 0.0]],
    ],
)
def test_degenerate_points(points):
    with pytest.raises(DegeneracyError):
        hull(points)


def test_hull_dimension_check():
    with pytest.raises(DimensionMismatchError):
        hull([[0, 0], [1, 0], [0, 1]], dim=3)


def test_polytope_rejects_non_extreme_vertex():
    with pytest.raises(NonConvexError, match="not extreme"):
        polytope([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.0]])


def test_polytope_refuses_bad_coordinates():
    with pytest.raises(ParameterError):
        polytope([[0, 0], [1, 0], [math.nan, 1]])


def test_inradius():
    assert square().inradius == 0.0
    hexagon = regular_polygon(6)
    assert hexagon.inradius == pytest.approx(math.cos(math.pi / 6))


def test_square_plus_square():
    assert minkowski_sum(square(), square()).volume == pytest.approx(4.0)


def test_square_plus_diamond_is_octagon():
    diamond = regular_polygon(4, radius=1.0)
    octagon = minkowski_sum(square(2.0), diamond)
    assert len(octagon.vertices) == 8
    assert octagon.volume == pytest.approx(shoelace(octagon.vertices))


def test_minkowski_sum_with_point_translates():
    moved = minkowski_sum(square(), np.array([[2.0, -1.0]]))
    assert moved.volume == pytest.approx(1.0)
    np.testing.assert_allclose(moved.vertices.min(axis=0), [2.0, -1.0])


def test_minkowski_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        minkowski_sum(square(), cube())


@settings(max_examples=30, deadline=None)
@given(first=point_clouds, second=point_clouds)
def test_minkowski_sum_commutes(first, second):
    try:
        P, Q = hull(first), hull(second)
    except DegeneracyError:
        return
    forward = minkowski_sum(P, Q).volume
    backward = minkowski_sum(Q, P).volume
    assert abs(forward - backward) <= 1e-9 * max(1.0, forward)
    # Brunn-Minkowski in the plane
    assert math.sqrt(forward) >= math.sqrt(P.volume) + math.sqrt(Q.volume) - 1e-9


@pytest.mark.parametrize("factor", [0.5, 2.0, 3.0])
def test_quermass_scaling(factor):
    base = quermass(cube())
    scaled = quermass(cube().scaled(factor))
    for j in range(4):
        assert scaled[j] == pytest.approx(factor ** (3 - j) * base[j], rel=1e-12)


def test_quermass_translation_invariance():
    body = regular_polygon(7)
    moved = quermass(body.translated([3.0, -2.0]))
    np.testing.assert_allclose(moved.values, quermass(body).values, atol=1e-12)


def test_smooth_quermass():
    np.testing.assert_allclose(
        quermass(disk(2.0)).values, [4 * math.pi, 2 * math.pi, math.pi], atol=1e-8
    )
    w = 4 * math.pi / 3
    np.testing.assert_allclose(quermass(ball()).values, [w, w, w, w], atol=1e-8)


def test_ball_approximant_quermass():
    np.testing.assert_allclose(
        quermass(unit_ball_polytope(2)).values, [math.pi] * 3, atol=1e-2
    )
    w = 4 * math.pi / 3
    np.testing.assert_allclose(quermass(icosphere(5)).values, [w] * 4, atol=1e-2)
    # inscribed approximants sit between the balls of radius r_in and 1
    P = unit_ball_polytope(3)
    for j, value in enumerate(quermass(P).values):
        assert value <= w + 1e-12
        assert value >= w * P.inradius ** (3 - j) - 1e-12


def test_nonconvex_smooth_body():
    with pytest.raises(NonConvexError):
        quermass(SmoothConvexBody(3, torus()))


def test_smooth_body_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        SmoothConvexBody(2, sphere(2, 1.0))


def test_steiner_square():
    check = steiner_check(square(), 0.5)
    assert check.polynomial_value == pytest.approx(3 + math.pi / 4)
    assert check.residual <= check.bound
    assert check.bound < 1e-4


def test_steiner_cube():
    polynomial = steiner(cube())
    expected = 1 + 6 * 0.25 + 3 * math.pi * 0.25**2 + 4 * math.pi / 3 * 0.25**3
    assert polynomial(0.25) == pytest.approx(expected)
    check = steiner_check(cube(), 0.25)
    assert check.residual <= check.bound


def test_steiner_at_zero():
    check = steiner_check(cube(), 0.0)
    assert check.residual == 0.0
    with pytest.raises(ParameterError):
        steiner_check(cube(), -0.1)


def test_steiner_boundary_is_derivative():
    boundary = steiner(square()).boundary()
    assert boundary(0.0) == pytest.approx(4.0)
    assert boundary(1.0) == pytest.approx(4.0 + 2 * math.pi)


def test_mixed_volume_2d():
    K = regular_polygon(5)
    assert mixed_volume_2d(K, K) == pytest.approx(K.volume)
    # V(K, B) is half the perimeter
    value = mixed_volume_2d(square(), unit_ball_polytope(2))
    assert value == pytest.approx(2.0, rel=1e-3)


def test_mixed_volumes_3d():
    kkl, kll = mixed_volumes_3d(cube(), cube())
    assert kkl == pytest.approx(1.0)
    assert kll == pytest.approx(1.0)
    kkl, kll = mixed_volumes_3d(cube(), cube(2.0))
    assert kkl == pytest.approx(2.0)
    assert kll == pytest.approx(4.0)


def test_af_pair_slack_nonnegative():
    assert af_pair_slack(square(), regular_polygon(3)) >= 0
    assert abs(af_pair_slack(square(), square(2.0))) < 1e-9


def test_cube_slacks():
    slacks = inequality_suite(cube())
    assert slacks.minkowski == pytest.approx(4 - math.pi)
    assert slacks.holds
    assert set(slacks.as_dict()) == {
        "minkowski",
        "mean_curvature",
        "fenchel",
        "chain_upper",
        "chain_lower",
    }


def test_ball_is_equality_case():
    W = quermass(ball())
    slacks = inequality_suite(ball())
    for value in slacks.as_dict().values():
        assert abs(value) / W[1] ** 2 < 1e-3


def test_ellipse_slack_is_positive():
    slacks = inequality_suite(ellipse(2.0, 1.0))
    assert slacks.mean_curvature > 0
    assert slacks.fenchel is None
    assert slacks.holds


def test_ellipsoid_and_icosphere_hold():
    assert inequality_suite(smooth_ellipsoid(3.0, 2.0, 1.0)).holds
    assert inequality_suite(icosphere(2)).holds


def test_suite_accepts_vertex_lists():
    assert inequality_suite([[0, 0], [2, 0], [2, 1], [0, 1]]).holds


def test_square_quotient_scan():
    scan = parallel_quotient_scan(square(), [0.0, 0.5, 1.0, 2.0])
    assert scan.quotients[0] == pytest.approx(16.0)
    assert scan.nonincreasing
    assert quotient_derivative(square()) == pytest.approx(16 * math.pi - 64)


def test_disk_quotient_is_constant():
    scan = parallel_quotient_scan(disk(), [0.0, 1.0, 5.0])
    np.testing.assert_allclose(scan.quotients, 4 * math.pi, rtol=1e-10)
    assert abs(quotient_derivative(disk())) < 1e-8


def test_cube_quotient_scan():
    scan = parallel_quotient_scan(cube(), [0.0, 0.1, 1.0, 10.0])
    assert scan.quotients[0] == pytest.approx(216.0)
    assert scan.nonincreasing


def test_quotient_grid_must_increase():
    with pytest.raises(ParameterError):
        parallel_quotient_scan(square(), [0.5, 0.1])


def test_ball_polytope_dimensions():
    assert len(unit_ball_polytope(2).vertices) == 1024
    with pytest.raises(ParameterError):
        unit_ball_polytope(4)


def test_random_suite_is_reproducible():
    first = random_suite(7, polygons=20, polyhedra=5, pairs=20)
    second = random_suite(7, polygons=20, polyhedra=5, pairs=20)
    assert first == second
    assert first.holds


def test_random_suite_at_full_size():
    result = random_suite(2024)
    assert (result.polygons, result.polyhedra, result.pairs) == (100, 20, 100)
    assert result.polygon_slack >= -1e-9
    assert result.polyhedron_slack >= -1e-9
    assert result.pair_slack >= -1e-9
