import math

import numpy as np
import pytest

from capillary_lab.capillary import (
    CapillarySurface,
    HalfSpace,
    Wedge,
    WettedDomain,
    balancing_residual,
    boundary_return_residual,
    bridge_in_wedge,
    cap_in_halfspace,
    contact_angle,
    require_cmc,
    return_translation,
    spheroid_cap_in_halfspace,
    total_energy,
)
from capillary_lab.charts import circle_curve, ellipse_curve, flat_disk
from capillary_lab.exceptions import (
    CMCViolationError,
    EdgeCollisionError,
    GeometryError,
    HypothesisError,
    InfeasibleGeometryError,
    ParameterError,
)
from capillary_lab.hypersurface import area, oriented_volume, sample_patch
from tests import BRIDGE_GRID, CAP_ANGLES


def test_wedge_normals():
    wedge = Wedge(math.pi / 6)
    n1, n2 = wedge.normals
    np.testing.assert_allclose(n1, [0.0, -0.5, math.sqrt(3) / 2], atol=1e-15)
    np.testing.assert_allclose(n2, [0.0, -0.5, -math.sqrt(3) / 2], atol=1e-15)
    assert wedge.edge_distance([5.0, 3.0, 4.0]) == pytest.approx(5.0)


def test_halfspace_normal():
    np.testing.assert_array_equal(HalfSpace(2).normals[0], [0.0, 0.0, -1.0])
    with pytest.raises(ParameterError):
        HalfSpace(1)


def test_round_wetted_domain():
    disk = WettedDomain.round(0, 2, 0.5)
    assert disk.area == pytest.approx(math.pi / 4)
    assert disk.boundary_area == pytest.approx(math.pi)
    assert disk.geodesic_curv_integral == pytest.approx(-2 * math.pi)
    assert disk.parallel_area(0.25) == pytest.approx(math.pi * 0.75**2)


def test_wetted_domain_from_boundary():
    for curve in (circle_curve(0.5), ellipse_curve(2.0, 1.0)):
        domain = WettedDomain.from_boundary(0, curve)
        assert abs(domain.geodesic_curv_integral + 2 * math.pi) < 1e-8
        assert domain.convex
        assert domain.embedded
    disk = WettedDomain.from_boundary(0, circle_curve(0.5))
    # round-disk cancellation 2 * int k ds + L^2 / A = 0
    value = 2 * disk.geodesic_curv_integral + disk.boundary_area**2 / disk.area
    assert abs(value) < 1e-8


def test_from_boundary_refines_coarse_curve():
    coarse = ellipse_curve(2.0, 1.0).with_panels([1])
    domain = WettedDomain.from_boundary(0, coarse)
    assert domain.embedded
    assert domain.convex
    assert abs(domain.geodesic_curv_integral + 2 * math.pi) < 1e-8
    assert abs(domain.area - 2 * math.pi) < 1e-10


def test_wetted_boundary_must_face_outward():
    with pytest.raises(GeometryError, match="not oriented outward"):
        WettedDomain.from_boundary(0, circle_curve(1.0).flipped())


def test_hemisphere_cap(hemisphere_cap, settings):
    assert abs(area(hemisphere_cap.patch) - 2 * math.pi) < 1e-8
    assert hemisphere_cap.wetted[0].area == pytest.approx(math.pi)
    assert hemisphere_cap.mean_curvature == -1.0
    assert abs(hemisphere_cap.enclosed_volume - 2 * math.pi / 3) < 1e-8
    angle, spread = contact_angle(hemisphere_cap, 0, settings)
    assert abs(angle - 0.5 * math.pi) < 1e-10
    assert spread < 1e-10


def test_cap_contact_angle_and_circle(obtuse_cap, settings):
    angle, spread = contact_angle(obtuse_cap, 0, settings)
    assert abs(angle - 2 * math.pi / 3) < 1e-8
    assert spread < 1e-8
    radius = obtuse_cap.wetted[0].boundary_area / (2 * math.pi)
    assert abs(radius - math.sin(math.pi / 3)) < 1e-8


def test_cap_three_quarter_angle(settings):
    cap = cap_in_halfspace(1.0, 0.75 * math.pi, settings=settings)
    angle, spread = contact_angle(cap, 0, settings)
    assert abs(angle - 0.75 * math.pi) < 1e-8
    assert spread < 1e-8


def test_acute_cap_warns(caplog, settings):
    with caplog.at_level("WARNING"):
        cap = cap_in_halfspace(1.0, 1.0, settings=settings)
    assert "below pi/2" in caplog.text
    assert cap.contact_angles == (1.0,)


def test_right_angle_within_tolerance_does_not_warn(caplog, settings):
    with caplog.at_level("WARNING"):
        cap_in_halfspace(1.0, 1.5707963, settings=settings)
    assert "below pi/2" not in caplog.text


@pytest.mark.parametrize("theta", [0.0, math.pi, 4.0])
def test_cap_angle_out_of_range(theta):
    with pytest.raises(HypothesisError):
        cap_in_halfspace(1.0, theta)


def test_total_energy(hemisphere_cap, obtuse_cap, settings):
    assert abs(total_energy(hemisphere_cap, settings) - 2 * math.pi) < 1e-8
    theta = 2 * math.pi / 3
    cap_area = 2 * math.pi * (1 - math.cos(theta))
    disk_area = math.pi * math.sin(theta) ** 2
    expected = cap_area + 0.5 * disk_area
    assert abs(total_energy(obtuse_cap, settings) - expected) < 1e-8


def test_flat_disk_is_not_capillary():
    with pytest.raises(ParameterError, match="not a capillary surface"):
        CapillarySurface(
            patch=flat_disk(1.0),
            container=HalfSpace(2),
            contact_angles=(),
            wetted=(),
            boundary_faces=(),
            mean_curvature=0.0,
            enclosed_volume=0.0,
        )


@pytest.mark.parametrize("theta", CAP_ANGLES)
def test_cap_balancing(theta, settings):
    cap = cap_in_halfspace(1.0, theta, settings=settings)
    assert abs(balancing_residual(cap, 0, settings)) < 1e-8


def test_hemisphere_balancing_exact(hemisphere_cap, settings):
    assert abs(balancing_residual(hemisphere_cap, 0, settings)) < 1e-10


def test_bridge_geometry(wedge_bridge, settings):
    for i in wedge_bridge.walls:
        angle, spread = contact_angle(wedge_bridge, i, settings)
        assert abs(angle - 5 * math.pi / 6) < 1e-8
        assert spread < 1e-8
        assert abs(balancing_residual(wedge_bridge, i, settings)) < 1e-8


def test_bridge_volume_is_ball_minus_wall_caps(settings):
    theta = 2.97
    bridge = bridge_in_wedge(1.0, 1.0, theta, settings=settings)
    h = 1 + math.cos(theta)
    wall_cap = math.pi * h**2 * (3 - h) / 3
    assert bridge.patch.panels[0] > 1
    assert abs(bridge.enclosed_volume - (4 * math.pi / 3 - 2 * wall_cap)) < 1e-9


def test_bridge_center_distance(wedge_bridge, settings):
    samples = sample_patch(wedge_bridge.patch, settings.quadrature_order)
    # every point of a unit-sphere piece is at distance 1 from the center
    center = np.array([0.0, math.sqrt(3), 0.0])
    distances = np.linalg.norm(samples.points - center, axis=1)
    np.testing.assert_allclose(distances, 1.0, atol=1e-10)


def test_bridge_edge_collision():
    with pytest.raises(EdgeCollisionError):
        bridge_in_wedge(1.0, math.pi / 6, 2 * math.pi / 3)


def test_bridge_right_angle_rejected():
    with pytest.raises((EdgeCollisionError, InfeasibleGeometryError, HypothesisError)):
        bridge_in_wedge(1.0, math.pi / 4, 0.5 * math.pi)


def test_bridge_acute_angle_is_hypothesis_failure():
    with pytest.raises(HypothesisError):
        bridge_in_wedge(1.0, math.pi / 6, 1.2)


@pytest.mark.parametrize("alpha, theta", BRIDGE_GRID)
def test_bridge_grid_balancing(alpha, theta, settings):
    bridge = bridge_in_wedge(1.0, alpha, theta, settings=settings)
    for i in bridge.walls:
        assert abs(balancing_residual(bridge, i, settings)) < 1e-8


def test_asymmetric_bridge(settings):
    bridge = bridge_in_wedge(1.0, math.pi / 6, 2.4, 2.8, settings=settings)
    assert contact_angle(bridge, 0, settings)[0] == pytest.approx(2.4, abs=1e-8)
    assert contact_angle(bridge, 1, settings)[0] == pytest.approx(2.8, abs=1e-8)


def test_bridge_in_r4(settings):
    bridge = bridge_in_wedge(1.0, math.pi / 6, 5 * math.pi / 6, n=3, settings=settings)
    assert bridge.dimension == 3
    for i in bridge.walls:
        assert abs(balancing_residual(bridge, i, settings)) < 1e-8


def test_cap_in_r4(settings):
    cap = cap_in_halfspace(1.0, 2 * math.pi / 3, n=3, settings=settings)
    assert abs(balancing_residual(cap, 0, settings)) < 1e-8


def test_return_translation_hemisphere(hemisphere_cap, settings):
    shift = return_translation(hemisphere_cap, settings)
    np.testing.assert_allclose(shift, 0.0, atol=1e-10)


def test_return_translation_cap(obtuse_cap, settings):
    shift = return_translation(obtuse_cap, settings)
    np.testing.assert_allclose(shift[:2], 0.0, atol=1e-12)
    assert boundary_return_residual(obtuse_cap, 0.1, settings) < 1e-10


def test_return_translation_bridge(wedge_bridge, settings):
    assert boundary_return_residual(wedge_bridge, 0.1, settings) < 1e-10


def test_tilted_wedge_keeps_balancing(settings):
    theta = 5 * math.pi / 6
    bridge = bridge_in_wedge(1.0, math.pi / 6, theta, tilt=0.3, settings=settings)
    for i in bridge.walls:
        assert contact_angle(bridge, i, settings)[0] == pytest.approx(theta, abs=1e-8)


def test_spheroid_cap(settings):
    cap = spheroid_cap_in_halfspace(1.5, 1.0, settings=settings)
    assert not cap.cmc
    angle, _ = contact_angle(cap, 0, settings)
    assert abs(angle - 0.5 * math.pi) < 1e-8
    with pytest.raises(CMCViolationError) as error_info:
        require_cmc(cap, settings)
    assert error_info.value.deviation > 0
    with pytest.raises(CMCViolationError):
        balancing_residual(cap, 0, settings)


def test_spheroid_cut_outside_body(settings):
    with pytest.raises(ParameterError):
        spheroid_cap_in_halfspace(1.5, 1.0, cut=2.0, settings=settings)


def test_round_spheroid_cap_is_hemisphere(settings):
    cap = spheroid_cap_in_halfspace(1.0, 1.0, settings=settings)
    assert abs(oriented_volume(cap.patch) - 2 * math.pi / 3) < 1e-8
