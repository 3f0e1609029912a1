import math

import numpy as np
import pytest

from capillary_lab.charts import cylinder, ellipse_curve, flat_disk, sphere
from capillary_lab.exceptions import (
    ContractViolation,
    DegenerateImmersionError,
    FocalCrossingError,
    ParameterError,
    QuadratureError,
)
from capillary_lab.hypersurface import (
    ParametricPatch,
    TubePolynomial,
    area,
    curvature_at,
    curvature_integral,
    gauss_map_integral,
    oriented_volume,
    parallel_patch,
    refine_panels,
    sample_patch,
    tube_polynomial,
    volume_polynomial,
)


def test_sphere_curvatures(unit_sphere):
    data = curvature_at(unit_sphere, [1.1, 2.3])
    np.testing.assert_allclose(data.principal_curvatures, [-1.0, -1.0], atol=1e-12)
    assert data.mean_curvature == pytest.approx(-1.0, abs=1e-12)
    assert abs(np.linalg.norm(data.gauss) - 1.0) < 1e-12
    np.testing.assert_allclose(data.gauss, data.point, atol=1e-12)


def test_cylinder_curvatures():
    data = curvature_at(cylinder(2.0, 1.0), [0.3, 0.5])
    curvatures = sorted(data.principal_curvatures)
    np.testing.assert_allclose(curvatures, [-0.5, 0.0], atol=1e-12)


def test_torus_outer_equator(standard_torus):
    data = curvature_at(standard_torus, [0.4, 0.0])
    np.testing.assert_allclose(
        data.principal_curvatures, [-1.0, -1.0 / 3.0], atol=1e-8
    )


def test_fd_fallback_matches_analytic(unit_sphere):
    numeric = ParametricPatch(
        ambient_dim=3,
        param_box=unit_sphere.param_box,
        position=unit_sphere.position,
        orientation_sign=unit_sphere.orientation_sign,
        name="numeric sphere",
    )
    data = curvature_at(numeric, [1.0, 0.5])
    np.testing.assert_allclose(data.principal_curvatures, [-1.0, -1.0], atol=1e-6)


def test_degenerate_immersion():
    patch = ParametricPatch(
        ambient_dim=3,
        param_box=((0, 1), (0, 1)),
        position=lambda u: np.array([u[0] + u[1], 0.0, 0.0]),
        name="collapsed",
    )
    with pytest.raises(DegenerateImmersionError, match="collapsed"):
        curvature_at(patch, [0.5, 0.5])


def test_patch_dimension_mismatch():
    with pytest.raises(ParameterError, match="ambient dimension"):
        ParametricPatch(ambient_dim=4, param_box=((0, 1), (0, 1)), position=np.sin)


def test_areas(unit_sphere, unit_hemisphere, standard_torus):
    assert abs(area(unit_sphere) - 4 * math.pi) < 1e-8
    assert abs(area(unit_hemisphere) - 2 * math.pi) < 1e-8
    assert abs(area(standard_torus) - 8 * math.pi**2) < 1e-8


def test_oriented_volumes(unit_sphere, unit_hemisphere):
    assert abs(oriented_volume(unit_sphere) - 4 * math.pi / 3) < 1e-8
    assert abs(oriented_volume(unit_hemisphere) - 2 * math.pi / 3) < 1e-8
    assert abs(oriented_volume(unit_sphere.flipped()) + 4 * math.pi / 3) < 1e-8


def test_closing_disk_adds_no_volume(unit_hemisphere):
    closed = [unit_hemisphere, flat_disk(1.0)]
    assert abs(oriented_volume(closed) - 2 * math.pi / 3) < 1e-8


def test_gauss_map_integral_vanishes(unit_sphere, standard_torus, unit_hemisphere):
    assert np.max(np.abs(gauss_map_integral(unit_sphere))) < 1e-10
    assert np.max(np.abs(gauss_map_integral(standard_torus))) < 1e-8
    capped = gauss_map_integral([unit_hemisphere, flat_disk(1.0)])
    assert np.max(np.abs(capped)) < 1e-8


def test_curvature_integrals(unit_sphere, standard_torus):
    expected = (4 * math.pi, 8 * math.pi, 4 * math.pi)
    for ell, value in enumerate(expected):
        assert abs(curvature_integral(unit_sphere, ell) - value) < 1e-8
    assert abs(curvature_integral(flat_disk(1.0), 1)) < 1e-12
    assert abs(curvature_integral(standard_torus, 2)) < 1e-8


def test_curvature_integral_range(unit_sphere):
    with pytest.raises(ParameterError):
        curvature_integral(unit_sphere, 3)


def test_sphere_tube_and_volume_polynomials(unit_sphere):
    tube = tube_polynomial(unit_sphere)
    np.testing.assert_allclose(
        tube.coefficients, [4 * math.pi, 8 * math.pi, 4 * math.pi], atol=1e-8
    )
    volume = volume_polynomial(tube, oriented_volume(unit_sphere))
    np.testing.assert_allclose(
        volume.coefficients,
        [4 * math.pi / 3, 4 * math.pi, 4 * math.pi, 4 * math.pi / 3],
        atol=1e-8,
    )
    assert volume.derivative_residual(tube) < 1e-6
    assert volume.coefficients[1] == tube.coefficients[0]
    assert 2 * volume.coefficients[2] == pytest.approx(tube.coefficients[1])


def test_torus_tube_polynomial(standard_torus):
    tube = tube_polynomial(standard_torus)
    assert abs(tube.coefficients[0] - 8 * math.pi**2) < 1e-8
    mean = sample_patch(standard_torus).mean_curvatures
    a1 = -2.0 * sample_patch(standard_torus).integrate(mean)
    assert abs(tube.coefficients[1] - a1) < 1e-8
    assert abs(tube.coefficients[2]) < 1e-8
    sampled = area(parallel_patch(standard_torus, 0.1))
    assert abs(sampled - tube(0.1)) < 1e-6


def test_tube_polynomial_needs_area():
    with pytest.raises(ContractViolation):
        TubePolynomial((0.0, 1.0))


@pytest.mark.parametrize("t", [-0.2, -0.1, 0.1, 0.2])
def test_parallel_area_follows_tube_polynomial(unit_sphere, t):
    tube = tube_polynomial(unit_sphere)
    assert abs(area(parallel_patch(unit_sphere, t)) - tube(t)) < 1e-6


def test_parallel_sphere_area(unit_sphere):
    assert abs(area(parallel_patch(unit_sphere, 0.5)) - 4 * math.pi * 1.5**2) < 1e-8


def test_parallel_at_zero_is_identity(standard_torus):
    moved = parallel_patch(standard_torus, 0.0)
    assert abs(area(moved) - area(standard_torus)) < 1e-10
    np.testing.assert_allclose(
        curvature_at(moved, [0.3, 0.9]).principal_curvatures,
        curvature_at(standard_torus, [0.3, 0.9]).principal_curvatures,
        atol=1e-6,
    )


def test_parallel_focal_crossing(standard_torus):
    with pytest.raises(FocalCrossingError, match="focal set"):
        parallel_patch(standard_torus, -1.5)


def test_orientation_flip_equivariance(unit_sphere):
    flipped = unit_sphere.flipped()
    original = curvature_at(unit_sphere, [0.8, 0.1])
    reversed_ = curvature_at(flipped, [0.8, 0.1])
    np.testing.assert_allclose(reversed_.gauss, -original.gauss, atol=1e-14)
    assert reversed_.mean_curvature == pytest.approx(-original.mean_curvature)
    for ell in range(3):
        sign = (-1) ** ell
        assert curvature_integral(flipped, ell) == pytest.approx(
            sign * curvature_integral(unit_sphere, ell), abs=1e-8
        )


def test_hypersphere_in_r4():
    patch = sphere(3, 1.0)
    assert abs(area(patch) - 2 * math.pi**2) < 1e-8
    assert abs(oriented_volume(patch) - 0.5 * math.pi**2) < 1e-8
    tube = tube_polynomial(patch)
    np.testing.assert_allclose(
        tube.coefficients, [2 * math.pi**2 * c for c in (1, 3, 3, 1)], atol=1e-7
    )


def test_refined_sphere_keeps_one_panel(unit_sphere):
    refined, change = refine_panels(unit_sphere)
    assert refined is unit_sphere
    assert change < 1e-12


def test_refine_resolves_eccentric_curve():
    coarse = ellipse_curve(2.0, 1.0).with_panels([1])
    assert abs(curvature_integral(coarse, 1) - 2 * math.pi) > 1e-6
    refined, _ = refine_panels(coarse)
    assert refined.panels[0] > 1
    assert abs(curvature_integral(refined, 1) - 2 * math.pi) < 1e-10
    assert abs(oriented_volume(refined) - 2 * math.pi) < 1e-10


def test_refine_respects_panel_budget():
    coarse = ellipse_curve(2.0, 1.0).with_panels([1])
    with pytest.raises(QuadratureError, match="not resolved"):
        refine_panels(coarse, max_panels=1)


def test_parallel_patch_keeps_panels():
    curve = ellipse_curve(2.0, 1.0)
    moved = parallel_patch(curve, 0.1)
    assert moved.panels == curve.panels
    assert abs(area(moved) - tube_polynomial(curve)(0.1)) < 1e-8
