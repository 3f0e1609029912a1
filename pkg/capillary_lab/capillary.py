"""
Capillary hypersurfaces in a wedge or a half-space.

Walls are hyperplanes through the origin with outward unit normals N_i, so the
oriented volume of a capillary surface equals the volume it encloses together
with the walls. The contact angle along C_i satisfies cos(theta_i) = -eps_i <nu, N_i>,
where eps_i = +1 when nu points out of the enclosed region.
"""

import logging
import math
from dataclasses import dataclass
from math import comb, gamma
from typing import Optional, Sequence, Union

import numpy as np

from capillary_lab.charts import (
    affine_matrix,
    projective_sphere_patch,
    spherical_cap,
    sphere_box,
    ellipsoid,
)
from capillary_lab.config import Settings, resolve_settings
from capillary_lab.exceptions import (
    CMCViolationError,
    EdgeCollisionError,
    GeometryError,
    HypothesisError,
    IncompleteInputError,
    InfeasibleGeometryError,
    ParameterError,
)
from capillary_lab.hypersurface import (
    ParametricPatch,
    area,
    gauss_at,
    oriented_volume,
    refine_panels,
    sample_patch,
    tube_polynomial,
)
from capillary_lab.numkernel import tensor_grid

logger = logging.getLogger(__name__)

Face = tuple[int, int]


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Wedge:
    """
    Open wedge {<x, N_1> < 0, <x, N_2> < 0} in R^{n+1}.

    Before `tilt`, the walls pass through the edge {x_n = x_{n+1} = 0} at angles
    +alpha and -alpha to {x_{n+1} = 0} and the wedge opens towards +x_n. `tilt`
    rotates the whole configuration about the edge.
    """

    half_angle: float
    dimension: int = 2
    tilt: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.half_angle < 0.5 * math.pi:
            raise ParameterError(
                f"Wedge half-angle must lie in (0, pi/2), got {self.half_angle}"
            )
        if self.dimension < 2:
            raise ParameterError(f"Wedges need n >= 2, got {self.dimension}")

    @property
    def ambient_dim(self) -> int:
        return self.dimension + 1

    def plane_normals_2d(self) -> np.ndarray:
        """Outward normals restricted to the (x_n, x_{n+1}) plane, one per row."""
        s, c = math.sin(self.half_angle), math.cos(self.half_angle)
        rows = np.array([[-s, c], [-s, -c]])
        return rows @ _rotation(self.tilt).T

    @property
    def normals(self) -> tuple[np.ndarray, ...]:
        found = []
        for row in self.plane_normals_2d():
            normal = np.zeros(self.ambient_dim)
            normal[-2:] = row
            found.append(normal)
        return tuple(found)

    def edge_distance(self, x: Sequence[float]) -> float:
        point = np.asarray(x, dtype=float)
        return float(math.hypot(point[-2], point[-1]))


@dataclass(frozen=True)
class HalfSpace:
    """Open half-space {x_{n+1} > 0} with wall normal N = -e_{n+1}."""

    dimension: int = 2

    def __post_init__(self) -> None:
        if self.dimension < 2:
            raise ParameterError(f"Half-spaces need n >= 2, got {self.dimension}")

    @property
    def ambient_dim(self) -> int:
        return self.dimension + 1

    @property
    def normals(self) -> tuple[np.ndarray, ...]:
        normal = np.zeros(self.ambient_dim)
        normal[-1] = -1.0
        return (normal,)


Container = Union[Wedge, HalfSpace]


def unit_ball_volume(n: int) -> float:
    return math.pi ** (0.5 * n) / gamma(0.5 * n + 1)


@dataclass(frozen=True)
class WettedDomain:
    """
    The region D_i of wall i wetted by the drop, bounded by C_i.

    `boundary_coefficients` b_0..b_{n-1} give the area of the parallel domain,
    A + sum b_l s^{l+1} / (l + 1); b_0 is the measure of C_i and b_1 is minus
    the integral of (n - 1) times the mean curvature of C_i, taken with the
    outward normal of D_i.
    """

    plane_index: int
    area: float
    boundary_coefficients: tuple[float, ...]
    orientation_sign: int = 1
    convex: bool = True
    embedded: bool = True

    def __post_init__(self) -> None:
        if not self.area > 0:
            raise GeometryError(f"Wetted domain {self.plane_index} has no area")
        if not self.boundary_coefficients or not self.boundary_coefficients[0] > 0:
            raise GeometryError(
                f"Wetted domain {self.plane_index} has an empty boundary"
            )
        if self.orientation_sign not in (1, -1):
            raise ParameterError(
                f"orientation_sign must be +1 or -1, got {self.orientation_sign}"
            )

    @property
    def dimension(self) -> int:
        return len(self.boundary_coefficients)

    @property
    def boundary_area(self) -> float:
        return self.boundary_coefficients[0]

    @property
    def boundary_mean_curv_integral(self) -> float:
        """Integral of (n - 1) H over C_i, outward convention."""
        if len(self.boundary_coefficients) < 2:
            raise IncompleteInputError(
                f"Wetted domain {self.plane_index} carries no boundary curvature data"
            )
        return -self.boundary_coefficients[1]

    @property
    def geodesic_curv_integral(self) -> float:
        """Integral of k ds along C_i; defined for n = 2 only."""
        if self.dimension != 2:
            raise ParameterError(
                f"Geodesic curvature needs a curve boundary, got n={self.dimension}"
            )
        return self.boundary_mean_curv_integral

    def parallel_area(self, s: float) -> float:
        """Area of the parallel domain of D_i at distance s inside its wall."""
        return self.area + sum(
            b * s ** (ell + 1) / (ell + 1)
            for ell, b in enumerate(self.boundary_coefficients)
        )

    @classmethod
    def round(
        cls, plane_index: int, n: int, radius: float, orientation_sign: int = 1
    ) -> "WettedDomain":
        """Exact data of a round n-ball of the given radius."""
        if not radius > 0:
            raise GeometryError(f"Wetted ball radius must be positive, got {radius}")
        sphere_measure = n * unit_ball_volume(n)
        return cls(
            plane_index=plane_index,
            area=unit_ball_volume(n) * radius**n,
            boundary_coefficients=tuple(
                comb(n - 1, ell) * radius ** (n - 1 - ell) * sphere_measure
                for ell in range(n)
            ),
            orientation_sign=orientation_sign,
        )

    @classmethod
    def from_boundary(
        cls,
        plane_index: int,
        boundary: ParametricPatch,
        orientation_sign: int = 1,
        order: Optional[int] = None,
        curvature_tolerance: float = 1e-9,
        quadrature_tolerance: float = 1e-10,
    ) -> "WettedDomain":
        """
        Wetted-domain data by quadrature over an outward-oriented closed boundary,
        given in coordinates of the wall.

        The boundary is first split into quadrature panels by `refine_panels`.
        Convexity is read off the sign of the boundary curvatures (all <= 0 with the
        outward normal). For curves, embeddedness is judged by total turning -2*pi,
        within a slack set by the refinement error.
        """
        boundary, error = refine_panels(boundary, order, quadrature_tolerance)
        enclosed = oriented_volume(boundary, order)
        if not enclosed > 0:
            raise GeometryError(
                f"Boundary {boundary.name!r} is not oriented outward "
                f"(enclosed volume {enclosed:g})"
            )
        coefficients = tube_polynomial(boundary, order).coefficients
        curvatures = sample_patch(boundary, order).curvatures
        embedded = True
        if boundary.dimension == 1:
            slack = 2.0 * math.pi * (quadrature_tolerance + 10.0 * error)
            embedded = abs(coefficients[1] - 2.0 * math.pi) <= slack
        return cls(
            plane_index=plane_index,
            area=enclosed,
            boundary_coefficients=coefficients,
            orientation_sign=orientation_sign,
            convex=bool(np.all(curvatures <= curvature_tolerance)),
            embedded=embedded,
        )


@dataclass(frozen=True, eq=False)
class CapillarySurface:
    """
    A hypersurface meeting the walls of its container along the parameter faces
    in `boundary_faces`, one (axis, side) face per wall.
    """

    patch: ParametricPatch
    container: Container
    contact_angles: tuple[float, ...]
    wetted: tuple[WettedDomain, ...]
    boundary_faces: tuple[Face, ...]
    mean_curvature: float
    enclosed_volume: float
    cmc: bool = True
    name: str = "capillary"

    def __post_init__(self) -> None:
        walls = len(self.container.normals)
        if not self.contact_angles:
            raise ParameterError(
                f"{self.patch.name!r} has no contact angle, not a capillary surface"
            )
        counts = {len(self.contact_angles), len(self.wetted), len(self.boundary_faces)}
        if counts != {walls}:
            raise ParameterError(
                f"Expected one contact angle, wetted domain and face per wall ({walls})"
            )
        for theta in self.contact_angles:
            if not 0 < theta < math.pi:
                raise HypothesisError(f"Contact angle {theta} lies outside (0, pi)")
        if self.patch.ambient_dim != self.container.ambient_dim:
            raise ParameterError(
                f"Patch lives in R^{self.patch.ambient_dim}, container in "
                f"R^{self.container.ambient_dim}"
            )

    @property
    def dimension(self) -> int:
        return self.patch.dimension

    @property
    def walls(self) -> range:
        return range(len(self.contact_angles))


def _require_surface(surface: object) -> CapillarySurface:
    if not isinstance(surface, CapillarySurface):
        raise ParameterError(
            f"Expected a capillary surface, got {type(surface).__name__}"
        )
    return surface


def boundary_nodes(patch: ParametricPatch, face: Face, order: int) -> np.ndarray:
    """Gauss nodes on one face of the parameter box."""
    axis, side = face
    box = patch.param_box
    fixed = box[axis][side]
    rest = [side_range for k, side_range in enumerate(box) if k != axis]
    if not rest:
        return np.array([[fixed]])
    panels = [count for k, count in enumerate(patch.panels) if k != axis]
    nodes, _ = tensor_grid(rest, order, panels)
    return np.insert(nodes, axis, fixed, axis=1)


def _wall_products(
    surface: CapillarySurface, i: int, settings: Settings
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boundary points, Gauss map and <nu, N_i> along C_i, checked against the wall."""
    nodes = boundary_nodes(
        surface.patch, surface.boundary_faces[i], settings.quadrature_order
    )
    normal = surface.container.normals[i]
    points = np.stack([surface.patch.position(node) for node in nodes])
    offsets = np.abs(points @ normal)
    if float(offsets.max()) > settings.plane_tolerance:
        raise GeometryError(
            f"Boundary {i} of {surface.name!r} leaves its wall by "
            f"{float(offsets.max()):.3g}"
        )
    gauss = np.stack([gauss_at(surface.patch, node) for node in nodes])
    return points, gauss, gauss @ normal


def contact_angle(
    surface: CapillarySurface, i: int, settings: Optional[Settings] = None
) -> tuple[float, float]:
    """
    Contact angle between the surface and D_i sampled along C_i.

    Returns:
        tuple: (mean angle, max deviation from the mean) in radians.
    """
    surface = _require_surface(surface)
    settings = resolve_settings(settings)
    if i not in surface.walls:
        raise ParameterError(f"{surface.name!r} has no wall {i}")
    eps = surface.wetted[i].orientation_sign
    _, _, products = _wall_products(surface, i, settings)
    angles = np.arccos(np.clip(-eps * products, -1.0, 1.0))
    mean = float(np.mean(angles))
    return mean, float(np.max(np.abs(angles - mean)))


def mean_curvature_spread(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> tuple[float, float]:
    """(mean, standard deviation) of the sampled mean curvature."""
    settings = resolve_settings(settings)
    values = sample_patch(surface.patch, settings.quadrature_order).mean_curvatures
    return float(np.mean(values)), float(np.std(values))


def require_cmc(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> float:
    """Sampled constant mean curvature, refusing surfaces that are not CMC."""
    settings = resolve_settings(settings)
    mean, spread = mean_curvature_spread(surface, settings)
    if not surface.cmc or spread > settings.cmc_tolerance:
        raise CMCViolationError(
            f"{surface.name!r} is not CMC: mean curvature varies by {spread:.3g}",
            spread,
        )
    return mean


def total_energy(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> float:
    """Area plus wetting energy, H^n(Sigma) - sum cos(theta_i) H^n(D_i)."""
    surface = _require_surface(surface)
    settings = resolve_settings(settings)
    wetting = sum(
        math.cos(theta) * domain.area
        for theta, domain in zip(surface.contact_angles, surface.wetted)
    )
    return area(surface.patch, settings.quadrature_order) - wetting


def balancing_residual(
    surface: CapillarySurface, i: int, settings: Optional[Settings] = None
) -> float:
    """
    n H H^n(D_i) + sin(theta_i) H^{n-1}(C_i), which vanishes on capillary surfaces.

    Raises:
        CMCViolationError: If the sampled mean curvature is not constant.
    """
    surface = _require_surface(surface)
    H = require_cmc(surface, settings)
    domain = surface.wetted[i]
    theta = surface.contact_angles[i]
    return surface.dimension * H * domain.area + math.sin(theta) * domain.boundary_area


def return_translation(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> np.ndarray:
    """
    Vector a with <a, N_i> = -<nu, N_i> on every C_i, so that X + t nu + t a keeps
    each boundary on its wall.

    Raises:
        GeometryError: For dependent wall normals or a non-constant contact angle.
    """
    surface = _require_surface(surface)
    settings = resolve_settings(settings)
    targets = []
    for i in surface.walls:
        _, _, products = _wall_products(surface, i, settings)
        spread = float(np.max(products) - np.min(products))
        if spread > settings.angle_tolerance:
            raise GeometryError(
                f"Contact angle along boundary {i} of {surface.name!r} is not "
                f"constant (spread {spread:.3g})"
            )
        targets.append(-float(np.mean(products)))
    container = surface.container
    if isinstance(container, HalfSpace):
        return targets[0] * container.normals[0]
    system = container.plane_normals_2d()
    if abs(np.linalg.det(system)) < 1e-12:
        raise GeometryError("Wedge walls have dependent normals")
    translation = np.zeros(container.ambient_dim)
    translation[-2:] = np.linalg.solve(system, np.array(targets))
    return translation


def boundary_return_residual(
    surface: CapillarySurface, t: float, settings: Optional[Settings] = None
) -> float:
    """Largest distance from its wall of a boundary point of X + t nu + t a."""
    settings = resolve_settings(settings)
    shift = return_translation(surface, settings)
    worst = 0.0
    for i in surface.walls:
        points, gauss, _ = _wall_products(surface, i, settings)
        moved = points + t * gauss + t * shift
        worst = max(worst, float(np.max(np.abs(moved @ surface.container.normals[i]))))
    return worst


def validate_surface(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> None:
    """
    Check the capillary invariants: interior inside the container, boundary on the
    walls and away from the edge, constant contact angles, CMC when claimed.
    """
    settings = resolve_settings(settings)
    samples = sample_patch(surface.patch, settings.quadrature_order)
    for i, normal in enumerate(surface.container.normals):
        outside = float(np.max(samples.points @ normal))
        if outside > settings.plane_tolerance:
            raise GeometryError(
                f"{surface.name!r} leaves its container through wall {i} "
                f"by {outside:.3g}"
            )
    if isinstance(surface.container, Wedge):
        clouds = [samples.points] + [
            _wall_products(surface, i, settings)[0] for i in surface.walls
        ]
        gap = min(
            float(np.min(np.hypot(points[:, -2], points[:, -1]))) for points in clouds
        )
        if gap <= settings.edge_tolerance:
            raise EdgeCollisionError(f"{surface.name!r} touches the wedge edge")
    for i, theta in enumerate(surface.contact_angles):
        measured, spread = contact_angle(surface, i, settings)
        if spread > settings.angle_tolerance or abs(measured - theta) > 1e-6:
            raise GeometryError(
                f"Boundary {i} of {surface.name!r} meets its wall at {measured:.9g} "
                f"(spread {spread:.3g}), expected {theta:.9g}"
            )
    if surface.cmc:
        require_cmc(surface, settings)


def _check_cap_angle(theta: float, settings: Settings) -> None:
    if not 0 < theta < math.pi:
        raise HypothesisError(f"Contact angle must lie in (0, pi), got {theta}")
    if theta < 0.5 * math.pi - settings.angle_tolerance:
        logger.warning(
            "Contact angle %.6g is below pi/2; the stability theorem does not apply",
            theta,
        )


def cap_in_halfspace(
    R: float, theta: float, n: int = 2, settings: Optional[Settings] = None
) -> CapillarySurface:
    """
    Spherical cap meeting {x_{n+1} = 0} at the constant angle `theta`.

    The sphere center sits at height -R cos(theta) and the wetted ball has
    radius R sin(theta).
    """
    if not R > 0:
        raise ParameterError(f"Radius must be positive, got {R}")
    settings = resolve_settings(settings)
    _check_cap_angle(theta, settings)
    height = -R * math.cos(theta)
    center = np.zeros(n + 1)
    center[-1] = height
    patch = spherical_cap(n, R, theta, center)
    logger.debug("Cap R=%g theta=%g: center height %g", R, theta, height)
    surface = CapillarySurface(
        patch=patch,
        container=HalfSpace(n),
        contact_angles=(float(theta),),
        wetted=(WettedDomain.round(0, n, R * math.sin(theta)),),
        boundary_faces=((0, 1),),
        mean_curvature=-1.0 / R,
        enclosed_volume=oriented_volume(patch, settings.quadrature_order),
        name=f"cap(R={R:g}, theta={theta:.6g})",
    )
    validate_surface(surface, settings)
    return surface


def spheroid_cap_in_halfspace(
    a: float,
    c: float,
    cut: float = 0.0,
    n: int = 2,
    settings: Optional[Settings] = None,
) -> CapillarySurface:
    """
    Part of the spheroid x^2/a^2 + z^2/c^2 = 1 above z = cut, lowered onto the wall.

    Axial symmetry keeps the contact angle constant; the mean curvature is not,
    so the record is flagged non-CMC and never reaches a stability verdict.
    """
    if not (a > 0 and c > 0):
        raise ParameterError(f"Spheroid radii must be positive, got a={a}, c={c}")
    if not -c < cut < c:
        raise ParameterError(f"Cut height {cut} lies outside the spheroid (-{c}, {c})")
    settings = resolve_settings(settings)
    rim = a * math.sqrt(1.0 - (cut / c) ** 2)
    slope = np.array([rim / a**2, cut / c**2])
    theta = math.acos(slope[1] / np.linalg.norm(slope))
    center = np.zeros(n + 1)
    center[-1] = -cut
    patch = ellipsoid(
        [a] * n + [c],
        center,
        polar=(0.0, math.acos(cut / c)),
        name=f"spheroid-cap(a={a:g}, c={c:g}, cut={cut:g})",
    )
    surface = CapillarySurface(
        patch=patch,
        container=HalfSpace(n),
        contact_angles=(theta,),
        wetted=(WettedDomain.round(0, n, rim),),
        boundary_faces=((0, 1),),
        mean_curvature=_sampled_mean_curvature(patch, settings),
        enclosed_volume=oriented_volume(patch, settings.quadrature_order),
        cmc=False,
        name=patch.name,
    )
    validate_surface(surface, settings)
    return surface


def _sampled_mean_curvature(patch: ParametricPatch, settings: Settings) -> float:
    return float(
        np.mean(sample_patch(patch, settings.quadrature_order).mean_curvatures)
    )


def _lorentz(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[:-1] @ b[:-1] - a[-1] * b[-1])


def _coaxial_frame(
    normals: Sequence[np.ndarray], offsets: Sequence[float]
) -> tuple[np.ndarray, float, float]:
    """
    Lorentz frame [f_1..f_n, sigma, tau] turning the wall circles
    {<y, N_i> = d_i} of the unit sphere into the latitudes y_n = z_1 and
    y_n = z_2 = -z_1, with the removed caps {y_n > z_1} and {y_n < z_2}.

    Returns:
        tuple: (frame matrix, z_1, z_2).
    """
    s1 = np.append(normals[0], offsets[0])
    s2 = np.append(normals[1], offsets[1])
    g11, g12, g22 = _lorentz(s1, s1), _lorentz(s1, s2), _lorentz(s2, s2)
    if g11 * g22 - g12 * g12 >= 0:
        raise InfeasibleGeometryError("Wall circles meet on the sphere")
    u1 = s1 / math.sqrt(g11)
    u2 = s2 / math.sqrt(g22)
    if _lorentz(u1, u2) >= 0:
        raise InfeasibleGeometryError("Wall caps are nested instead of disjoint")
    difference = u1 - u2
    total = u1 + u2
    sigma = difference / math.sqrt(_lorentz(difference, difference))
    tau = total / math.sqrt(-_lorentz(total, total))
    if tau[-1] <= 0:
        raise InfeasibleGeometryError("Wall caps overlap")
    z1 = -_lorentz(tau, u1) / _lorentz(sigma, u1)
    z2 = -_lorentz(tau, u2) / _lorentz(sigma, u2)

    size = s1.size
    spacelike: list[np.ndarray] = []
    for k in range(size):
        v = np.zeros(size)
        v[k] = 1.0
        v = v - _lorentz(v, sigma) * sigma + _lorentz(v, tau) * tau
        for f in spacelike:
            v = v - _lorentz(v, f) * f
        norm = _lorentz(v, v)
        if norm > 1e-10:
            spacelike.append(v / math.sqrt(norm))
        if len(spacelike) == size - 2:
            break
    return np.column_stack(spacelike + [sigma, tau]), z1, z2


def bridge_in_wedge(
    R: float,
    alpha: float,
    theta1: float,
    theta2: Optional[float] = None,
    n: int = 2,
    tilt: float = 0.0,
    settings: Optional[Settings] = None,
) -> CapillarySurface:
    """
    Spherical bridge between the walls of a wedge, disjoint from its edge.

    The sphere center c solves <c, N_i> = R cos(theta_i). A Lorentz
    transformation of S^n turns the two wall circles into coaxial latitudes, so
    the bridge is one angular chart with the polar angle running from C_1 to C_2.
    The transformation crowds the image near one end, so the chart is split
    into quadrature panels until its volume and tube coefficients settle.

    Args:
        R (float): Sphere radius.
        alpha (float): Wedge half-angle in (0, pi/2).
        theta1 (float): Contact angle with wall 1.
        theta2 (float, optional): Contact angle with wall 2. Defaults to `theta1`.
        n (int): Surface dimension. Defaults to 2.
        tilt (float): Rotation of the wedge about its edge. Defaults to 0.
        settings (Settings, optional): Numerical settings.

    Raises:
        HypothesisError: If a contact angle is below pi/2 (center outside the wedge).
        EdgeCollisionError: If the sphere reaches the edge.
        InfeasibleGeometryError: If no bridge exists for the parameters.
        QuadratureError: If the chart needs more than `settings.max_panels` panels.
    """
    theta2 = theta1 if theta2 is None else theta2
    if not R > 0:
        raise ParameterError(f"Radius must be positive, got {R}")
    settings = resolve_settings(settings)
    wedge = Wedge(alpha, n, tilt)
    thetas = (float(theta1), float(theta2))
    for theta in thetas:
        if not 0 < theta < math.pi:
            raise HypothesisError(f"Contact angle must lie in (0, pi), got {theta}")
        if theta < 0.5 * math.pi - settings.angle_tolerance:
            raise HypothesisError(
                f"Contact angle {theta:.6g} < pi/2 puts the sphere center outside the "
                "wedge; no embedded bridge exists"
            )
    system = wedge.plane_normals_2d()
    try:
        center_2d = np.linalg.solve(system, R * np.cos(thetas))
    except np.linalg.LinAlgError:
        raise InfeasibleGeometryError("Wedge walls do not determine a sphere center")
    if np.any(system @ center_2d > 1e-12):
        raise InfeasibleGeometryError(
            f"Sphere center {center_2d.tolist()} lies outside the wedge"
        )
    distance = float(np.hypot(*center_2d))
    if distance <= R + settings.edge_tolerance:
        raise EdgeCollisionError(
            f"Sphere of radius {R:g} at distance {distance:.9g} from the edge "
            "touches the edge"
        )
    center = np.zeros(n + 1)
    center[-2:] = center_2d
    logger.debug(
        "Bridge R=%g alpha=%g thetas=%s: center %s, edge distance %g",
        R,
        alpha,
        thetas,
        center_2d,
        distance,
    )

    frame, z1, z2 = _coaxial_frame(wedge.normals, [-math.cos(t) for t in thetas])
    matrix = affine_matrix([R] * (n + 1), center) @ frame
    patch = projective_sphere_patch(
        n,
        matrix,
        sphere_box(n, (math.acos(z1), math.acos(z2))),
        center,
        name=(
            f"bridge(R={R:g}, alpha={alpha:.6g}, "
            f"thetas=({thetas[0]:.6g}, {thetas[1]:.6g}))"
        ),
    )
    patch, _ = refine_panels(
        patch,
        settings.quadrature_order,
        settings.quadrature_tolerance,
        settings.max_panels,
    )
    surface = CapillarySurface(
        patch=patch,
        container=wedge,
        contact_angles=thetas,
        wetted=tuple(
            WettedDomain.round(i, n, R * math.sin(theta))
            for i, theta in enumerate(thetas)
        ),
        boundary_faces=((0, 0), (0, 1)),
        mean_curvature=-1.0 / R,
        enclosed_volume=oriented_volume(patch, settings.quadrature_order),
        name=patch.name,
    )
    validate_surface(surface, settings)
    return surface
