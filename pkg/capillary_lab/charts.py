"""
Analytic patch builders.

Every round or quadric piece is the image of the angular chart of the unit
sphere S^n under a projective map x = P(M (y, 1)) / last(M (y, 1)); affine M
gives spheres, caps and ellipsoids, Lorentz M gives Moebius images of spheres.
All builders supply exact first and second partials.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from capillary_lab.exceptions import EvaluationError, ParameterError
from capillary_lab.hypersurface import ParametricPatch, cofactor_normal
from capillary_lab.numkernel import Box, JetEstimate, as_box

logger = logging.getLogger(__name__)

_ONE, _SIN, _COS = 0, 1, 2


@lru_cache(maxsize=None)
def _factor_codes(n: int) -> np.ndarray:
    # y_n = cos p0, y_{n-k} = sin p0 .. sin p_{k-1} cos p_k, y_1 and y_0 close
    # with sin / cos of the last (azimuthal) parameter
    m = n + 1
    codes = np.full((m, n), _ONE, dtype=int)
    for k in range(n - 1):
        row = n - k
        codes[row, :k] = _SIN
        codes[row, k] = _COS
    codes[1, : n - 1] = _SIN
    codes[1, n - 1] = _SIN
    codes[0, : n - 1] = _SIN
    codes[0, n - 1] = _COS
    codes.setflags(write=False)
    return codes


def _factor_tables(codes: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, ...]:
    s = np.sin(u)[None, :]
    c = np.cos(u)[None, :]
    one = np.ones_like(s)
    zero = np.zeros_like(s)
    value = np.where(codes == _SIN, s, np.where(codes == _COS, c, one))
    first = np.where(codes == _SIN, c, np.where(codes == _COS, -s, zero))
    second = np.where(codes == _SIN, -s, np.where(codes == _COS, -c, zero))
    return value, first, second


def _product_without(table: np.ndarray, skip: Sequence[int]) -> np.ndarray:
    keep = [p for p in range(table.shape[1]) if p not in skip]
    if not keep:
        return np.ones(table.shape[0])
    return np.prod(table[:, keep], axis=1)


def unit_sphere_jet(n: int, u: Sequence[float]) -> JetEstimate:
    """
    Exact jet of the angular chart of S^n at u = (phi_1, ..., phi_{n-1}, lambda).

    phi_1 is the polar angle from the last axis, lambda the azimuth in the
    (x_0, x_1) plane.
    """
    point = np.asarray(u, dtype=float)
    if point.shape != (n,):
        raise ParameterError(f"Expected {n} angles, got shape {point.shape}")
    codes = _factor_codes(n)
    value, first, second = _factor_tables(codes, point)
    jet_first = np.empty((n, n + 1))
    jet_second = np.empty((n, n, n + 1))
    for p in range(n):
        jet_first[p] = first[:, p] * _product_without(value, [p])
        jet_second[p, p] = second[:, p] * _product_without(value, [p])
        for q in range(p):
            mixed = first[:, p] * first[:, q] * _product_without(value, [p, q])
            jet_second[p, q] = mixed
            jet_second[q, p] = mixed
    return JetEstimate(
        value=np.prod(value, axis=1),
        first_partials=jet_first,
        second_partials=jet_second,
    )


def sphere_box(n: int, polar: tuple[float, float] = (0.0, math.pi)) -> Box:
    """Parameter box of the angular chart with the polar angle restricted to `polar`."""
    if n == 1:
        return ((0.0, 2.0 * math.pi),)
    return as_box([polar] + [(0.0, math.pi)] * (n - 2) + [(0.0, 2.0 * math.pi)])


def affine_matrix(scales: Sequence[float], center: Sequence[float]) -> np.ndarray:
    """Homogeneous matrix of x -> diag(scales) x + center."""
    scales = np.asarray(scales, dtype=float)
    center = np.asarray(center, dtype=float)
    m = scales.size
    matrix = np.eye(m + 1)
    matrix[:m, :m] = np.diag(scales)
    matrix[:m, m] = center
    return matrix


@dataclass(frozen=True, eq=False)
class ProjectiveSphereMap:
    """u -> P(M (y(u), 1)) / last(M (y(u), 1)) for the angular chart y of S^n."""

    dimension: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=float)
        size = self.dimension + 2
        if matrix.shape != (size, size):
            raise ParameterError(
                f"Projective matrix for S^{self.dimension} must be {size}x{size}, "
                f"got {matrix.shape}"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def _lift(self, y: np.ndarray, u: np.ndarray) -> np.ndarray:
        m = self.dimension + 1
        z = self.matrix[:, :m] @ y + self.matrix[:, m]
        if abs(z[m]) < 1e-14:
            raise EvaluationError(
                f"Projective chart hits infinity at {tuple(u.tolist())}"
            )
        return z

    def position(self, u: np.ndarray) -> np.ndarray:
        point = np.asarray(u, dtype=float)
        jet = unit_sphere_jet(self.dimension, point)
        z = self._lift(jet.value, point)
        return z[:-1] / z[-1]

    def jet(self, u: np.ndarray) -> JetEstimate:
        point = np.asarray(u, dtype=float)
        base = unit_sphere_jet(self.dimension, point)
        linear = self.matrix[:, : self.dimension + 1]
        z = self._lift(base.value, point)
        dz = base.first_partials @ linear.T
        ddz = base.second_partials @ linear.T
        w, dw, ddw = z[-1], dz[:, -1], ddz[:, :, -1]
        x = z[:-1] / w
        dx = (dz[:, :-1] - np.outer(dw, x)) / w
        ddx = (
            ddz[:, :, :-1]
            - dx[:, None, :] * dw[None, :, None]
            - dx[None, :, :] * dw[:, None, None]
            - ddw[:, :, None] * x[None, None, :]
        ) / w
        return JetEstimate(value=x, first_partials=dx, second_partials=ddx)


def outward_sign(jet: JetEstimate, inside: Sequence[float]) -> int:
    """Orientation sign that points the Gauss map away from `inside` at this jet."""
    normal = cofactor_normal(jet.first_partials)
    offset = jet.value - np.asarray(inside, dtype=float)
    return 1 if float(normal @ offset) > 0 else -1


def _box_center(box: Box) -> np.ndarray:
    return np.array([0.5 * (lo + hi) for lo, hi in box])


def projective_sphere_patch(
    n: int,
    matrix: np.ndarray,
    box: Sequence[Sequence[float]],
    inside: Sequence[float],
    name: str,
    outward: bool = True,
    panels: Optional[Sequence[int]] = None,
) -> ParametricPatch:
    """
    Patch of the projective image of S^n, oriented away from (or towards) `inside`.

    Args:
        n (int): Dimension of the sphere.
        matrix (np.ndarray): (n + 2) x (n + 2) projective matrix.
        box (Sequence): Angular parameter box.
        inside (Sequence[float]): A point enclosed by the image.
        name (str): Patch label.
        outward (bool): Orient away from `inside`. Defaults to True.
        panels (Sequence[int], optional): Composite quadrature panels per axis.
    """
    chart = ProjectiveSphereMap(n, matrix)
    box = as_box(box)
    sign = outward_sign(chart.jet(_box_center(box)), inside)
    return ParametricPatch(
        ambient_dim=n + 1,
        param_box=box,
        position=chart.position,
        analytic_jet=chart.jet,
        orientation_sign=sign if outward else -sign,
        name=name,
        panels=None if panels is None else tuple(panels),
    )


def _center(center: Optional[Sequence[float]], n: int) -> np.ndarray:
    if center is None:
        return np.zeros(n + 1)
    point = np.asarray(center, dtype=float)
    if point.shape != (n + 1,):
        raise ParameterError(f"Center must have {n + 1} coordinates, got {point.shape}")
    return point


def _positive(name: str, value: float) -> float:
    if not value > 0 or not math.isfinite(value):
        raise ParameterError(f"{name} must be positive and finite, got {value}")
    return float(value)


def _panel_count(ratio: float, lo: float, hi: float) -> int:
    if ratio >= 1.0:
        return 1
    return max(1, math.ceil((hi - lo) / (2.0 * math.atanh(ratio))))


def ellipsoid_panels(axes: Sequence[float], box: Box) -> tuple[int, ...]:
    """
    Panels per angular axis that keep every panel's half-length below
    atanh(min / max) of the semi-axes the axis mixes, the distance from the
    real line to the nearest complex zero of the area element.

    The azimuth only mixes the first two semi-axes; round axes keep one panel.
    """
    polar_ratio = min(axes) / max(axes)
    azimuth_ratio = min(axes[:2]) / max(axes[:2])
    ratios = [polar_ratio] * (len(box) - 1) + [azimuth_ratio]
    return tuple(
        _panel_count(ratio, lo, hi) for ratio, (lo, hi) in zip(ratios, box)
    )


def ellipsoid(
    axes: Sequence[float],
    center: Optional[Sequence[float]] = None,
    polar: tuple[float, float] = (0.0, math.pi),
    name: str = "ellipsoid",
) -> ParametricPatch:
    """
    Outward-oriented ellipsoid with semi-axes along the coordinate axes.

    The polar angle is measured from the last axis, so `polar=(0, phi)` cuts
    off the cap above height axes[-1] * cos(phi). Eccentric axes get composite
    quadrature panels from `ellipsoid_panels`.
    """
    axes = [_positive("Semi-axis", a) for a in axes]
    n = len(axes) - 1
    if n < 1:
        raise ParameterError("An ellipsoid needs at least two semi-axes")
    origin = _center(center, n)
    box = sphere_box(n, polar)
    return projective_sphere_patch(
        n,
        affine_matrix(axes, origin),
        box,
        origin,
        name,
        panels=ellipsoid_panels(axes, box),
    )


def sphere(
    n: int = 2, R: float = 1.0, center: Optional[Sequence[float]] = None
) -> ParametricPatch:
    return ellipsoid([_positive("Radius", R)] * (n + 1), center, name=f"S^{n}(R={R:g})")


def spherical_cap(
    n: int,
    R: float,
    polar_max: float,
    center: Optional[Sequence[float]] = None,
) -> ParametricPatch:
    """Cap {polar angle <= polar_max} of the round sphere, outward-oriented."""
    if not 0 < polar_max <= math.pi:
        raise ParameterError(f"Polar opening must lie in (0, pi], got {polar_max}")
    return ellipsoid(
        [_positive("Radius", R)] * (n + 1),
        center,
        polar=(0.0, polar_max),
        name=f"cap(R={R:g}, phi<={polar_max:.6g})",
    )


def hemisphere(n: int = 2, R: float = 1.0) -> ParametricPatch:
    """Upper hemisphere over the plane {x_{n+1} = 0}."""
    return spherical_cap(n, R, 0.5 * math.pi)


def spheroid(
    a: float, c: float, n: int = 2, polar_max: float = math.pi
) -> ParametricPatch:
    """Spheroid with equatorial radius `a` and polar radius `c` along the last axis."""
    return ellipsoid(
        [a] * n + [c], polar=(0.0, polar_max), name=f"spheroid(a={a:g}, c={c:g})"
    )


def circle_curve(r: float, center: Optional[Sequence[float]] = None) -> ParametricPatch:
    """Counterclockwise circle in R^2 with outward normal, so k = -1/r."""
    return ellipsoid([r, r], center, name=f"circle(r={r:g})")


def ellipse_curve(
    a: float, b: float, center: Optional[Sequence[float]] = None
) -> ParametricPatch:
    return ellipsoid([a, b], center, name=f"ellipse(a={a:g}, b={b:g})")


@dataclass(frozen=True)
class _TorusMap:
    R: float
    r: float

    def position(self, u: np.ndarray) -> np.ndarray:
        theta, phi = u
        rho = self.R + self.r * math.cos(phi)
        return np.array(
            [rho * math.cos(theta), rho * math.sin(theta), self.r * math.sin(phi)]
        )

    def jet(self, u: np.ndarray) -> JetEstimate:
        theta, phi = (float(x) for x in u)
        ct, st, cp, sp = math.cos(theta), math.sin(theta), math.cos(phi), math.sin(phi)
        rho = self.R + self.r * cp
        r = self.r
        first = np.array(
            [[-rho * st, rho * ct, 0.0], [-r * sp * ct, -r * sp * st, r * cp]]
        )
        mixed = [r * sp * st, -r * sp * ct, 0.0]
        second = np.array(
            [
                [[-rho * ct, -rho * st, 0.0], mixed],
                [mixed, [-r * cp * ct, -r * cp * st, -r * sp]],
            ]
        )
        return JetEstimate(
            value=np.array([rho * ct, rho * st, r * sp]),
            first_partials=first,
            second_partials=second,
        )


def torus(R: float = 2.0, r: float = 1.0) -> ParametricPatch:
    """Outward-oriented torus of revolution about the x_3 axis, R > r > 0."""
    if not _positive("Tube radius", r) < _positive("Core radius", R):
        raise ParameterError(f"Torus needs R > r, got R={R}, r={r}")
    chart = _TorusMap(float(R), float(r))
    box = as_box([(0.0, 2.0 * math.pi), (0.0, 2.0 * math.pi)])
    probe = np.array([0.3, 0.7])
    core = np.array([R * math.cos(0.3), R * math.sin(0.3), 0.0])
    return ParametricPatch(
        ambient_dim=3,
        param_box=box,
        position=chart.position,
        analytic_jet=chart.jet,
        orientation_sign=outward_sign(chart.jet(probe), core),
        name=f"torus(R={R:g}, r={r:g})",
    )


@dataclass(frozen=True)
class _CylinderMap:
    R: float

    def position(self, u: np.ndarray) -> np.ndarray:
        lam, z = u
        return np.array([self.R * math.cos(lam), self.R * math.sin(lam), z])

    def jet(self, u: np.ndarray) -> JetEstimate:
        lam, z = (float(x) for x in u)
        c, s = math.cos(lam), math.sin(lam)
        second = np.zeros((2, 2, 3))
        second[0, 0] = [-self.R * c, -self.R * s, 0.0]
        return JetEstimate(
            value=np.array([self.R * c, self.R * s, z]),
            first_partials=np.array([[-self.R * s, self.R * c, 0.0], [0.0, 0.0, 1.0]]),
            second_partials=second,
        )


def cylinder(R: float = 1.0, height: float = 1.0) -> ParametricPatch:
    """Outward-oriented round cylinder over the x_3 axis, 0 <= x_3 <= height."""
    chart = _CylinderMap(_positive("Radius", R))
    return ParametricPatch(
        ambient_dim=3,
        param_box=as_box([(0.0, 2.0 * math.pi), (0.0, _positive("Height", height))]),
        position=chart.position,
        analytic_jet=chart.jet,
        orientation_sign=1,
        name=f"cylinder(R={R:g})",
    )


@dataclass(frozen=True, eq=False)
class _FlatBallMap:
    """(rho, omega) -> center + rho * (y(omega), 0) with y the chart of S^{n-1}."""

    dimension: int
    center: np.ndarray

    def _pad(self, v: np.ndarray) -> np.ndarray:
        return np.concatenate([v, np.zeros(v.shape[:-1] + (1,))], axis=-1)

    def position(self, u: np.ndarray) -> np.ndarray:
        return self.jet(u).value

    def jet(self, u: np.ndarray) -> JetEstimate:
        point = np.asarray(u, dtype=float)
        n = self.dimension
        rho = point[0]
        base = unit_sphere_jet(n - 1, point[1:])
        first = np.empty((n, n + 1))
        second = np.zeros((n, n, n + 1))
        first[0] = self._pad(base.value)
        first[1:] = self._pad(rho * base.first_partials)
        second[0, 1:] = self._pad(base.first_partials)
        second[1:, 0] = second[0, 1:]
        second[1:, 1:] = self._pad(rho * base.second_partials)
        return JetEstimate(
            value=self.center + self._pad(rho * base.value),
            first_partials=first,
            second_partials=second,
        )


def flat_disk(
    r: float = 1.0,
    n: int = 2,
    normal_sign: int = -1,
    center: Optional[Sequence[float]] = None,
) -> ParametricPatch:
    """
    Round n-ball of radius `r` in the hyperplane {x_{n+1} = center_{n+1}}.

    Args:
        r (float): Radius.
        n (int): Dimension of the ball. Defaults to 2.
        normal_sign (int): The Gauss map is normal_sign * e_{n+1}. Defaults to -1,
            which closes an upper hemisphere outward.
        center (Sequence[float], optional): Center of the ball.
    """
    if n < 2:
        raise ParameterError(f"Flat balls need n >= 2, got {n}")
    if normal_sign not in (1, -1):
        raise ParameterError(f"normal_sign must be +1 or -1, got {normal_sign}")
    chart = _FlatBallMap(n, _center(center, n))
    box = as_box([(0.0, _positive("Radius", r))] + list(sphere_box(n - 1)))
    probe = chart.jet(_box_center(box))
    raw = cofactor_normal(probe.first_partials)[-1]
    return ParametricPatch(
        ambient_dim=n + 1,
        param_box=box,
        position=chart.position,
        analytic_jet=chart.jet,
        orientation_sign=normal_sign if raw > 0 else -normal_sign,
        name=f"disk(r={r:g})",
    )
