"""
Convex bodies in R^2 and R^3: hulls, Minkowski sums, quermassintegrals,
Steiner polynomials, mixed volumes and the Minkowski / Alexandrov-Fenchel
inequality suite.
"""

import logging
import math
from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.spatial import ConvexHull, QhullError

from capillary_lab.capillary import unit_ball_volume
from capillary_lab.charts import circle_curve, ellipse_curve, ellipsoid, sphere
from capillary_lab.exceptions import (
    DegeneracyError,
    DimensionMismatchError,
    NonConvexError,
    ParameterError,
)
from capillary_lab.hypersurface import (
    ParametricPatch,
    oriented_volume,
    sample_patch,
    tube_polynomial,
)

logger = logging.getLogger(__name__)

PLANE_TOLERANCE = 1e-10
SLACK_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class ConvexPolytope:
    """
    A full-dimensional convex polytope in R^2 or R^3 given by its extreme points.

    In 3D, `edges` holds (i, j) vertex pairs with `edge_lengths` and the exterior
    dihedral angles `edge_angles` (angle between the outward facet normals).
    `inradius` is the distance from the origin to the nearest facet plane, 0 when
    the origin lies outside.
    """

    dim: int
    vertices: np.ndarray
    facets: tuple[tuple[int, ...], ...]
    volume: float
    boundary_measure: float
    edges: tuple[tuple[int, int], ...] = ()
    edge_lengths: np.ndarray = np.zeros(0)
    edge_angles: np.ndarray = np.zeros(0)
    inradius: float = 0.0

    @property
    def euler_characteristic(self) -> int:
        if self.dim == 2:
            return len(self.vertices) - len(self.facets)
        return len(self.vertices) - len(self.edges) + len(self.facets)

    @property
    def mean_curvature_measure(self) -> float:
        """Sum over edges of length times exterior angle, halved (3D only)."""
        return 0.5 * float(self.edge_lengths @ self.edge_angles)

    def translated(self, offset: Sequence[float]) -> "ConvexPolytope":
        return hull(self.vertices + np.asarray(offset, dtype=float))

    def scaled(self, factor: float) -> "ConvexPolytope":
        if not factor > 0:
            raise ParameterError(f"Scale factor must be positive, got {factor}")
        return hull(self.vertices * factor)


@dataclass(frozen=True, eq=False)
class SmoothConvexBody:
    """A convex body bounded by one outward-oriented closed chart."""

    dim: int
    boundary: ParametricPatch
    name: str = "body"

    def __post_init__(self) -> None:
        if self.boundary.ambient_dim != self.dim:
            raise DimensionMismatchError(
                f"Boundary of {self.name!r} lives in R^{self.boundary.ambient_dim}, "
                f"body in R^{self.dim}"
            )


Body = Union[ConvexPolytope, SmoothConvexBody]


@dataclass(frozen=True)
class QuermassVector:
    """W_0..W_n; W_0 is the volume and n W_1 the boundary measure."""

    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, j: int) -> float:
        return self.values[j]


@dataclass(frozen=True)
class SteinerPolynomial:
    """Volume of the parallel body K + tB, sum C(n, j) W_j t^j."""

    coefficients: tuple[float, ...]

    @classmethod
    def from_quermass(cls, quermass: QuermassVector) -> "SteinerPolynomial":
        n = quermass.dimension
        return cls(tuple(comb(n, j) * w for j, w in enumerate(quermass.values)))

    def as_polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    def __call__(self, t: float) -> float:
        return float(self.as_polynomial()(t))

    def boundary(self) -> Polynomial:
        """Boundary measure of the parallel body, the t-derivative of the volume."""
        return self.as_polynomial().deriv()


@dataclass(frozen=True)
class SteinerCheck:
    polynomial_value: float
    sampled: float
    residual: float
    bound: float


@dataclass(frozen=True)
class InequalitySlacks:
    """
    Slacks of the quermassintegral inequalities; every entry must be >= -1e-9.

    `minkowski` is W_1^2 - W_0 W_2, `fenchel` W_2^2 - W_1 W_3 (3D),
    `mean_curvature` (n W_1)^2 / W_0 - n^2 W_2, and `chain_upper` / `chain_lower`
    the two steps of S^3 / (9 V^2) >= M^2 / S >= 4 pi (3D).
    """

    minkowski: float
    mean_curvature: float
    fenchel: Optional[float] = None
    chain_upper: Optional[float] = None
    chain_lower: Optional[float] = None

    def as_dict(self) -> dict[str, float]:
        return {
            name: value
            for name, value in (
                ("minkowski", self.minkowski),
                ("mean_curvature", self.mean_curvature),
                ("fenchel", self.fenchel),
                ("chain_upper", self.chain_upper),
                ("chain_lower", self.chain_lower),
            )
            if value is not None
        }

    @property
    def smallest(self) -> float:
        return min(self.as_dict().values())

    @property
    def holds(self) -> bool:
        return self.smallest >= -SLACK_TOLERANCE


@dataclass(frozen=True)
class QuotientScan:
    t: tuple[float, ...]
    quotients: tuple[float, ...]

    @property
    def nonincreasing(self) -> bool:
        return all(
            later <= earlier * (1 + 1e-12)
            for earlier, later in zip(self.quotients, self.quotients[1:])
        )


@dataclass(frozen=True)
class RandomSuiteResult:
    seed: int
    polygons: int
    polyhedra: int
    pairs: int
    polygon_slack: float
    polyhedron_slack: float
    pair_slack: float

    @property
    def holds(self) -> bool:
        return (
            min(self.polygon_slack, self.polyhedron_slack, self.pair_slack)
            >= -SLACK_TOLERANCE
        )


def _as_points(points: Union[Sequence[Sequence[float]], np.ndarray]) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    if array.ndim != 2 or array.shape[1] not in (2, 3):
        raise ParameterError(
            f"Expected an (k, 2) or (k, 3) point array, got {array.shape}"
        )
    if not np.all(np.isfinite(array)):
        raise ParameterError("Point coordinates must be finite")
    return array


def _qhull(points: np.ndarray) -> ConvexHull:
    dim = points.shape[1]
    if len(points) < dim + 1:
        raise DegeneracyError(
            f"{len(points)} points cannot span a {dim}-dimensional body"
        )
    try:
        return ConvexHull(points)
    except QhullError as error:
        raise DegeneracyError(f"Points do not span R^{dim}: {error}".splitlines()[0])


def _coplanar_labels(qhull: ConvexHull) -> np.ndarray:
    parent = list(range(len(qhull.simplices)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for t, neighbors in enumerate(qhull.neighbors):
        for other in neighbors:
            if np.allclose(
                qhull.equations[t], qhull.equations[other], atol=PLANE_TOLERANCE
            ):
                parent[find(t)] = find(other)
    roots = [find(t) for t in range(len(parent))]
    relabel = {root: k for k, root in enumerate(dict.fromkeys(roots))}
    return np.array([relabel[root] for root in roots])


def hull(
    points: Union[Sequence[Sequence[float]], np.ndarray], dim: Optional[int] = None
) -> ConvexPolytope:
    """
    Convex hull of a point set; interior and non-extreme boundary points are dropped.

    Raises:
        DegeneracyError: If the points lie in a lower-dimensional flat.
    """
    array = _as_points(points)
    if dim is not None and array.shape[1] != dim:
        raise DimensionMismatchError(
            f"Expected {dim}-dimensional points, got {array.shape[1]}"
        )
    qhull = _qhull(array)
    local = {int(v): k for k, v in enumerate(qhull.vertices)}
    vertices = array[qhull.vertices]
    vertices.setflags(write=False)
    offsets = qhull.equations[:, -1]
    inradius = float(np.min(-offsets)) if np.all(offsets < 0) else 0.0

    if array.shape[1] == 2:
        k = len(vertices)
        return ConvexPolytope(
            dim=2,
            vertices=vertices,
            facets=tuple((i, (i + 1) % k) for i in range(k)),
            volume=float(qhull.volume),
            boundary_measure=float(qhull.area),
            inradius=inradius,
        )

    labels = _coplanar_labels(qhull)
    facet_sets: dict[int, set[int]] = {}
    for t, simplex in enumerate(qhull.simplices):
        facet = facet_sets.setdefault(int(labels[t]), set())
        facet.update(local[int(v)] for v in simplex)
    edges, lengths, angles = [], [], []
    for t, simplex in enumerate(qhull.simplices):
        for k, other in enumerate(qhull.neighbors[t]):
            if other < t or labels[other] == labels[t]:
                continue
            a, b = (int(v) for j, v in enumerate(simplex) if j != k)
            n1 = qhull.equations[t, :3]
            n2 = qhull.equations[other, :3]
            edges.append((local[a], local[b]))
            lengths.append(float(np.linalg.norm(array[a] - array[b])))
            angles.append(
                math.atan2(float(np.linalg.norm(np.cross(n1, n2))), float(n1 @ n2))
            )
    polytope = ConvexPolytope(
        dim=3,
        vertices=vertices,
        facets=tuple(tuple(sorted(facet_sets[k])) for k in sorted(facet_sets)),
        volume=float(qhull.volume),
        boundary_measure=float(qhull.area),
        edges=tuple(edges),
        edge_lengths=np.array(lengths),
        edge_angles=np.array(angles),
        inradius=inradius,
    )
    logger.debug(
        "Polytope with %d vertices, %d edges, %d facets",
        len(vertices),
        len(edges),
        len(polytope.facets),
    )
    return polytope


def polytope(vertices: Union[Sequence[Sequence[float]], np.ndarray]) -> ConvexPolytope:
    """
    Strict constructor: every given vertex must be an extreme point.

    Raises:
        NonConvexError: If some vertex is not extreme.
    """
    array = np.unique(_as_points(vertices), axis=0)
    body = hull(array)
    if len(body.vertices) != len(array):
        extreme = {tuple(v) for v in body.vertices.tolist()}
        inner = [p for p in array.tolist() if tuple(p) not in extreme]
        raise NonConvexError(f"Vertices {inner} are not extreme points of their hull")
    return body


def square(side: float = 1.0) -> ConvexPolytope:
    return polytope(side * np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))


def cube(side: float = 1.0) -> ConvexPolytope:
    corners = [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    return polytope(side * np.array(corners, dtype=float))


def regular_polygon(
    sides: int, radius: float = 1.0, phase: float = 0.0
) -> ConvexPolytope:
    if sides < 3:
        raise ParameterError(f"A polygon needs at least 3 sides, got {sides}")
    angles = phase + 2 * math.pi * np.arange(sides) / sides
    return polytope(radius * np.column_stack([np.cos(angles), np.sin(angles)]))


def icosphere(subdivisions: int = 3, radius: float = 1.0) -> ConvexPolytope:
    """Subdivided icosahedron inscribed in the sphere of `radius` (20 * 4^k facets)."""
    g = (1 + math.sqrt(5)) / 2
    points = [
        (-1, g, 0), (1, g, 0), (-1, -g, 0), (1, -g, 0),
        (0, -1, g), (0, 1, g), (0, -1, -g), (0, 1, -g),
        (g, 0, -1), (g, 0, 1), (-g, 0, -1), (-g, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    vertices = [np.array(p, dtype=float) / np.linalg.norm(p) for p in points]
    for _ in range(subdivisions):
        midpoints: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in midpoints:
                m = vertices[i] + vertices[j]
                vertices.append(m / np.linalg.norm(m))
                midpoints[key] = len(vertices) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined
    return hull(radius * np.array(vertices))


def unit_ball_polytope(dim: int, fine: bool = True) -> ConvexPolytope:
    """Inscribed unit-ball approximant: a 1024-gon or an icosphere (>= 1280 facets)."""
    if dim == 2:
        return regular_polygon(1024 if fine else 256)
    if dim == 3:
        return icosphere(4 if fine else 3)
    raise ParameterError(f"Ball approximants exist for dim 2 and 3, got {dim}")


def ellipse(a: float, b: float) -> SmoothConvexBody:
    return SmoothConvexBody(2, ellipse_curve(a, b), name=f"ellipse(a={a:g}, b={b:g})")


def disk(r: float = 1.0) -> SmoothConvexBody:
    return SmoothConvexBody(2, circle_curve(r), name=f"disk(r={r:g})")


def smooth_ellipsoid(a: float, b: float, c: float) -> SmoothConvexBody:
    return SmoothConvexBody(
        3, ellipsoid([a, b, c]), name=f"ellipsoid(a={a:g}, b={b:g}, c={c:g})"
    )


def ball(r: float = 1.0) -> SmoothConvexBody:
    return SmoothConvexBody(3, sphere(2, r), name=f"ball(r={r:g})")


def _support_points(body: Union[ConvexPolytope, np.ndarray]) -> np.ndarray:
    if isinstance(body, ConvexPolytope):
        return np.asarray(body.vertices)
    return _as_points(np.atleast_2d(body))


def minkowski_sum(
    P: Union[ConvexPolytope, np.ndarray], Q: Union[ConvexPolytope, np.ndarray]
) -> ConvexPolytope:
    """
    Hull of all pairwise vertex sums. Either summand may be a bare point set,
    such as a single point.
    """
    a, b = _support_points(P), _support_points(Q)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(
            f"Cannot add a {a.shape[1]}-dimensional and a {b.shape[1]}-dimensional body"
        )
    return hull((a[:, None, :] + b[None, :, :]).reshape(-1, a.shape[1]))


def _check_convex_boundary(body: SmoothConvexBody, order: Optional[int]) -> None:
    curvatures = sample_patch(body.boundary, order).curvatures
    if np.any(curvatures > 1e-9):
        raise NonConvexError(f"Boundary of {body.name!r} is not convex")


def quermass(body: Body, order: Optional[int] = None) -> QuermassVector:
    """
    Quermassintegrals W_0..W_n.

    Polytopes use exact face data: (area, perimeter / 2, pi) in 2D and
    (volume, surface / 3, M / 3, 4 pi / 3) in 3D. Smooth bodies integrate over
    their boundary: W_1 = a_0 / n and W_2 = a_1 / (n (n - 1)).
    """
    if isinstance(body, ConvexPolytope):
        if body.dim == 2:
            return QuermassVector((body.volume, body.boundary_measure / 2, math.pi))
        return QuermassVector(
            (
                body.volume,
                body.boundary_measure / 3,
                body.mean_curvature_measure / 3,
                unit_ball_volume(3),
            )
        )
    _check_convex_boundary(body, order)
    n = body.dim
    a = tube_polynomial(body.boundary, order).coefficients
    values = [oriented_volume(body.boundary, order), a[0] / n]
    if n == 3:
        values.append(a[1] / (n * (n - 1)))
    values.append(unit_ball_volume(n))
    return QuermassVector(tuple(values))


def steiner(body: Body, order: Optional[int] = None) -> SteinerPolynomial:
    return SteinerPolynomial.from_quermass(quermass(body, order))


def steiner_check(
    P: ConvexPolytope, t: float, approximant: Optional[ConvexPolytope] = None
) -> SteinerCheck:
    """
    Compare the Steiner polynomial with the volume of P + t B_approx.

    B_approx is inscribed in the unit ball and contains the ball of radius r_in,
    so the residual is at most poly(t) - poly(r_in t).
    """
    if t < 0:
        raise ParameterError(f"Parallel distance must be nonnegative, got {t}")
    polynomial = steiner(P)
    value = polynomial(t)
    if t == 0:
        return SteinerCheck(value, P.volume, abs(value - P.volume), 0.0)
    if approximant is None:
        approximant = unit_ball_polytope(P.dim)
    sampled = minkowski_sum(P, approximant.scaled(t)).volume
    return SteinerCheck(
        polynomial_value=value,
        sampled=sampled,
        residual=abs(value - sampled),
        bound=value - polynomial(approximant.inradius * t),
    )


def mixed_volume_2d(K: ConvexPolytope, L: ConvexPolytope) -> float:
    """V(K, L) = (A(K + L) - A(K) - A(L)) / 2."""
    if K.dim != 2 or L.dim != 2:
        raise DimensionMismatchError("mixed_volume_2d needs two planar bodies")
    return 0.5 * (minkowski_sum(K, L).volume - K.volume - L.volume)


def mixed_volumes_3d(K: ConvexPolytope, L: ConvexPolytope) -> tuple[float, float]:
    """
    (V(K, K, L), V(K, L, L)) from Vol(K + tL) at t = 1 and t = 2, using
    Vol(K + tL) = V(K) + 3 V(K,K,L) t + 3 V(K,L,L) t^2 + V(L) t^3.
    """
    if K.dim != 3 or L.dim != 3:
        raise DimensionMismatchError("mixed_volumes_3d needs two bodies in R^3")
    r1 = minkowski_sum(K, L).volume - K.volume - L.volume
    r2 = minkowski_sum(K, L.scaled(2.0)).volume - K.volume - 8.0 * L.volume
    kll = (r2 - 2.0 * r1) / 6.0
    kkl = r1 / 3.0 - kll
    return kkl, kll


def af_pair_slack(K: ConvexPolytope, L: ConvexPolytope) -> float:
    """V(K,L)^2 - A(K) A(L) in 2D; V(K,K,L)^2 - V(K) V(K,L,L) in 3D."""
    if K.dim != L.dim:
        raise DimensionMismatchError(f"Bodies of dimension {K.dim} and {L.dim}")
    if K.dim == 2:
        return mixed_volume_2d(K, L) ** 2 - K.volume * L.volume
    kkl, kll = mixed_volumes_3d(K, L)
    return kkl**2 - K.volume * kll


def inequality_suite(
    D: Union[Body, Sequence[Sequence[float]], np.ndarray], order: Optional[int] = None
) -> InequalitySlacks:
    """
    Slacks of the Minkowski and Alexandrov-Fenchel inequalities for a convex body.

    Raw vertex arrays go through the strict `polytope` constructor.

    Raises:
        NonConvexError: If a vertex is not extreme or a smooth boundary bends inward.
    """
    body = D if isinstance(D, (ConvexPolytope, SmoothConvexBody)) else polytope(D)
    W = quermass(body, order)
    n = W.dimension
    slacks = {
        "minkowski": W[1] ** 2 - W[0] * W[2],
        "mean_curvature": (n * W[1]) ** 2 / W[0] - n * n * W[2],
    }
    if n == 3:
        volume, surface, mean = W[0], 3 * W[1], 3 * W[2]
        slacks["fenchel"] = W[2] ** 2 - W[1] * W[3]
        slacks["chain_upper"] = surface**3 / (9 * volume**2) - mean**2 / surface
        slacks["chain_lower"] = mean**2 / surface - 4 * math.pi
    return InequalitySlacks(**slacks)


def _steiner_pair(body: Body, order: Optional[int]) -> tuple[Polynomial, Polynomial]:
    volume = steiner(body, order).as_polynomial()
    return volume, volume.deriv()


def parallel_quotient_scan(
    body: Body, t_grid: Sequence[float], order: Optional[int] = None
) -> QuotientScan:
    """Isoperimetric quotients S(t)^n / V(t)^{n-1} of the parallel bodies."""
    grid = [float(t) for t in t_grid]
    if any(t < 0 for t in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ParameterError("t_grid must be increasing and nonnegative")
    volume, surface = _steiner_pair(body, order)
    n = len(volume.coef) - 1
    quotients = tuple(float(surface(t) ** n / volume(t) ** (n - 1)) for t in grid)
    return QuotientScan(t=tuple(grid), quotients=quotients)


def quotient_derivative(
    body: Body, t: float = 0.0, order: Optional[int] = None
) -> float:
    """d/dt of S(t)^n / V(t)^{n-1} from the Steiner polynomials."""
    volume, surface = _steiner_pair(body, order)
    n = len(volume.coef) - 1
    S, V = surface(t), volume(t)
    quotient = S**n / V ** (n - 1)
    return float(quotient * (n * surface.deriv()(t) / S - (n - 1) * S / V))


def random_polygon(
    rng: np.random.Generator, size: Optional[int] = None
) -> ConvexPolytope:
    count = int(rng.integers(10, 51)) if size is None else size
    return hull(rng.uniform(-1.0, 1.0, size=(count, 2)))


def random_polyhedron(
    rng: np.random.Generator, size: Optional[int] = None
) -> ConvexPolytope:
    count = int(rng.integers(10, 51)) if size is None else size
    return hull(rng.uniform(-1.0, 1.0, size=(count, 3)))


def random_suite(
    seed: int, polygons: int = 100, polyhedra: int = 20, pairs: int = 100
) -> RandomSuiteResult:
    """Smallest inequality slack over random convex polygons, polyhedra and pairs."""
    rng = np.random.default_rng(seed)
    polygon_slack = min(
        (inequality_suite(random_polygon(rng)).smallest for _ in range(polygons)),
        default=math.inf,
    )
    polyhedron_slack = min(
        (inequality_suite(random_polyhedron(rng)).smallest for _ in range(polyhedra)),
        default=math.inf,
    )
    pair_slack = min(
        (
            af_pair_slack(random_polygon(rng), random_polygon(rng))
            for _ in range(pairs)
        ),
        default=math.inf,
    )
    return RandomSuiteResult(
        seed=seed,
        polygons=polygons,
        polyhedra=polyhedra,
        pairs=pairs,
        polygon_slack=polygon_slack,
        polyhedron_slack=polyhedron_slack,
        pair_slack=pair_slack,
    )
