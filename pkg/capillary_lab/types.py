from typing import Optional, TypedDict, Union


class SurfaceSpec(TypedDict, total=False):
    """Capillary or closed surface selected by `kind`."""

    kind: str
    R: float
    r: float
    n: int
    theta: Union[float, list[float]]
    theta1: float
    theta2: float
    alpha: float
    tilt: float
    steps: int
    a: float
    c: float
    cut: float


class BodySpec(TypedDict, total=False):
    """Convex body selected by `kind`."""

    kind: str
    side: float
    vertices: list[list[float]]
    a: float
    b: float
    c: float
    r: float
    sides: int
    polygons: int
    polyhedra: int
    pairs: int


class ExperimentConfig(TypedDict, total=False):
    command: str
    surface: SurfaceSpec
    body: BodySpec
    quadrature_order: int
    fd_step: float
    seed: int
    output_path: Optional[str]
    t: float
    t_grid: list[float]
    h: float


class Quantity(TypedDict):
    value: Union[float, int, bool, list[float], None]
    tolerance: Optional[float]


SURFACE_FIELDS = {
    "cap_halfspace": {"R", "theta", "n", "steps"},
    "bridge_wedge": {"R", "alpha", "theta", "theta1", "theta2", "n", "tilt", "steps"},
    "spheroid_cap": {"a", "c", "cut"},
    "sphere": {"R", "n"},
    "torus": {"R", "r"},
}

BODY_FIELDS = {
    "square": {"side"},
    "cube": {"side"},
    "polygon": {"vertices"},
    "polyhedron": {"vertices"},
    "ellipse": {"a", "b"},
    "ellipsoid": {"a", "b", "c"},
    "disk": {"r"},
    "ball": {"r"},
    "regular_polygon": {"sides", "r"},
    "random_suite": {"polygons", "polyhedra", "pairs"},
}

CONFIG_FIELDS = set(ExperimentConfig.__annotations__)
