"""
Parametric immersed hypersurfaces in R^{n+1}.

Sign convention: principal curvatures are the eigenvalues of g^{-1} h with
h_ij = <d_ij X, nu>, so the parallel-area density is prod(1 - k_i t) and a
round sphere of radius R with outward Gauss map has every k_i = -1/R.
"""

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from capillary_lab.config import resolve_order
from capillary_lab.exceptions import (
    ContractViolation,
    DegenerateImmersionError,
    FocalCrossingError,
    ParameterError,
    QuadratureError,
)
from capillary_lab.numkernel import (
    Box,
    Evaluator,
    JetEstimate,
    as_box,
    as_panels,
    fd_jet,
    pairwise_sum,
    sym_eigen,
    tensor_grid,
)

logger = logging.getLogger(__name__)

IMMERSION_TOLERANCE = 1e-12
NORMAL_TOLERANCE = 1e-8

JetEvaluator = Callable[[np.ndarray], JetEstimate]


@dataclass(frozen=True, eq=False)
class ParametricPatch:
    """
    One chart of an immersed hypersurface.

    The Gauss map makes {d_1 X, ..., d_n X, nu} a positively oriented frame,
    multiplied by `orientation_sign`. Patches compare and hash by identity.

    Args:
        ambient_dim (int): n + 1.
        param_box (Box): One (lo, hi) pair per parameter.
        position (Callable): u -> X(u) in R^{n+1}.
        analytic_jet (Callable, optional): u -> JetEstimate. Falls back to `fd_jet`.
        orientation_sign (int): +1 or -1.
        name (str): Label used in reports and error messages.
        extends_past_box (bool): Whether `position` may be evaluated outside the
            box; when False, finite differences near a face are one-sided.
        panels (tuple[int, ...], optional): Composite quadrature panels per
            parameter. Defaults to one panel per axis.
    """

    ambient_dim: int
    param_box: Box
    position: Evaluator
    analytic_jet: Optional[JetEvaluator] = None
    orientation_sign: int = 1
    name: str = "patch"
    extends_past_box: bool = True
    panels: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        box = as_box(self.param_box)
        object.__setattr__(self, "param_box", box)
        object.__setattr__(self, "panels", as_panels(self.panels, box))
        if self.ambient_dim != len(box) + 1:
            raise ParameterError(
                f"Patch {self.name!r}: ambient dimension {self.ambient_dim} does not "
                f"match a {len(box)}-parameter box"
            )
        if self.orientation_sign not in (1, -1):
            raise ParameterError(
                f"orientation_sign must be +1 or -1, got {self.orientation_sign}"
            )

    @property
    def dimension(self) -> int:
        return self.ambient_dim - 1

    def jet(self, u: Sequence[float], step: Optional[float] = None) -> JetEstimate:
        point = np.asarray(u, dtype=float)
        if self.analytic_jet is not None:
            return self.analytic_jet(point)
        box = None if self.extends_past_box else self.param_box
        return fd_jet(self.position, point, step, box=box)

    def flipped(self) -> "ParametricPatch":
        """Same chart with the opposite Gauss map."""
        return replace(self, orientation_sign=-self.orientation_sign)

    def with_panels(self, panels: Sequence[int]) -> "ParametricPatch":
        return replace(self, panels=tuple(panels))


@dataclass(frozen=True)
class CurvatureData:
    point: np.ndarray
    metric: np.ndarray
    second_form: np.ndarray
    gauss: np.ndarray
    principal_curvatures: np.ndarray
    mean_curvature: float
    area_element: float


@dataclass(frozen=True)
class PatchSamples:
    """Nodal data of a patch on its Gauss grid, area element folded into weights."""

    nodes: np.ndarray
    weights: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    curvatures: np.ndarray

    @property
    def mean_curvatures(self) -> np.ndarray:
        return self.curvatures.mean(axis=1)

    def integrate(self, values: np.ndarray) -> Union[float, np.ndarray]:
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            return pairwise_sum(self.weights * values)
        return pairwise_sum(self.weights[:, None] * values)


@dataclass(frozen=True)
class TubePolynomial:
    """Coefficients a_0..a_n of the parallel-area polynomial sum a_l t^l."""

    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.coefficients or self.coefficients[0] <= 0:
            raise ContractViolation(
                f"Tube polynomial needs a positive base area, got {self.coefficients}"
            )

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def as_polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    def __call__(self, t: float) -> float:
        return float(self.as_polynomial()(t))


@dataclass(frozen=True)
class VolumePolynomial:
    """Coefficients v_0..v_{n+1} of the oriented volume of parallel hypersurfaces."""

    coefficients: tuple[float, ...]

    def as_polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    def __call__(self, t: float) -> float:
        return float(self.as_polynomial()(t))

    def derivative_residual(self, tube: TubePolynomial) -> float:
        """max_l |(l + 1) v_{l+1} - a_l|."""
        v = self.coefficients
        return max(
            abs((ell + 1) * v[ell + 1] - a) for ell, a in enumerate(tube.coefficients)
        )


def cofactor_normal(partials: np.ndarray) -> np.ndarray:
    """Unnormalized normal c with det[d_1 X, ..., d_n X, c] = |c|^2 > 0."""
    n, m = partials.shape
    cofactors = np.empty(m)
    for k in range(m):
        basis = np.zeros(m)
        basis[k] = 1.0
        cofactors[k] = np.linalg.det(np.vstack([partials, basis]))
    return cofactors


def _normalized_gram(metric: np.ndarray) -> float:
    lengths = np.diag(metric)
    if float(np.min(lengths)) <= 0.0:
        return 0.0
    return float(np.linalg.det(metric) / np.prod(lengths))


def curvature_from_jet(
    jet: JetEstimate, orientation_sign: int = 1, where: str = ""
) -> CurvatureData:
    partials = jet.first_partials
    metric = partials @ partials.T
    ratio = _normalized_gram(metric)
    if ratio <= IMMERSION_TOLERANCE:
        raise DegenerateImmersionError(
            f"Degenerate immersion{where}: normalized Gram determinant {ratio:g}"
        )
    normal = cofactor_normal(partials)
    gauss = orientation_sign * normal / np.linalg.norm(normal)
    second_form = np.einsum("ijk,k->ij", jet.second_partials, gauss)
    second_form = 0.5 * (second_form + second_form.T)
    chol_inv = np.linalg.inv(np.linalg.cholesky(metric))
    shape = chol_inv @ second_form @ chol_inv.T
    curvatures = sym_eigen(0.5 * (shape + shape.T))
    return CurvatureData(
        point=jet.value,
        metric=metric,
        second_form=second_form,
        gauss=gauss,
        principal_curvatures=curvatures,
        mean_curvature=float(np.mean(curvatures)),
        area_element=float(np.sqrt(np.linalg.det(metric))),
    )


def curvature_at(
    patch: ParametricPatch, u: Sequence[float], step: Optional[float] = None
) -> CurvatureData:
    """
    Fundamental forms, Gauss map and principal curvatures at one parameter point.

    Raises:
        DegenerateImmersionError: If the first partials are nearly dependent.
    """
    point = np.asarray(u, dtype=float)
    where = f" of {patch.name!r} at {tuple(point.tolist())}"
    return curvature_from_jet(patch.jet(point, step), patch.orientation_sign, where)


def gauss_at(
    patch: ParametricPatch, u: Sequence[float], step: Optional[float] = None
) -> np.ndarray:
    jet = patch.jet(u, step)
    normal = cofactor_normal(jet.first_partials)
    return patch.orientation_sign * normal / np.linalg.norm(normal)


@lru_cache(maxsize=128)
def _sample_patch(
    patch: ParametricPatch, order: int, step: Optional[float]
) -> PatchSamples:
    nodes, weights = tensor_grid(patch.param_box, order, patch.panels)
    data = [curvature_at(patch, node, step) for node in nodes]
    samples = PatchSamples(
        nodes=nodes,
        weights=weights * np.array([d.area_element for d in data]),
        points=np.stack([d.point for d in data]),
        normals=np.stack([d.gauss for d in data]),
        curvatures=np.stack([d.principal_curvatures for d in data]),
    )
    logger.debug("Sampled %s on %d nodes", patch.name, len(nodes))
    return samples


def sample_patch(
    patch: ParametricPatch, order: Optional[int] = None, step: Optional[float] = None
) -> PatchSamples:
    """Nodal geometry of `patch`, computed once per (patch, order, step)."""
    return _sample_patch(patch, resolve_order(order), step)


def _as_patches(
    patches: Union[ParametricPatch, Iterable[ParametricPatch]],
) -> list[ParametricPatch]:
    if isinstance(patches, ParametricPatch):
        return [patches]
    found = list(patches)
    if not found:
        raise ParameterError("Expected at least one patch")
    return found


def area(patch: ParametricPatch, order: Optional[int] = None) -> float:
    """n-dimensional area, the integral of sqrt(det g) over the parameter box."""
    return float(pairwise_sum(sample_patch(patch, order).weights))


def oriented_volume(
    patches: Union[ParametricPatch, Iterable[ParametricPatch]],
    order: Optional[int] = None,
) -> float:
    """
    Oriented volume (1 / (n + 1)) * integral of <X, nu> dS, summed over patches.

    For a closed chart set this is the enclosed volume; pieces lying in planes
    through the origin contribute nothing.
    """
    terms = []
    for patch in _as_patches(patches):
        samples = sample_patch(patch, order)
        support = np.einsum("ij,ij->i", samples.points, samples.normals)
        terms.append(samples.integrate(support) / patch.ambient_dim)
    return float(pairwise_sum(terms))


def gauss_map_integral(
    patches: Union[ParametricPatch, Iterable[ParametricPatch]],
    order: Optional[int] = None,
) -> np.ndarray:
    """Componentwise integral of nu; vanishes on closed piecewise-smooth surfaces."""
    terms = [
        sample_patch(patch, order).integrate(sample_patch(patch, order).normals)
        for patch in _as_patches(patches)
    ]
    return np.asarray(pairwise_sum(terms))


def _signed_symmetric(curvatures: np.ndarray) -> np.ndarray:
    # row i holds the coefficients of prod(1 - k t) at node i
    return np.stack([np.poly(k) for k in curvatures])


def curvature_integral(
    patch: ParametricPatch, ell: int, order: Optional[int] = None
) -> float:
    """
    a_l = (-1)^l * integral of the l-th elementary symmetric function of the
    principal curvatures.
    """
    if not 0 <= ell <= patch.dimension:
        raise ParameterError(f"ell must lie in 0..{patch.dimension}, got {ell}")
    samples = sample_patch(patch, order)
    return float(samples.integrate(_signed_symmetric(samples.curvatures)[:, ell]))


def tube_polynomial(
    patch: ParametricPatch, order: Optional[int] = None
) -> TubePolynomial:
    """Parallel-area polynomial: H^n(X + t nu) = sum a_l t^l."""
    samples = sample_patch(patch, order)
    coefficients = samples.integrate(_signed_symmetric(samples.curvatures))
    return TubePolynomial(tuple(float(a) for a in np.atleast_1d(coefficients)))


def volume_polynomial(tube: TubePolynomial, v0: float) -> VolumePolynomial:
    """Oriented volume of parallel hypersurfaces: v_{l+1} = a_l / (l + 1)."""
    return VolumePolynomial(
        (float(v0),)
        + tuple(a / (ell + 1) for ell, a in enumerate(tube.coefficients))
    )


def curvature_difference_integral(
    patch: ParametricPatch, order: Optional[int] = None
) -> float:
    """Integral of sum_{i<j} (k_i - k_j)^2 dS."""
    samples = sample_patch(patch, order)
    n = patch.dimension
    spread = np.zeros(len(samples.nodes))
    for i, j in combinations(range(n), 2):
        spread = spread + (samples.curvatures[:, i] - samples.curvatures[:, j]) ** 2
    return float(samples.integrate(spread))


def umbilic_deficit(patch: ParametricPatch, order: Optional[int] = None) -> float:
    """Largest gap between principal curvatures over the sample nodes."""
    curvatures = sample_patch(patch, order).curvatures
    return float(np.max(curvatures[:, -1] - curvatures[:, 0]))


def _resolved_values(patch: ParametricPatch, order: int) -> np.ndarray:
    samples = sample_patch(patch, order)
    support = np.einsum("ij,ij->i", samples.points, samples.normals)
    volume = samples.integrate(support) / patch.ambient_dim
    tube = samples.integrate(_signed_symmetric(samples.curvatures))
    return np.concatenate([[volume], np.atleast_1d(tube)])


def _relative_change(before: np.ndarray, after: np.ndarray) -> float:
    return float(np.max(np.abs(after - before) / np.maximum(1.0, np.abs(after))))


def refine_panels(
    patch: ParametricPatch,
    order: Optional[int] = None,
    tolerance: float = 1e-10,
    max_panels: int = 64,
) -> tuple[ParametricPatch, float]:
    """
    Split the parameter axes into more quadrature panels until the oriented
    volume and the tube coefficients are resolved.

    An axis is resolved once doubling its panels moves every value by at most
    `tolerance`, relative to max(1, |value|). Unresolved axes are doubled together.

    Returns:
        tuple: (patch with the chosen panels, largest change of the last check).

    Raises:
        QuadratureError: If an axis would need more than `max_panels` panels.
    """
    order = resolve_order(order)
    current = patch
    values = _resolved_values(current, order)
    while True:
        candidates = {}
        changes = []
        for axis in range(current.dimension):
            panels = list(current.panels)
            panels[axis] *= 2
            candidates[axis] = current.with_panels(panels)
            changes.append(
                _relative_change(values, _resolved_values(candidates[axis], order))
            )
        unresolved = [axis for axis, change in enumerate(changes) if change > tolerance]
        if not unresolved:
            if current is not patch:
                logger.debug("Refined %s to panels %s", patch.name, current.panels)
            return current, max(changes)
        panels = list(current.panels)
        for axis in unresolved:
            panels[axis] *= 2
        if max(panels) > max_panels:
            raise QuadratureError(
                f"{patch.name!r} is not resolved at order {order} within "
                f"{max_panels} panels per axis (last change {max(changes):.3g})"
            )
        if len(unresolved) == 1:
            current = candidates[unresolved[0]]
        else:
            current = current.with_panels(panels)
        values = _resolved_values(current, order)


@dataclass(frozen=True)
class _ParallelPosition:
    base: ParametricPatch
    offset: float
    step: Optional[float] = field(default=None)

    def __call__(self, u: np.ndarray) -> np.ndarray:
        jet = self.base.jet(u, self.step)
        normal = cofactor_normal(jet.first_partials)
        gauss = self.base.orientation_sign * normal / np.linalg.norm(normal)
        return jet.value + self.offset * gauss


def parallel_patch(
    patch: ParametricPatch,
    t: float,
    order: Optional[int] = None,
    step: Optional[float] = None,
) -> ParametricPatch:
    """
    The parallel patch X + t nu.

    Raises:
        FocalCrossingError: If 1 - k_i t <= 0 at some sample node.
        ContractViolation: If the offset patch does not share nu with `patch`.
    """
    samples = sample_patch(patch, order, step)
    factors = 1.0 - samples.curvatures * t
    bad = np.nonzero(np.any(factors <= 0.0, axis=1))[0]
    if bad.size:
        listed = [tuple(samples.nodes[i].round(6).tolist()) for i in bad[:5]]
        more = f" and {bad.size - 5} more" if bad.size > 5 else ""
        raise FocalCrossingError(
            f"Offset t={t:g} crosses the focal set of {patch.name!r} at nodes "
            f"{listed}{more}"
        )
    parallel = ParametricPatch(
        ambient_dim=patch.ambient_dim,
        param_box=patch.param_box,
        position=_ParallelPosition(patch, float(t), step),
        orientation_sign=patch.orientation_sign,
        name=f"{patch.name}@{t:g}",
        extends_past_box=patch.extends_past_box,
        panels=patch.panels,
    )
    stride = max(1, len(samples.nodes) // 7)
    for index in range(0, len(samples.nodes), stride):
        got = gauss_at(parallel, samples.nodes[index], step)
        if np.linalg.norm(got - samples.normals[index]) > NORMAL_TOLERANCE:
            raise ContractViolation(
                f"Parallel patch {parallel.name!r} changed the Gauss map at node "
                f"{tuple(samples.nodes[index].tolist())}"
            )
    return parallel
