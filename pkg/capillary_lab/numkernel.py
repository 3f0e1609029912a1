import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from capillary_lab.config import resolve_order, resolve_step
from capillary_lab.exceptions import (
    ContractViolation,
    EvaluationError,
    ParameterError,
)

logger = logging.getLogger(__name__)

Box = tuple[tuple[float, float], ...]
Evaluator = Callable[[np.ndarray], Union[float, np.ndarray]]

SYMMETRY_TOLERANCE = 1e-10

# (offset, coefficient) pairs; mode 0 is central, +1 forward, -1 backward
_FIRST_STENCILS = {
    0: ((-1, -0.5), (1, 0.5)),
    1: ((0, -1.5), (1, 2.0), (2, -0.5)),
    -1: ((0, 1.5), (-1, -2.0), (-2, 0.5)),
}
_SECOND_STENCILS = {
    0: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    1: ((0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)),
    -1: ((0, 2.0), (-1, -5.0), (-2, 4.0), (-3, -1.0)),
}


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    order: int
    nodes: tuple[float, ...]
    weights: tuple[float, ...]


@dataclass(frozen=True)
class JetEstimate:
    """
    Value, first and second partials of a vector-valued map at one parameter point.

    `step` is None for analytic jets. `second_partials[i, j]` and
    `second_partials[j, i]` hold identical values.
    """

    value: np.ndarray
    first_partials: np.ndarray
    second_partials: np.ndarray
    step: Optional[float] = None
    one_sided: bool = False

    @property
    def dimension(self) -> int:
        return int(self.first_partials.shape[0])


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule with `order` nodes (exact through degree 2*order - 1)."""
    if order < 1:
        raise ParameterError(f"Quadrature order must be positive, got {order}")
    nodes, weights = leggauss(order)
    return QuadratureRule(
        order=order,
        nodes=tuple(float(x) for x in nodes),
        weights=tuple(float(w) for w in weights),
    )


def as_box(box: Sequence[Sequence[float]]) -> Box:
    """Normalize a box to (lo, hi) float pairs, rejecting degenerate sides."""
    sides = []
    for side in box:
        lo, hi = (float(x) for x in side)
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise ParameterError(f"Degenerate box side ({lo}, {hi})")
        sides.append((lo, hi))
    if not sides:
        raise ParameterError("Box must have at least one side")
    return tuple(sides)


def as_panels(panels: Optional[Sequence[int]], box: Box) -> tuple[int, ...]:
    """Panel counts per axis of a composite rule, one panel per axis by default."""
    if panels is None:
        return (1,) * len(box)
    counts = tuple(int(p) for p in panels)
    if len(counts) != len(box):
        raise ParameterError(
            f"Expected {len(box)} panel counts, got {len(counts)}: {counts}"
        )
    if any(p < 1 for p in counts):
        raise ParameterError(f"Panel counts must be positive, got {counts}")
    return counts


@lru_cache(maxsize=256)
def _tensor_grid(
    box: Box, order: int, panels: tuple[int, ...]
) -> tuple[np.ndarray, np.ndarray]:
    rule = gauss_legendre(order)
    x = np.asarray(rule.nodes)
    w = np.asarray(rule.weights)
    axis_nodes = []
    axis_weights = []
    for (lo, hi), count in zip(box, panels):
        edges = np.linspace(lo, hi, count + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        axis_nodes.append((mid[:, None] + half[:, None] * x).ravel())
        axis_weights.append((half[:, None] * w).ravel())
    node_mesh = np.meshgrid(*axis_nodes, indexing="ij")
    weight_mesh = np.meshgrid(*axis_weights, indexing="ij")
    nodes = np.stack([m.ravel() for m in node_mesh], axis=-1)
    weights = np.prod(np.stack([m.ravel() for m in weight_mesh], axis=-1), axis=-1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def tensor_grid(
    box: Sequence[Sequence[float]],
    order: Optional[int] = None,
    panels: Optional[Sequence[int]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Tensor-product Gauss-Legendre nodes over a box.

    With `panels`, axis k is cut into panels[k] equal pieces carrying `order`
    nodes each.

    Returns:
        tuple: nodes of shape (prod(order * panels), n) and the matching weights.
    """
    sides = as_box(box)
    return _tensor_grid(sides, resolve_order(order), as_panels(panels, sides))


def pairwise_sum(
    values: Union[Sequence[float], np.ndarray],
) -> Union[float, np.ndarray]:
    """
    Sum along the first axis with a fixed halving tree, so the result does not
    depend on how the terms were produced.
    """
    terms = np.array(values, dtype=float)
    if terms.shape[0] == 0:
        total = np.zeros(terms.shape[1:])
        return float(total) if total.ndim == 0 else total
    while terms.shape[0] > 1:
        if terms.shape[0] % 2:
            terms = np.concatenate([terms, np.zeros((1,) + terms.shape[1:])])
        terms = terms[0::2] + terms[1::2]
    total = terms[0]
    return float(total) if total.ndim == 0 else total


def evaluate(f: Evaluator, u: np.ndarray) -> np.ndarray:
    """Call `f` at `u`, refusing non-finite output."""
    value = np.asarray(f(u), dtype=float)
    if not np.all(np.isfinite(value)):
        raise EvaluationError(
            f"Evaluation failed at node {tuple(float(x) for x in u)}: {value}"
        )
    return value


def integrate_box(
    f: Evaluator,
    box: Sequence[Sequence[float]],
    order: Optional[int] = None,
    panels: Optional[Sequence[int]] = None,
) -> Union[float, np.ndarray]:
    """
    Tensor-product Gauss-Legendre estimate of the integral of `f` over `box`.

    Args:
        f (Callable): Scalar- or vector-valued function of a parameter point.
        box (Sequence): One (lo, hi) pair per parameter.
        order (int, optional): Nodes per axis. Defaults to the configured order.
        panels (Sequence[int], optional): Composite panels per axis.

    Returns:
        float | np.ndarray: The integral, shaped like the values of `f`.
    """
    nodes, weights = tensor_grid(box, order, panels)
    values = np.stack([evaluate(f, node) for node in nodes])
    shape = values.shape[1:]
    flat = values.reshape(len(nodes), -1) * weights[:, None]
    total = np.asarray(pairwise_sum(flat)).reshape(shape)
    return float(total) if total.ndim == 0 else total


def integrate_box_estimate(
    f: Evaluator,
    box: Sequence[Sequence[float]],
    order: Optional[int] = None,
    panels: Optional[Sequence[int]] = None,
) -> tuple[Union[float, np.ndarray], float]:
    """
    Integral plus an error estimate from the rule with half as many nodes.

    Returns:
        tuple: (value, |Q(order) - Q(ceil(order / 2))|, max over components).
    """
    order = resolve_order(order)
    fine = integrate_box(f, box, order, panels)
    coarse = integrate_box(f, box, max(2, (order + 1) // 2), panels)
    error = float(np.max(np.abs(np.asarray(fine) - np.asarray(coarse))))
    return fine, error


def _shifted(u: np.ndarray, shifts: Sequence[tuple[int, float]]) -> np.ndarray:
    v = u.copy()
    for axis, delta in shifts:
        v[axis] += delta
    return v


def _first(f: Evaluator, u: np.ndarray, axis: int, h: float, mode: int) -> np.ndarray:
    terms = [
        coef * evaluate(f, _shifted(u, [(axis, k * h)]))
        for k, coef in _FIRST_STENCILS[mode]
    ]
    return np.asarray(pairwise_sum(terms)) / h


def _second(f: Evaluator, u: np.ndarray, axis: int, h: float, mode: int) -> np.ndarray:
    terms = [
        coef * evaluate(f, _shifted(u, [(axis, k * h)]))
        for k, coef in _SECOND_STENCILS[mode]
    ]
    return np.asarray(pairwise_sum(terms)) / (h * h)


def _mixed(
    f: Evaluator, u: np.ndarray, i: int, j: int, h: float, modes: Sequence[int]
) -> np.ndarray:
    terms = [
        ci * cj * evaluate(f, _shifted(u, [(i, ki * h), (j, kj * h)]))
        for ki, ci in _FIRST_STENCILS[modes[i]]
        for kj, cj in _FIRST_STENCILS[modes[j]]
    ]
    return np.asarray(pairwise_sum(terms)) / (h * h)


def fd_jet(
    X: Evaluator,
    u: Sequence[float],
    h: Optional[float] = None,
    box: Optional[Sequence[Sequence[float]]] = None,
) -> JetEstimate:
    """
    Finite-difference jet of `X` at `u`.

    Central second-order stencils at steps h and h/2 are combined by one
    Richardson level. With a `box`, coordinates closer than 2h to a face use
    one-sided second-order stencils and the jet is flagged.

    Args:
        X (Callable): Map from parameter points to R^m.
        u (Sequence[float]): Parameter point.
        h (float, optional): Base step. Defaults to 1e-3.
        box (Sequence, optional): Parameter box restricting the stencils.

    Returns:
        JetEstimate: Value with first and second partials.
    """
    step = resolve_step(h)
    if not step > 0 or not math.isfinite(step):
        raise ParameterError(f"Finite-difference step must be positive, got {h}")
    point = np.asarray(u, dtype=float).ravel().copy()
    n = point.size
    modes = [0] * n
    if box is not None:
        for axis, (lo, hi) in enumerate(as_box(box)):
            if point[axis] - lo < 2 * step:
                modes[axis] = 1
            elif hi - point[axis] < 2 * step:
                modes[axis] = -1
    one_sided = any(modes)
    if one_sided:
        logger.warning(
            "One-sided stencils at %s (step %g)", tuple(point.tolist()), step
        )

    value = evaluate(X, point)

    def estimate(s: float) -> tuple[np.ndarray, np.ndarray]:
        first = np.stack([_first(X, point, i, s, modes[i]) for i in range(n)])
        second = np.empty((n, n) + value.shape)
        for i in range(n):
            second[i, i] = _second(X, point, i, s, modes[i])
            for j in range(i):
                mixed = _mixed(X, point, i, j, s, modes)
                second[i, j] = mixed
                second[j, i] = mixed
        return first, second

    first_h, second_h = estimate(step)
    first_half, second_half = estimate(0.5 * step)
    return JetEstimate(
        value=value,
        first_partials=(4.0 * first_half - first_h) / 3.0,
        second_partials=(4.0 * second_half - second_h) / 3.0,
        step=step,
        one_sided=one_sided,
    )


def sym_eigen(M: Union[Sequence[Sequence[float]], np.ndarray]) -> np.ndarray:
    """
    Ascending eigenvalues of a small symmetric matrix.

    Closed form for n <= 2, LAPACK (`eigvalsh`) for n = 3.
    """
    matrix = np.asarray(M, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractViolation(f"Expected a square matrix, got shape {matrix.shape}")
    n = matrix.shape[0]
    if n not in (1, 2, 3):
        raise ContractViolation(f"Eigenproblems are limited to n <= 3, got n={n}")
    asymmetry = float(np.max(np.abs(matrix - matrix.T)))
    if asymmetry > SYMMETRY_TOLERANCE:
        raise ContractViolation(
            f"Matrix is not symmetric (max |M - M^T| = {asymmetry:g})"
        )
    if n == 1:
        return np.array([matrix[0, 0]])
    if n == 2:
        a, d = matrix[0, 0], matrix[1, 1]
        b = 0.5 * (matrix[0, 1] + matrix[1, 0])
        mean = 0.5 * (a + d)
        radius = math.hypot(0.5 * (a - d), b)
        return np.array([mean - radius, mean + radius])
    return np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
