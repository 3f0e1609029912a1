"""
The volume-preserving variation family of a capillary surface and its
second-variation stability indicator.

For t near 0 the surface is pushed along its normal, translated back onto
the walls, and rescaled by s(t) = (v_0 / V(t))^{1/(n+1)} to keep the
enclosed volume fixed. Its energy E(t) = s(t)^n (sum a_l t^l -
sum cos(theta_i) |D_i(t sin(theta_i))|) is expanded to second order.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from capillary_lab.capillary import (
    CapillarySurface,
    contact_angle,
    require_cmc,
)
from capillary_lab.config import Settings, resolve_settings
from capillary_lab.exceptions import (
    DegenerateVariationError,
    FocalCrossingError,
    GeometryError,
    IncompleteInputError,
)
from capillary_lab.hypersurface import (
    curvature_difference_integral,
    sample_patch,
    tube_polynomial,
    umbilic_deficit,
)
from capillary_lab.verdict import Verdict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnergyCoefficients:
    """Leading coefficients of the unscaled energy E(t) = e0 + e1 t + e2 t^2 + ..."""

    e0: float
    e1: float
    e2: float

    def critical_volume(self, n: int) -> float:
        """The volume n e0^2 / ((n + 1) e1) at which E'(0) vanishes."""
        return n * self.e0**2 / ((n + 1) * self.e1)


@dataclass(frozen=True)
class VariationState:
    t: float
    raw_energy: float
    raw_volume: float
    scale: float
    scaled_energy: float


@dataclass(frozen=True)
class EnergyExpansion:
    """Scaled energy E(0), E'(0), E''(0) from the binomial series of s(t)^n."""

    value: float
    first: float
    second: float


@dataclass(frozen=True)
class HypothesisChecks:
    obtuse_angles: bool
    boundary_embedded: bool
    domains_convex: bool
    dimension: int

    @property
    def satisfied(self) -> bool:
        if not self.obtuse_angles:
            return False
        if self.dimension == 2:
            return self.boundary_embedded
        return self.domains_convex


@dataclass(frozen=True)
class StabilityReport:
    """
    Outcome of the stability test for one capillary surface.

    `indicator` is n e0 E''(0); on CMC surfaces it equals
    `first_factor * second_factor`.
    """

    indicator: float
    first_factor: float
    second_factor: float
    umbilic_deficit: float
    hypotheses: HypothesisChecks
    verdict: Verdict
    coefficients: EnergyCoefficients
    second_variation: float
    notes: tuple[str, ...] = field(default=())

    @property
    def factored(self) -> float:
        return self.first_factor * self.second_factor


def _wall_terms(surface: CapillarySurface) -> list[tuple[float, float]]:
    return [(math.cos(theta), math.sin(theta)) for theta in surface.contact_angles]


def _require_boundary_data(surface: CapillarySurface) -> None:
    for domain in surface.wetted:
        if len(domain.boundary_coefficients) < 2:
            raise IncompleteInputError(
                f"Wetted domain {domain.plane_index} of {surface.name!r} lacks "
                "boundary mean-curvature data"
            )


def energy_coefficients(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> EnergyCoefficients:
    """
    e0 = a0 - sum cos H^n(D_i), e1 = a1 - sum cos sin H^{n-1}(C_i) and
    e2 = a2 + (1/2) sum cos sin^2 (integral of (n - 1) H over C_i).

    Raises:
        IncompleteInputError: If boundary mean-curvature data is missing.
    """
    settings = resolve_settings(settings)
    _require_boundary_data(surface)
    a = tube_polynomial(surface.patch, settings.quadrature_order).coefficients
    a = tuple(a) + (0.0,) * (3 - len(a))
    e0, e1, e2 = a[0], a[1], a[2]
    for (c, s), domain in zip(_wall_terms(surface), surface.wetted):
        e0 -= c * domain.area
        e1 -= c * s * domain.boundary_area
        e2 += 0.5 * c * s * s * domain.boundary_mean_curv_integral
    return EnergyCoefficients(e0=e0, e1=e1, e2=e2)


def raw_energy_polynomial(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> Polynomial:
    """Unscaled energy of the translated parallel surfaces as a polynomial in t."""
    settings = resolve_settings(settings)
    energy = tube_polynomial(surface.patch, settings.quadrature_order).as_polynomial()
    for (c, s), domain in zip(_wall_terms(surface), surface.wetted):
        wetted = Polynomial(
            [domain.area]
            + [
                b * s ** (ell + 1) / (ell + 1)
                for ell, b in enumerate(domain.boundary_coefficients)
            ]
        )
        energy = energy - c * wetted
    return energy


def raw_volume_polynomial(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> Polynomial:
    """v0 plus the antiderivative of the raw energy."""
    return raw_energy_polynomial(surface, settings).integ(k=surface.enclosed_volume)


def _check_focal_window(surface: CapillarySurface, t: float, order: int) -> None:
    curvatures = sample_patch(surface.patch, order).curvatures
    if np.any(1.0 - curvatures * t <= 0.0):
        raise FocalCrossingError(
            f"t={t:g} leaves the focal window of {surface.name!r}"
        )
    for domain, (_, s) in zip(surface.wetted, _wall_terms(surface)):
        if domain.parallel_area(t * s) <= 0.0:
            raise FocalCrossingError(
                f"t={t:g} collapses wetted domain {domain.plane_index}"
            )


def variation_energy(
    surface: CapillarySurface, t: float, settings: Optional[Settings] = None
) -> VariationState:
    """
    Raw and volume-normalized energy of the variation at parameter t.

    Raises:
        FocalCrossingError: If t leaves the focal window.
        DegenerateVariationError: If the raw volume is not positive.
    """
    settings = resolve_settings(settings)
    _check_focal_window(surface, t, settings.quadrature_order)
    energy = float(raw_energy_polynomial(surface, settings)(t))
    volume = float(raw_volume_polynomial(surface, settings)(t))
    if not volume > 0:
        raise DegenerateVariationError(
            f"Raw volume {volume:g} at t={t:g} is not positive for {surface.name!r}"
        )
    scale = (surface.enclosed_volume / volume) ** (1.0 / (surface.dimension + 1))
    return VariationState(
        t=float(t),
        raw_energy=energy,
        raw_volume=volume,
        scale=scale,
        scaled_energy=scale**surface.dimension * energy,
    )


def energy_expansion(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> EnergyExpansion:
    """Second-order expansion of the scaled energy, without assuming criticality."""
    settings = resolve_settings(settings)
    coeffs = energy_coefficients(surface, settings)
    n = surface.dimension
    v0 = surface.enclosed_volume
    r1 = coeffs.e0 / v0
    r2 = 0.5 * coeffs.e1 / v0
    kappa = -n / (n + 1)
    scale1 = kappa * r1
    scale2 = kappa * r2 + 0.5 * kappa * (kappa - 1) * r1 * r1
    first = coeffs.e1 + coeffs.e0 * scale1
    second = coeffs.e2 + coeffs.e1 * scale1 + coeffs.e0 * scale2
    return EnergyExpansion(value=coeffs.e0, first=first, second=2.0 * second)


def closed_form_second_variation(coeffs: EnergyCoefficients, n: int) -> float:
    """E''(0) = (2n e0 e2 - (n - 1) e1^2) / (n e0) at a critical surface."""
    return (2 * n * coeffs.e0 * coeffs.e2 - (n - 1) * coeffs.e1**2) / (n * coeffs.e0)


def scaled_energy_derivatives(
    surface: CapillarySurface,
    h: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> tuple[float, float]:
    """
    E'(0) and E''(0) of the scaled energy by central differences at steps h and
    h/2 combined with one Richardson level.
    """
    settings = resolve_settings(settings)
    step = settings.fd_step if h is None else float(h)

    def energy(t: float) -> float:
        return variation_energy(surface, t, settings).scaled_energy

    center = energy(0.0)

    def differences(k: float) -> tuple[float, float]:
        ahead, behind = energy(k), energy(-k)
        return (ahead - behind) / (2 * k), (ahead - 2 * center + behind) / (k * k)

    coarse = differences(step)
    fine = differences(0.5 * step)
    return (
        (4 * fine[0] - coarse[0]) / 3,
        (4 * fine[1] - coarse[1]) / 3,
    )


def _require_constant_angles(surface: CapillarySurface, settings: Settings) -> None:
    for i in surface.walls:
        _, spread = contact_angle(surface, i, settings)
        if spread > settings.angle_tolerance:
            raise GeometryError(
                f"Contact angle along boundary {i} of {surface.name!r} varies by "
                f"{spread:.3g}"
            )


def second_factor(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> float:
    """
    -integral sum_{i<j} (k_i - k_j)^2
    + (n - 1) sum cos sin^2 (n integral of H over C_i + H^{n-1}(C_i)^2 / H^n(D_i)).

    Accepts non-CMC surfaces; the contact angles must still be constant.
    """
    settings = resolve_settings(settings)
    _require_constant_angles(surface, settings)
    _require_boundary_data(surface)
    n = surface.dimension
    value = -curvature_difference_integral(surface.patch, settings.quadrature_order)
    for (c, s), domain in zip(_wall_terms(surface), surface.wetted):
        mean_integral = n * domain.boundary_mean_curv_integral / (n - 1)
        isoperimetric = domain.boundary_area**2 / domain.area
        value += (n - 1) * c * s * s * (mean_integral + isoperimetric)
    return value


def hypothesis_checks(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> HypothesisChecks:
    settings = resolve_settings(settings)
    threshold = 0.5 * math.pi - settings.angle_tolerance
    return HypothesisChecks(
        obtuse_angles=all(theta >= threshold for theta in surface.contact_angles),
        boundary_embedded=all(domain.embedded for domain in surface.wetted),
        domains_convex=all(domain.convex for domain in surface.wetted),
        dimension=surface.dimension,
    )


def stability_indicator(
    surface: CapillarySurface, settings: Optional[Settings] = None
) -> StabilityReport:
    """
    Evaluate n e0 E''(0) for the volume-preserving variation and classify.

    Umbilic surfaces with a vanishing indicator are stable sphere pieces; under
    the hypotheses a non-umbilic surface has E''(0) < 0 and is unstable.

    Raises:
        CMCViolationError: If the mean curvature is not constant.
    """
    settings = resolve_settings(settings)
    require_cmc(surface, settings)
    n = surface.dimension
    coeffs = energy_coefficients(surface, settings)
    second = closed_form_second_variation(coeffs, n)
    indicator = n * coeffs.e0 * second
    bracket = second_factor(surface, settings)
    deficit = umbilic_deficit(surface.patch, settings.quadrature_order)
    checks = hypothesis_checks(surface, settings)
    umbilic = deficit < settings.umbilic_tolerance
    notes = []

    if abs(coeffs.e1) <= settings.indicator_tolerance * max(1.0, abs(coeffs.e0)):
        verdict = Verdict.DEGENERATE
        notes.append("e1 vanishes; the critical volume is undefined")
    elif not checks.satisfied:
        verdict = Verdict.HYPOTHESES_NOT_MET
        notes.append("stability hypotheses not met")
    elif umbilic and abs(indicator) < settings.indicator_tolerance:
        verdict = Verdict.SPHERE_STABLE
    elif not umbilic and indicator < -settings.indicator_tolerance:
        verdict = Verdict.UNSTABLE_NON_UMBILIC
    else:
        verdict = Verdict.DEGENERATE
        notes.append(
            f"indicator {indicator:.3g} disagrees with umbilic deficit {deficit:.3g}"
        )
    if verdict in (Verdict.DEGENERATE, Verdict.HYPOTHESES_NOT_MET):
        logger.warning("%s: %s (%s)", surface.name, verdict, "; ".join(notes))
    else:
        logger.debug("%s: %s, indicator %.3g", surface.name, verdict, indicator)

    return StabilityReport(
        indicator=indicator,
        first_factor=coeffs.e0,
        second_factor=bracket,
        umbilic_deficit=deficit,
        hypotheses=checks,
        verdict=verdict,
        coefficients=coeffs,
        second_variation=second,
        notes=tuple(notes),
    )
