import os
from dataclasses import dataclass, replace
from typing import Optional

from capillary_lab.exceptions import ConfigError, ParameterError

ORDER_ENV_VAR = "CAPILLARY_LAB_ORDER"
DEFAULT_ORDER = 32
DEFAULT_FD_STEP = 1e-3
VERSION = "0.1.0"


@dataclass(frozen=True)
class Settings:
    """
    Numerical knobs shared by the capillary and stability pipelines.

    Tolerances only absorb quadrature noise: the builders are exact.
    `quadrature_tolerance` and `max_panels` drive the composite panels of charts
    whose nodes a single Gauss rule cannot resolve.
    """

    quadrature_order: int = DEFAULT_ORDER
    fd_step: float = DEFAULT_FD_STEP
    cmc_tolerance: float = 1e-6
    angle_tolerance: float = 1e-6
    edge_tolerance: float = 1e-9
    umbilic_tolerance: float = 1e-6
    indicator_tolerance: float = 1e-6
    plane_tolerance: float = 1e-8
    quadrature_tolerance: float = 1e-10
    max_panels: int = 64

    @classmethod
    def from_env(cls) -> "Settings":
        """Default settings with the quadrature order taken from the environment."""
        return cls(quadrature_order=default_order())

    def with_order(self, order: Optional[int]) -> "Settings":
        if order is None:
            return self
        return replace(self, quadrature_order=check_order(order))


def check_order(order: int) -> int:
    if isinstance(order, bool) or not isinstance(order, int) or order < 2:
        raise ParameterError(
            f"Quadrature order must be an integer >= 2, got {order!r}"
        )
    return order


def default_order() -> int:
    """Quadrature order from `CAPILLARY_LAB_ORDER`, falling back to 32."""
    raw = os.environ.get(ORDER_ENV_VAR)
    if raw is None or not raw.strip():
        return DEFAULT_ORDER
    try:
        return check_order(int(raw))
    except (ValueError, ParameterError):
        raise ConfigError(f"{ORDER_ENV_VAR} must be an integer >= 2, got {raw!r}")


def resolve_order(order: Optional[int]) -> int:
    return default_order() if order is None else check_order(order)


def resolve_step(step: Optional[float]) -> float:
    return DEFAULT_FD_STEP if step is None else float(step)


def resolve_settings(settings: Optional[Settings]) -> Settings:
    return Settings.from_env() if settings is None else settings
