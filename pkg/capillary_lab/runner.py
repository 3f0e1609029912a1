import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from os import PathLike
from pathlib import Path
from typing import Any, Callable, Optional, Union

import numpy as np

from capillary_lab import capillary, convexbody, stability
from capillary_lab.charts import sphere, torus
from capillary_lab.config import VERSION, Settings, check_order
from capillary_lab.exceptions import CapillaryLabError, ConfigError
from capillary_lab.hypersurface import (
    ParametricPatch,
    area,
    gauss_map_integral,
    oriented_volume,
    tube_polynomial,
    volume_polynomial,
)
from capillary_lab.report import Report
from capillary_lab.types import (
    BODY_FIELDS,
    CONFIG_FIELDS,
    SURFACE_FIELDS,
    BodySpec,
    ExperimentConfig,
    SurfaceSpec,
)

logger = logging.getLogger(__name__)

Command = Callable[[ExperimentConfig, Settings, Report], None]

COMMANDS = (
    "cap-stability",
    "variation-check",
    "tube-poly",
    "convex-check",
    "steiner",
    "quotient-scan",
    "sweep",
)
BALANCING_TOLERANCE = 1e-8
CRITICALITY_TOLERANCE = 1e-6
FIRST_VARIATION_TOLERANCE = 1e-6
SECOND_VARIATION_TOLERANCE = 1e-4
POLYNOMIAL_TOLERANCE = 1e-6
GAUSS_MAP_TOLERANCE = 1e-8
SLACK_TOLERANCE = convexbody.SLACK_TOLERANCE
DEFAULT_SWEEP_STEPS = 10
BODY_COMMANDS = ("convex-check", "steiner", "quotient-scan")


def load_config(path: Union[PathLike[str], str, Path]) -> ExperimentConfig:
    """
    Read and validate an experiment description.

    Raises:
        ConfigError: For malformed JSON (with line and column) or invalid fields.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"Cannot read config {path}: {error.strerror}")
    return parse_config(text, source=str(path))


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError(
            f"{source}: malformed JSON at line {error.lineno}, column {error.colno}: "
            f"{error.msg}"
        )
    return validate_config(data)


def _check_finite(value: Any, field: str) -> None:
    if isinstance(value, bool):
        return
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ConfigError(f"Field {field!r} must be finite, got {value}")
    elif isinstance(value, list):
        for k, item in enumerate(value):
            _check_finite(item, f"{field}[{k}]")
    elif isinstance(value, dict):
        for key, item in value.items():
            _check_finite(item, f"{field}.{key}")


def _check_spec(spec: Any, field: str, allowed: dict[str, set[str]]) -> None:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"Field {field!r} must be an object with a 'kind'")
    kind = spec["kind"]
    if kind not in allowed:
        raise ConfigError(
            f"Unknown {field} kind {kind!r}; expected one of {sorted(allowed)}"
        )
    unknown = set(spec) - allowed[kind] - {"kind"}
    if unknown:
        raise ConfigError(f"Unknown fields for {field} {kind!r}: {sorted(unknown)}")


def validate_config(data: Any) -> ExperimentConfig:
    """Strict parsing: unknown fields are rejected and every number must be finite."""
    if not isinstance(data, dict):
        raise ConfigError("Config must be a JSON object")
    unknown = set(data) - CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"Unknown config fields: {sorted(unknown)}")
    command = data.get("command")
    if command not in COMMANDS:
        raise ConfigError(
            f"Field 'command' must be one of {list(COMMANDS)}, got {command!r}"
        )
    if "surface" in data:
        _check_spec(data["surface"], "surface", SURFACE_FIELDS)
    if "body" in data:
        _check_spec(data["body"], "body", BODY_FIELDS)
    needs = "body" if command in BODY_COMMANDS else "surface"
    if needs not in data:
        raise ConfigError(f"Command {command!r} needs a {needs!r} field")
    if "quadrature_order" in data:
        try:
            check_order(data["quadrature_order"])
        except CapillaryLabError as error:
            raise ConfigError(f"Field 'quadrature_order': {error}")
    if "fd_step" in data and not (
        isinstance(data["fd_step"], (int, float)) and data["fd_step"] > 0
    ):
        raise ConfigError(f"Field 'fd_step' must be positive, got {data['fd_step']!r}")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"Field 'seed' must be an integer, got {data['seed']!r}")
    _check_finite(data, "config")
    return ExperimentConfig(**data)


class ExperimentRunner:
    """
    Runs experiment configs. Used as a context manager it owns the thread pool
    that sweeps fan out over; grid rows come back in input order.
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        order: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> None:
        self.settings = Settings.from_env() if settings is None else settings
        self.order = None if order is None else check_order(order)
        self.seed = seed
        self.workers = workers
        self.executor: Optional[ThreadPoolExecutor] = None
        self._commands: dict[str, Command] = {
            "cap-stability": self._cap_stability,
            "variation-check": self._variation_check,
            "tube-poly": self._tube_poly,
            "convex-check": self._convex_check,
            "steiner": self._steiner,
            "quotient-scan": self._quotient_scan,
            "sweep": self._sweep,
        }

    def __enter__(self) -> "ExperimentRunner":
        """Start the worker pool while using with statement."""
        self.executor = ThreadPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:
        """End of with statement, shuts the worker pool down."""
        self.close()

    def close(self) -> None:
        if self.executor is not None:
            self.executor.shutdown(wait=True)
            self.executor = None

    def run(self, config: ExperimentConfig) -> Report:
        """Validate a config dict and execute it."""
        return self.execute(validate_config(dict(config)))

    def execute(self, config: ExperimentConfig) -> Report:
        """
        Helper method every command goes through.

        Args:
            config (ExperimentConfig): Validated experiment description.

        Returns:
            Report: Results with the tolerances they were checked against.
        """
        settings = self._settings_for(config)
        command = config["command"]
        report = Report(
            command=command,
            config=dict(config),
            tolerances={
                "angle": settings.angle_tolerance,
                "cmc": settings.cmc_tolerance,
                "edge": settings.edge_tolerance,
                "indicator": settings.indicator_tolerance,
                "umbilic": settings.umbilic_tolerance,
                "quadrature": settings.quadrature_tolerance,
            },
            version=VERSION,
        )
        logger.debug(
            "Running %s at quadrature order %d", command, settings.quadrature_order
        )
        start = time.perf_counter()
        self._commands[command](config, settings, report)
        report.elapsed = time.perf_counter() - start
        return report

    def _settings_for(self, config: ExperimentConfig) -> Settings:
        settings = self.settings.with_order(
            self.order if self.order is not None else config.get("quadrature_order")
        )
        if "fd_step" in config:
            settings = replace(settings, fd_step=float(config["fd_step"]))
        return settings

    def _seed_for(self, config: ExperimentConfig) -> int:
        if self.seed is not None:
            return self.seed
        return int(config.get("seed", 0))

    def _map(self, function: Callable, items: list) -> list:
        if self.executor is None:
            return [function(item) for item in items]
        return list(self.executor.map(function, items))

    # surfaces

    @staticmethod
    def build_surface(
        spec: SurfaceSpec, settings: Settings, theta: Optional[float] = None
    ) -> capillary.CapillarySurface:
        kind = spec["kind"]
        n = int(spec.get("n", 2))
        if kind == "cap_halfspace":
            angle = theta if theta is not None else _scalar(spec, "theta")
            radius = float(spec.get("R", 1.0))
            return capillary.cap_in_halfspace(radius, angle, n, settings)
        if kind == "bridge_wedge":
            if theta is not None:
                theta1, theta2 = theta, None
            elif "theta1" in spec:
                theta1, theta2 = float(spec["theta1"]), spec.get("theta2")
            else:
                theta1, theta2 = _scalar(spec, "theta"), None
            return capillary.bridge_in_wedge(
                float(spec.get("R", 1.0)),
                float(spec["alpha"]),
                theta1,
                None if theta2 is None else float(theta2),
                n=n,
                tilt=float(spec.get("tilt", 0.0)),
                settings=settings,
            )
        if kind == "spheroid_cap":
            return capillary.spheroid_cap_in_halfspace(
                float(spec.get("a", 1.5)),
                float(spec.get("c", 1.0)),
                float(spec.get("cut", 0.0)),
                settings=settings,
            )
        raise ConfigError(f"Surface kind {kind!r} is not a capillary surface")

    @staticmethod
    def build_patch(spec: SurfaceSpec, settings: Settings) -> ParametricPatch:
        kind = spec["kind"]
        if kind == "sphere":
            return sphere(int(spec.get("n", 2)), float(spec.get("R", 1.0)))
        if kind == "torus":
            return torus(float(spec.get("R", 2.0)), float(spec.get("r", 1.0)))
        return ExperimentRunner.build_surface(spec, settings).patch

    def _cap_stability(
        self, config: ExperimentConfig, settings: Settings, report: Report
    ) -> None:
        surface = self.build_surface(config["surface"], settings)
        result = stability.stability_indicator(surface, settings)
        coeffs = result.coefficients
        n = surface.dimension
        report.verdict = str(result.verdict)
        report.notes.extend(result.notes)
        report.add("indicator", result.indicator, settings.indicator_tolerance)
        resolved = settings.quadrature_tolerance
        report.add("first_factor", result.first_factor, resolved)
        report.add("second_factor", result.second_factor, settings.indicator_tolerance)
        report.add(
            "factored_residual",
            result.indicator - result.factored,
            settings.cmc_tolerance,
        )
        report.add(
            "umbilic_deficit", result.umbilic_deficit, settings.umbilic_tolerance
        )
        report.add(
            "second_variation", result.second_variation, settings.indicator_tolerance
        )
        report.add("e0", coeffs.e0, resolved)
        report.add("e1", coeffs.e1, resolved)
        report.add("e2", coeffs.e2, resolved)
        report.add("mean_curvature", surface.mean_curvature, settings.cmc_tolerance)
        report.add("volume", surface.enclosed_volume, resolved)
        report.add(
            "criticality_residual",
            1.0 - coeffs.critical_volume(n) / surface.enclosed_volume,
            CRITICALITY_TOLERANCE,
        )
        for i in surface.walls:
            report.add(
                f"balancing_residual_{i}",
                capillary.balancing_residual(surface, i, settings),
                BALANCING_TOLERANCE,
            )
        report.add("hypotheses_satisfied", result.hypotheses.satisfied)

    def _variation_check(
        self, config: ExperimentConfig, settings: Settings, report: Report
    ) -> None:
        surface = self.build_surface(config["surface"], settings)
        h = float(config.get("h", settings.fd_step))
        expansion = stability.energy_expansion(surface, settings)
        first, second = stability.scaled_energy_derivatives(surface, h, settings)
        closed = stability.closed_form_second_variation(
            stability.energy_coefficients(surface, settings), surface.dimension
        )
        report.add("energy", expansion.value, settings.quadrature_tolerance)
        report.add("first_variation_fd", first, FIRST_VARIATION_TOLERANCE)
        report.add("first_variation", expansion.first, FIRST_VARIATION_TOLERANCE)
        report.add("second_variation_fd", second, SECOND_VARIATION_TOLERANCE)
        report.add("second_variation", closed, settings.indicator_tolerance)
        report.add(
            "second_variation_residual", second - closed, SECOND_VARIATION_TOLERANCE
        )
        report.add("step", h)

    def _tube_poly(
        self, config: ExperimentConfig, settings: Settings, report: Report
    ) -> None:
        patch = self.build_patch(config["surface"], settings)
        order = settings.quadrature_order
        tube = tube_polynomial(patch, order)
        volume = oriented_volume(patch, order)
        report.add("coefficients", list(tube.coefficients))
        report.add("area", area(patch, order))
        report.add("oriented_volume", volume)
        report.add(
            "volume_derivative_residual",
            volume_polynomial(tube, volume).derivative_residual(tube),
            POLYNOMIAL_TOLERANCE,
        )
        if config["surface"]["kind"] in ("sphere", "torus"):
            report.add(
                "gauss_map_integral",
                float(np.linalg.norm(gauss_map_integral(patch, order))),
                GAUSS_MAP_TOLERANCE,
            )

    # convex bodies

    def build_body(self, spec: BodySpec, settings: Settings) -> convexbody.Body:
        kind = spec["kind"]
        if kind == "square":
            return convexbody.square(float(spec.get("side", 1.0)))
        if kind == "cube":
            return convexbody.cube(float(spec.get("side", 1.0)))
        if kind in ("polygon", "polyhedron"):
            body = convexbody.polytope(spec["vertices"])
            expected = 2 if kind == "polygon" else 3
            if body.dim != expected:
                raise ConfigError(f"A {kind} needs {expected}-dimensional vertices")
            return body
        if kind == "regular_polygon":
            return convexbody.regular_polygon(
                int(spec["sides"]), float(spec.get("r", 1.0))
            )
        if kind == "ellipse":
            return convexbody.ellipse(float(spec["a"]), float(spec["b"]))
        if kind == "ellipsoid":
            return convexbody.smooth_ellipsoid(
                float(spec["a"]), float(spec["b"]), float(spec["c"])
            )
        if kind == "disk":
            return convexbody.disk(float(spec.get("r", 1.0)))
        if kind == "ball":
            return convexbody.ball(float(spec.get("r", 1.0)))
        raise ConfigError(f"Body kind {kind!r} is not a single convex body")

    def _convex_check(
        self, config: ExperimentConfig, settings: Settings, report: Report
    ) -> None:
        spec = config["body"]
        if spec["kind"] == "random_suite":
            result = convexbody.random_suite(
                self._seed_for(config),
                int(spec.get("polygons", 100)),
                int(spec.get("polyhedra", 20)),
                int(spec.get("pairs", 100)),
            )
            report.add("seed", result.seed)
            report.add("polygon_slack", result.polygon_slack, SLACK_TOLERANCE)
            report.add("polyhedron_slack", result.polyhedron_slack, SLACK_TOLERANCE)
            report.add("pair_slack", result.pair_slack, SLACK_TOLERANCE)
            report.add("holds", result.holds)
            return
        body = self.build_body(spec, settings)
        order = settings.quadrature_order
        report.add("quermass", list(convexbody.quermass(body, order).values))
        slacks = convexbody.inequality_suite(body, order)
        for name, value in slacks.as_dict().items():
            report.add(f"slack_{name}", value, SLACK_TOLERANCE)
        report.add("holds", slacks.holds)

    def _steiner(
        self, config: ExperimentConfig, settings: Settings, report: Report
    ) -> None:
        body = self.build_body(config["body"], settings)
        if not isinstance(body, convexbody.ConvexPolytope):
            raise ConfigError("steiner compares against sampled volumes of polytopes")
        check = convexbody.steiner_check(body, float(config.get("t", 0.5)))
        report.add("coefficients", list(convexbody.steiner(body).coefficients))
        report.add("polynomial_value", check.polynomial_value)
        report.add("sampled_volume", check.sampled)
        report.add("residual", check.residual, check.bound)

    def _quotient_scan(
        self, config: ExperimentConfig, settings: Settings, report: Report
    ) -> None:
        body = self.build_body(config["body"], settings)
        grid = config.get("t_grid", [0.0, 0.5, 1.0, 2.0])
        order = settings.quadrature_order
        scan = convexbody.parallel_quotient_scan(body, grid, order)
        report.columns = ["t", "quotient"]
        report.rows = [[t, q] for t, q in zip(scan.t, scan.quotients)]
        report.add("quotients", list(scan.quotients))
        report.add(
            "derivative_at_zero", convexbody.quotient_derivative(body, 0.0, order)
        )
        report.add("nonincreasing", scan.nonincreasing)

    # sweeps

    def _sweep(
        self, config: ExperimentConfig, settings: Settings, report: Report
    ) -> None:
        spec = config["surface"]
        angles = spec.get("theta")
        if not isinstance(angles, list) or len(angles) != 2:
            raise ConfigError("sweep needs 'theta': [start, stop] in the surface")
        steps = int(spec.get("steps", DEFAULT_SWEEP_STEPS))
        if steps < 1:
            raise ConfigError(f"Field 'steps' must be positive, got {steps}")
        grid = [float(t) for t in np.linspace(angles[0], angles[1], steps)]

        def row(theta: float) -> list[float]:
            surface = self.build_surface(spec, settings, theta)
            coeffs = stability.energy_coefficients(surface, settings)
            n = surface.dimension
            second = stability.closed_form_second_variation(coeffs, n)
            residual = max(
                abs(capillary.balancing_residual(surface, i, settings))
                for i in surface.walls
            )
            indicator = n * coeffs.e0 * second
            return [theta, residual, coeffs.e0, coeffs.e1, coeffs.e2, indicator]

        report.columns = ["theta", "balancing_residual", "e0", "e1", "e2", "indicator"]
        report.rows = self._map(row, grid)
        report.add(
            "max_balancing_residual",
            max((r[1] for r in report.rows), default=0.0),
            BALANCING_TOLERANCE,
        )
        report.add(
            "max_indicator",
            max((abs(r[5]) for r in report.rows), default=0.0),
            settings.indicator_tolerance,
        )


def _scalar(spec: SurfaceSpec, field: str) -> float:
    value = spec.get(field)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"Field {field!r} must be a number, got {value!r}")
    return float(value)
