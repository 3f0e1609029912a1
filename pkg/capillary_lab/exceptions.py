class CapillaryLabError(Exception):
    """Handles all expected exceptions"""


class EvaluationError(CapillaryLabError):
    """An integrand or evaluator returned a non-finite value"""


class ParameterError(CapillaryLabError):
    """An argument is outside its admissible range"""


class ContractViolation(CapillaryLabError):
    """An input or output broke a documented numerical contract"""


class DegenerateImmersionError(CapillaryLabError):
    """The first partials of a patch are (nearly) linearly dependent"""


class FocalCrossingError(CapillaryLabError):
    """A parallel offset crosses the focal set of a patch"""


class GeometryError(CapillaryLabError):
    """A configuration violates a geometric invariant"""


class EdgeCollisionError(GeometryError):
    """A surface touches the edge of its wedge"""


class InfeasibleGeometryError(GeometryError):
    """No configuration exists for the requested parameters"""


class HypothesisError(CapillaryLabError):
    """Inputs violate the hypotheses of the classification theorem"""


class CMCViolationError(CapillaryLabError):
    """The surface does not have constant mean curvature"""

    def __init__(self, message: str, deviation: float) -> None:
        super().__init__(message)
        self.deviation = deviation


class IncompleteInputError(CapillaryLabError):
    """Required wetted-domain data is missing"""


class DegenerateVariationError(CapillaryLabError):
    """The admissible variation collapses the enclosed volume"""


class DegeneracyError(CapillaryLabError):
    """Point input spans a lower-dimensional set"""


class NonConvexError(CapillaryLabError):
    """A body that must be convex is not"""


class DimensionMismatchError(CapillaryLabError):
    """Two bodies live in different dimensions"""


class ConfigError(CapillaryLabError):
    """An experiment description could not be parsed"""


class QuadratureError(CapillaryLabError):
    """Composite quadrature did not settle within its panel budget"""
