from capillary_lab.capillary import (
    CapillarySurface,
    HalfSpace,
    Wedge,
    WettedDomain,
    bridge_in_wedge,
    cap_in_halfspace,
    spheroid_cap_in_halfspace,
)
from capillary_lab.config import VERSION, Settings
from capillary_lab.convexbody import (
    ConvexPolytope,
    QuermassVector,
    SmoothConvexBody,
    SteinerPolynomial,
    hull,
    inequality_suite,
    minkowski_sum,
    quermass,
)
from capillary_lab.exceptions import CapillaryLabError
from capillary_lab.hypersurface import ParametricPatch, TubePolynomial
from capillary_lab.report import Report
from capillary_lab.runner import ExperimentRunner
from capillary_lab.stability import StabilityReport, stability_indicator
from capillary_lab.verdict import Verdict

__version__ = VERSION

__all__ = [
    "CapillaryLabError",
    "CapillarySurface",
    "ConvexPolytope",
    "ExperimentRunner",
    "HalfSpace",
    "ParametricPatch",
    "QuermassVector",
    "Report",
    "Settings",
    "SmoothConvexBody",
    "StabilityReport",
    "SteinerPolynomial",
    "TubePolynomial",
    "Verdict",
    "Wedge",
    "WettedDomain",
    "__version__",
    "bridge_in_wedge",
    "cap_in_halfspace",
    "hull",
    "inequality_suite",
    "minkowski_sum",
    "quermass",
    "spheroid_cap_in_halfspace",
    "stability_indicator",
]
