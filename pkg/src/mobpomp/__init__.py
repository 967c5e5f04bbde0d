"""Mobius-Pompeiu classification of points in Ptolemaic metric spaces."""

__version__ = "0.1.0"

from .classifier import (  # noqa: E402
    AlphaBetaProfile,
    Classification,
    DistanceTriple,
    MobiusPompeiuClassifier,
    RegionCode,
    Triangle,
    Verdict,
    alpha_beta_profile,
    classify_direct,
    classify_via_theorems,
    distance_triple,
    region_nonempty,
    search_failing_point,
    sides,
)
from .curves import (  # noqa: E402
    ChordalCurveCoeffs,
    CircleCoeffs,
    CurveCoefficientEstimator,
    QuarticCoeffs,
    chordal_alpha_quartic,
    chordal_beta_circle,
    circle_params,
    euclidean_alpha_quartic,
    euclidean_beta_circle,
)
from .metrics import (  # noqa: E402
    MetricKind,
    PlanePoint,
    SpherePoint,
    check_metric_axioms,
    chordal_distance,
    euclidean_distance,
    forward_stereographic,
    inverse_stereographic,
    is_ptolemaic_quadruple,
    ptolemy_residual,
)
from .render import GridSpec, RegionImage, great_circle_image, render_sign_map, write_image, zero_contour  # noqa: E402

__all__ = [
    "__version__",
    "AlphaBetaProfile",
    "Classification",
    "DistanceTriple",
    "MobiusPompeiuClassifier",
    "RegionCode",
    "Triangle",
    "Verdict",
    "alpha_beta_profile",
    "classify_direct",
    "classify_via_theorems",
    "distance_triple",
    "region_nonempty",
    "search_failing_point",
    "sides",
    "ChordalCurveCoeffs",
    "CircleCoeffs",
    "CurveCoefficientEstimator",
    "QuarticCoeffs",
    "chordal_alpha_quartic",
    "chordal_beta_circle",
    "circle_params",
    "euclidean_alpha_quartic",
    "euclidean_beta_circle",
    "MetricKind",
    "PlanePoint",
    "SpherePoint",
    "check_metric_axioms",
    "chordal_distance",
    "euclidean_distance",
    "forward_stereographic",
    "inverse_stereographic",
    "is_ptolemaic_quadruple",
    "ptolemy_residual",
    "GridSpec",
    "RegionImage",
    "great_circle_image",
    "render_sign_map",
    "write_image",
    "zero_contour",
]
