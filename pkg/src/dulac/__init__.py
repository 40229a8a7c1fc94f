"""Dulac-criterion toolkit for planar polynomial vector fields.

Exact polynomial algebra, Dulac multiplier synthesis, Bernstein positivity
certificates ruling out periodic orbits on rectangles, Darboux integrability
machinery, and numeric limit-cycle detection for cross-validation.
"""

from . import errors
from .analyze import AnalysisReport, AnalyzeConfig, LocalCertificate, run_analyze
from .certify import (
    BernsteinPatch,
    Box2,
    Certificate,
    Conclusion,
    DulacCertificate,
    Inconclusive,
    Positive,
    Violation,
    bendixson,
    bernstein_coefficients,
    certify_dulac,
    certify_positive,
)
from .darboux import (
    DarbouxExpr,
    ExponentialFactor,
    InvariantCurve,
    ResidualReport,
    check_integrating_factor,
    check_inverse_integrating_factor,
    cofactor_of,
    darboux_first_integral,
    dulac_cofactor_crosscheck,
    exponential_factor_cofactor,
    verify_first_integral,
)
from .flow import (
    Classification,
    CrossingDirection,
    EquilibriumReport,
    LimitCycleReport,
    Section,
    Stability,
    Trajectory,
    TrajectoryStatus,
    classify_equilibrium,
    detect_limit_cycle,
    find_equilibria,
    integrate,
    poincare_return,
)
from .multiplier import BENDIXSON, ExpPolyMultiplier, Multiplier, PolyMultiplier
from .parse import parse_constant, parse_multiplier, parse_poly, parse_system
from .poly import (
    CRAT_I,
    CRat,
    Point,
    Poly,
    Rat,
    VectorField,
    derive,
    div_product,
    divergence,
    evaluate,
    format_poly,
    lie_derivative,
    poly_divide,
)
from .synthesis import (
    GridNode,
    Matrix2,
    QuadraticMultiplier,
    Reading,
    RECORDED_READING,
    SampledMultiplier,
    flowbox_dulac,
    gradient_field,
    gradient_multipliers,
    local_dulac_hyperbolic,
    printed_coefficients,
    quadratic_dulac_linear,
)

__all__ = [
    "errors",
    # poly
    "CRat", "CRAT_I", "Point", "Poly", "Rat", "VectorField",
    "derive", "divergence", "div_product", "evaluate", "format_poly",
    "lie_derivative", "poly_divide",
    # parse
    "parse_constant", "parse_multiplier", "parse_poly", "parse_system",
    # multiplier
    "BENDIXSON", "ExpPolyMultiplier", "Multiplier", "PolyMultiplier",
    # certify
    "BernsteinPatch", "Box2", "Certificate", "Conclusion", "DulacCertificate",
    "Inconclusive", "Positive", "Violation", "bendixson",
    "bernstein_coefficients", "certify_dulac", "certify_positive",
    # synthesis
    "GridNode", "Matrix2", "QuadraticMultiplier", "Reading",
    "RECORDED_READING", "SampledMultiplier", "flowbox_dulac",
    "gradient_field", "gradient_multipliers", "local_dulac_hyperbolic",
    "printed_coefficients", "quadratic_dulac_linear",
    # darboux
    "DarbouxExpr", "ExponentialFactor", "InvariantCurve", "ResidualReport",
    "check_integrating_factor", "check_inverse_integrating_factor",
    "cofactor_of", "darboux_first_integral", "dulac_cofactor_crosscheck",
    "exponential_factor_cofactor", "verify_first_integral",
    # flow
    "Classification", "CrossingDirection", "EquilibriumReport",
    "LimitCycleReport", "Section", "Stability", "Trajectory",
    "TrajectoryStatus", "classify_equilibrium", "detect_limit_cycle",
    "find_equilibria", "integrate", "poincare_return",
    # analyze
    "AnalysisReport", "AnalyzeConfig", "LocalCertificate", "run_analyze",
]
