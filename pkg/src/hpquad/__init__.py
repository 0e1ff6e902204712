"""hp-adaptive Gauss-Legendre quadrature.

Splits rough subintervals and raises the rule order on smooth ones, steered
by a Legendre-coefficient smoothness indicator that costs no extra integrand
evaluations, and retires subintervals once refining them no longer moves the
total at working precision.
"""

from .adaptive import (
    EPS,
    AdaptiveConfig,
    HpMesh,
    IntegrationError,
    IntegrationResult,
    PassReport,
    Refinement,
    RunStats,
    Segment,
    accept_test,
    apply_refinement,
    batch_eval,
    decide_refinement,
    integrate,
    make_segment,
    mapped_points,
    refinement_pass,
    segment_quadrature,
)
from .benchmarks import (
    PRESETS,
    BenchmarkCase,
    CaseRow,
    RunReport,
    emit_graph,
    emit_mesh,
    format_report,
    run_benchmarks,
)
from .rules import (
    P_MIN,
    RuleTables,
    build_tables,
    gauss_legendre_rule,
    get_tables,
    legendre_eval,
)
from .simpson import SimpsonStats, simpson_adaptive
from .smoothness import (
    INDICATOR_FLOOR,
    SmoothnessScore,
    coefficient_ratio,
    score_values,
    smoothness_from_norms,
    smoothness_indicator,
)

__version__ = "0.1.0"

__all__ = [
    "EPS",
    "P_MIN",
    "INDICATOR_FLOOR",
    "AdaptiveConfig",
    "BenchmarkCase",
    "CaseRow",
    "HpMesh",
    "IntegrationError",
    "IntegrationResult",
    "PassReport",
    "PRESETS",
    "Refinement",
    "RuleTables",
    "RunReport",
    "RunStats",
    "Segment",
    "SimpsonStats",
    "SmoothnessScore",
    "accept_test",
    "apply_refinement",
    "batch_eval",
    "build_tables",
    "coefficient_ratio",
    "decide_refinement",
    "emit_graph",
    "emit_mesh",
    "format_report",
    "gauss_legendre_rule",
    "get_tables",
    "integrate",
    "legendre_eval",
    "make_segment",
    "mapped_points",
    "refinement_pass",
    "run_benchmarks",
    "score_values",
    "segment_quadrature",
    "simpson_adaptive",
    "smoothness_from_norms",
    "smoothness_indicator",
    "__version__",
]
