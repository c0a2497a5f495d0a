"""Intermediate beta-expansions.

Exact multinacci field arithmetic, the maps T and T-tilde with their digit
sequences, invariant (Parry) densities, matching detection and interval
scans over alpha, and the mean normalized error M_beta(alpha) computed by
series, finite-sum, Birkhoff, and closed-form routes.
"""

from .density import (
    DensitySeries,
    ErgodicityWarning,
    NormalizationIntegral,
    StepDensity,
    build_series,
    eval_density,
    invariance_defect,
    normalization,
)
from .dynamics import (
    BetaSpec,
    Expansion,
    OrbitStep,
    TransformParams,
    delta_sequence,
    expand,
    orbit,
    prefix_agreement,
    step_T,
    step_T_tilde,
    symmetry_partner,
)
from .matching import (
    CycleCertificate,
    DeltaWord,
    MatchingInterval,
    MatchingRecord,
    MonotonicityConflict,
    ScanResult,
    WordDecompositionError,
    classify_monotonicity,
    delta_word_track,
    detect_matching,
    interval_line,
    scan_intervals,
)
from .mvalue import (
    GapOrderingError,
    MValue,
    MultinacciConstants,
    beta_gap_bounds,
    closed_forms,
    m_birkhoff,
    m_finite,
    m_series,
    monotone_table,
    symmetry_defect,
)
from .numberfield import (
    FieldElement,
    MultinacciField,
    Rational,
    RootEnclosure,
    SignRefinementError,
    as_rational,
    get_field,
    isolate_root,
)

__version__ = "0.1.0"

__all__ = [
    "BetaSpec",
    "CycleCertificate",
    "DeltaWord",
    "DensitySeries",
    "ErgodicityWarning",
    "Expansion",
    "FieldElement",
    "GapOrderingError",
    "MValue",
    "MatchingInterval",
    "MatchingRecord",
    "MonotonicityConflict",
    "MultinacciConstants",
    "MultinacciField",
    "NormalizationIntegral",
    "OrbitStep",
    "Rational",
    "RootEnclosure",
    "ScanResult",
    "SignRefinementError",
    "StepDensity",
    "TransformParams",
    "WordDecompositionError",
    "as_rational",
    "beta_gap_bounds",
    "build_series",
    "classify_monotonicity",
    "closed_forms",
    "delta_sequence",
    "delta_word_track",
    "detect_matching",
    "eval_density",
    "expand",
    "get_field",
    "interval_line",
    "invariance_defect",
    "isolate_root",
    "m_birkhoff",
    "m_finite",
    "m_series",
    "monotone_table",
    "normalization",
    "orbit",
    "prefix_agreement",
    "scan_intervals",
    "step_T",
    "step_T_tilde",
    "symmetry_defect",
    "symmetry_partner",
    "__version__",
]
