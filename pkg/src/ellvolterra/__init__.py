"""Construction, validation, classification and dynamics of l-Volterra
quadratic stochastic operators on the probability simplex."""

from .classify import (
    EllClassification,
    EntryNotFractional,
    ExtremalCensus,
    InvarianceResult,
    SizeGuardExceeded,
    admissible_rows,
    census,
    check_face_invariance,
    check_positivity_invariance,
    convex_combine,
    detect_ell,
    enumerate_extremals,
    extremal_count,
    split_at_entry,
)
from .core import (
    AsymmetryError,
    CanonicalForm,
    ColumnSumError,
    CubicMatrix,
    DimensionMismatch,
    MatrixValidationError,
    NegativeEntryError,
    apply,
    apply_canonical,
    canonical_form,
    collect_violations,
    dump_operator,
    evaluate_raw,
    load_operator,
    simplex_point,
    validate,
    vertex,
)
from .dynamics import (
    CycleReport,
    FixedLine,
    FixedPointReport,
    FixedPointScan,
    OmegaLimit,
    Orbit,
    classify_eigenvalues,
    detect_cycle,
    find_fixed_points,
    jacobian,
    omega_limit_estimate,
    orbit,
    orbit_to_csv,
    report_fixed_point,
)
from .families import (
    CycleSpec,
    M2Params,
    M2Report,
    M3FixedLine,
    M3Report,
    M3SymParams,
    ParamRangeError,
    SpecError,
    cycle_family,
    m2_analyze,
    m2_operator,
    m2_reduced_map,
    m3_analyze,
    m3_coefficients,
    m3_operator,
    m3_reduced_map,
    ray_limit,
    ray_restriction,
)
from .sampling import random_ell_volterra, random_operator, random_simplex_point

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
