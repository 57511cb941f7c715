"""Exact partition numbers and refined Hardy-Ramanujan estimators.

The package computes p(n) exactly (pentagonal recurrence over Python
integers), evaluates a family of closed-form estimators at arbitrary
working precision, re-derives every fitted constant those estimators
use, and checks the published accuracy claims against the exact table.
"""

from .coefficients import (
    CoefficientSet,
    EstimatorKind,
    Registry,
    load_registry,
    paper_registry,
    save_registry,
)
from .errors import (
    ConfigError,
    DomainError,
    FitDivergedError,
    PartnumError,
    RangeError,
    SingularFitError,
)
from .exact import (
    PartitionTable,
    build_table,
    load_table_json,
    p_exact,
    p_oracle_dp,
    p_oracle_prefix,
    save_table_json,
    storage_bytes_estimate,
)
from .estimators import (
    estimate,
    f3,
    rd3,
    rh,
    rh0,
    rh1,
    rh2,
    rh3,
    rh4,
    round_half_up,
)
from .fitting import (
    DEFAULT_GRID,
    FitModel,
    FitResult,
    GridConfig,
    avg_error,
    fit_c1_linear,
    fit_c2prime_piecewise,
    fit_c3_cubic,
    fit_c5,
    fit_odd_c2_cubics,
    fit_ratio_line,
    fit_t0_and_c4,
    grid_refine,
    iterate_c1_fit,
    linear_lsq,
    model_function,
    refine_exponent_scale,
    refine_shift,
)
from .analysis import (
    PAPER_THRESHOLDS,
    ClauseResult,
    ErrorReport,
    ReportRow,
    ThresholdClause,
    ThresholdSpec,
    check_thresholds,
    emit_csv,
    parse_report_csv,
    scan,
)
from .precision import DEFAULT_DPS, MIN_DPS, working_dps
from .repro import ReproContext, refit_registry, run_all
from .series import (
    DIFF_GRID,
    SHIFT_GRID,
    DataSeries,
    build_c1_series,
    build_c2_series,
    build_diff_target_series,
    build_ratio_series,
)

__version__ = "0.1.0"
