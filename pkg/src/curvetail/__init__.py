"""Extreme conditional quantile estimation for curve covariates.

Estimates quantiles of order 1 - alpha, alpha near zero, of a heavy-tailed
response given a functional covariate, by pooling responses over a
moving window in a curve semi-metric.  Includes within-sample and
extrapolated estimators, tail-index estimation with pluggable weights,
data-driven (h, k) selection, and a seeded Monte Carlo harness validating
the estimators' asymptotic behavior.
"""

from .errors import (
    ConfigError,
    CurveTailError,
    DegenerateGridError,
    DomainError,
    EmptyWindowError,
    GenerationError,
    NotExtrapolationError,
    OrderBeyondSampleError,
    ParameterError,
    SelectionError,
    StructuralError,
    StudyError,
)
from .functional import (
    Curve,
    Dataset,
    Slice,
    ball_proportion,
    curve_distance,
    empirical_quantile,
    extract_slice,
    pairwise_distance_grid,
    semi_metric_sq,
)
from .models import (
    BurrModel,
    ConditionalModel,
    ConstantMap,
    EnergyTailIndexMap,
    FrechetModel,
    ParetoModel,
    PerCurveValue,
    ShiftedScaledModel,
    TailMeanCentering,
    gamma_function,
    gamma_map_eval,
    sigma_scale,
)
from .quantile import QuantileEstimate, Situation, classify_situation, q1, q2
from .select import (
    SelectionGrid,
    SelectionResult,
    dist_over_design,
    evaluate_selection,
    select_heuristic,
    select_oracle,
    write_criterion_table,
)
from .sim import (
    ExperimentConfig,
    ReplicationReport,
    StudyResult,
    StudySummary,
    ValidationRow,
    build_generative_model,
    default_y_values,
    generate_curves,
    generate_responses,
    run_asymptotic_suite,
    run_study,
    write_study_csvs,
    write_validation_csv,
)
from .tailindex import HILL, ZIPF, TailEstimate, WeightFunction, av_factor, custom_weight, tail_index

__version__ = "0.1.0"
