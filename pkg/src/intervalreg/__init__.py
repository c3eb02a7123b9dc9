"""Linear regression for interval-valued data.

Center and center-and-range methods over tables whose cells are closed
intervals, with optional ridge, lasso, or elastic-net shrinkage of the
underlying regressions, plus cross-validation, coefficient paths,
evaluation indexes, and classic-table aggregation.
"""

from .metrics import EvalReport, ZeroVariance, evaluate, format_report, report_csv_row
from .models import (
    FittedModel,
    IntervalPrediction,
    MethodSpec,
    ModelFormatError,
    SchemaMismatch,
    VersionMismatch,
    deserialize,
    fit,
    predict,
    serialize,
    swap_violations,
)
from .selection import (
    AlphaSweepResult,
    CoefficientPath,
    CvResult,
    LambdaGrid,
    ZeroVarianceResponse,
    alpha_sweep,
    coefficient_path,
    cross_validate,
    make_lambda_grid,
)
from .solvers import (
    CoefficientSet,
    DesignProblem,
    NonFiniteEncountered,
    PenaltySpec,
    SingularDesign,
    SolverError,
    fit_elastic_net,
    fit_ols,
    fit_ridge,
    predict_linear,
)
from .tables import (
    CenterRangeView,
    CsvFormatError,
    Interval,
    IntervalOrderError,
    IntervalTable,
    TableError,
    aggregate_classic,
    read_classic_csv,
    read_interval_csv,
    to_center_range,
    write_interval_csv,
)

__version__ = "0.1.0"
