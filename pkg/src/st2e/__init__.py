"""Stochastic stepwise ensembles (ST2E) for variable selection.

Build an ensemble of randomized stepwise regression paths, average their
0/1 selections into importance scores, and keep the variables scoring
above the ensemble mean.  See the README for the command-line interface.
"""

from .benchmark import BenchmarkResult, run_benchmark
from .ensemble import (
    DegenerateEnsemble,
    EnsembleMatrix,
    NullObjectiveZero,
    TuningCurve,
    build_ensemble,
    default_kappa_grid,
    diversity,
    importance,
    perf,
    strength,
    threshold_mean,
    tune_kappa,
)
from .io import ConstantColumnWarning, MissingResponse, ParseError, ingest_csv
from .linear_model import (
    Dataset,
    FitResult,
    RankDeficient,
    SignalPartition,
    TooManyVariables,
    aic,
    fit_ols,
    null_objective,
)
from .reports import (
    BenchmarkSummary,
    SelectionReport,
    make_benchmark_summary,
    make_selection_report,
)
from .rng import mix64, substream
from .scenarios import (
    NotPositiveDefinite,
    ScenarioSpec,
    UnknownScenario,
    builtin_scenario,
    correlated_normal,
    generate,
    largep120_coefficients,
)
from .screening import (
    ScreeningConfig,
    ZeroVarianceResponse,
    bootstrap_sample,
    run_screened_path,
    sis_screen,
)
from .search import (
    ModelEvaluator,
    PathResult,
    ST2Config,
    StepPlan,
    backward_step,
    forward_step,
    num_candidate_groups,
    run_st2_path,
    sample_candidate_groups,
    sample_group_size,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkResult",
    "BenchmarkSummary",
    "ConstantColumnWarning",
    "Dataset",
    "DegenerateEnsemble",
    "EnsembleMatrix",
    "FitResult",
    "MissingResponse",
    "ModelEvaluator",
    "NotPositiveDefinite",
    "NullObjectiveZero",
    "ParseError",
    "PathResult",
    "RankDeficient",
    "ST2Config",
    "ScenarioSpec",
    "ScreeningConfig",
    "SelectionReport",
    "SignalPartition",
    "StepPlan",
    "TooManyVariables",
    "TuningCurve",
    "UnknownScenario",
    "ZeroVarianceResponse",
    "aic",
    "backward_step",
    "bootstrap_sample",
    "build_ensemble",
    "builtin_scenario",
    "correlated_normal",
    "default_kappa_grid",
    "diversity",
    "fit_ols",
    "forward_step",
    "generate",
    "importance",
    "ingest_csv",
    "largep120_coefficients",
    "make_benchmark_summary",
    "make_selection_report",
    "mix64",
    "null_objective",
    "num_candidate_groups",
    "perf",
    "run_benchmark",
    "run_screened_path",
    "run_st2_path",
    "sample_candidate_groups",
    "sample_group_size",
    "sis_screen",
    "strength",
    "substream",
    "threshold_mean",
    "tune_kappa",
]
