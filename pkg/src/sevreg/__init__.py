"""Composite lognormal severity regression with covariate-driven thresholds.

A lognormal head is spliced to a Burr, Stoppa or generalized log-Moyal
tail at the tail's mode; covariates enter the tail scale through a log
link, so the splice threshold varies per observation.  The package
provides the distribution machinery, maximum likelihood fitting with
standard errors, model selection and residual diagnostics, exact
simulation, an sklearn-style estimator, and a CLI (``sevreg``).
"""

from .composite import CompositeDerived, CompositeLognormal
from .diagnostics import (
    CoefficientTest,
    ResidualSet,
    SelectionReport,
    coefficient_tests,
    quantile_residuals,
    selection_report,
)
from .estimation import (
    FitControls,
    FitResult,
    default_init,
    fit,
    from_unconstrained,
    numerical_hessian,
    to_unconstrained,
)
from .estimator import CompositeSeverityRegressor
from .exceptions import (
    DataError,
    DomainError,
    ModeUndefinedError,
    NumericError,
    ParameterError,
    SevregError,
    StdErrorsUnavailable,
)
from .families import Burr, GlogM, Lognormal, Stoppa
from .regression import (
    Covariate,
    Dataset,
    DesignMatrix,
    ModelParams,
    PerObservationComposite,
    build_composite,
    dataset_from_columns,
    encode,
    link_beta,
    neg_log_likelihood,
    per_observation,
)
from .simulation import (
    CategoricalRecipe,
    NumericRecipe,
    SimulationPlan,
    motor_portfolio_recipe,
    sample,
)

__version__ = "0.1.0"

__all__ = [
    "Burr",
    "CategoricalRecipe",
    "CoefficientTest",
    "CompositeDerived",
    "CompositeLognormal",
    "CompositeSeverityRegressor",
    "Covariate",
    "DataError",
    "Dataset",
    "DesignMatrix",
    "DomainError",
    "FitControls",
    "FitResult",
    "GlogM",
    "Lognormal",
    "ModeUndefinedError",
    "ModelParams",
    "NumericError",
    "NumericRecipe",
    "ParameterError",
    "PerObservationComposite",
    "ResidualSet",
    "SelectionReport",
    "SevregError",
    "SimulationPlan",
    "StdErrorsUnavailable",
    "Stoppa",
    "build_composite",
    "coefficient_tests",
    "dataset_from_columns",
    "default_init",
    "encode",
    "fit",
    "from_unconstrained",
    "link_beta",
    "motor_portfolio_recipe",
    "neg_log_likelihood",
    "numerical_hessian",
    "per_observation",
    "quantile_residuals",
    "sample",
    "selection_report",
    "to_unconstrained",
    "__version__",
]
