"""Scikit-learn style front end.

``CompositeSeverityRegressor`` wraps design encoding, maximum likelihood
fitting and diagnostics behind the familiar ``fit(X, y)`` idiom, so the
model drops into sklearn tooling (``get_params``/``set_params``/``clone``).
``X`` may be a pandas DataFrame, a mapping of named columns, or a plain
2-d array (columns then named x1..xp and treated as numeric).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import estimation
from .diagnostics import coefficient_tests, quantile_residuals, selection_report
from .exceptions import DataError, StdErrorsUnavailable
from .families import TAIL_FAMILIES, family_has_delta
from .regression import build_composite, dataset_from_columns, encode


def _table_columns(X) -> dict[str, np.ndarray]:
    """Named columns from a DataFrame-like, a mapping, or a 2-d array."""
    if hasattr(X, "columns") and not isinstance(X, dict):
        return {str(name): np.asarray(X[name]) for name in X.columns}
    if isinstance(X, dict):
        return {str(name): np.asarray(v) for name, v in X.items()}
    arr = np.asarray(X)
    if arr.ndim != 2:
        raise DataError("X must be a table: DataFrame, dict of columns, or 2-d array")
    return {f"x{j + 1}": arr[:, j] for j in range(arr.shape[1])}


class CompositeSeverityRegressor(BaseEstimator):
    """Composite lognormal severity regression with a covariate-driven threshold.

    Parameters
    ----------
    family : {"burr", "stoppa", "glogm"}
        Tail family above the threshold.
    covariates : list of str, optional
        Column subset (and order) to use; defaults to every column of X.
    standardize : bool
        Z-score numeric covariates during optimization; coefficients are
        reported on the original scale either way.
    n_starts, max_iter, gtol, ftol_rel, jitter, random_state
        Optimizer controls (multi-start count, iteration cap, gradient and
        relative-improvement tolerances, start jitter, seed).
    alpha_level : float
        Significance level used by :meth:`summary`.

    Attributes (after fit)
    ----------------------
    coef_, coef_names_ : regression coefficients and design column names
    sigma_, alpha_, delta_ : head spread and tail shape estimates
    std_errors_, covariance_ : uncertainty on (sigma, alpha[, delta], gamma)
    nll_, aic_, bic_, df_, n_ : fit quality and bookkeeping
    converged_, n_iter_ : optimizer outcome
    result_ : the underlying :class:`~sevreg.estimation.FitResult`
    """

    def __init__(self, family="burr", covariates=None, standardize=False,
                 n_starts=5, max_iter=500, gtol=1e-6, ftol_rel=1e-10,
                 jitter=0.25, random_state=12345, alpha_level=0.05):
        self.family = family
        self.covariates = covariates
        self.standardize = standardize
        self.n_starts = n_starts
        self.max_iter = max_iter
        self.gtol = gtol
        self.ftol_rel = ftol_rel
        self.jitter = jitter
        self.random_state = random_state
        self.alpha_level = alpha_level

    def _controls(self) -> estimation.FitControls:
        return estimation.FitControls(
            gtol=self.gtol, ftol_rel=self.ftol_rel, max_iter=self.max_iter,
            n_starts=self.n_starts, jitter=self.jitter, seed=self.random_state,
        )

    def fit(self, X, y):
        if self.family not in TAIL_FAMILIES:
            raise DataError(f"unknown family {self.family!r}")
        cols = _table_columns(X)
        names = list(self.covariates) if self.covariates is not None else list(cols)
        missing = [n for n in names if n not in cols]
        if missing:
            raise DataError(f"covariates not present in X: {missing}")
        dataset = dataset_from_columns(np.asarray(y, dtype=float),
                                       {n: cols[n] for n in names})
        design = encode(dataset, names)
        result = estimation.fit(dataset, design, self.family,
                                controls=self._controls(), standardize=self.standardize)
        selection = selection_report(result.nll, result.df, result.n)

        self.result_ = result
        self.design_info_ = list(design.covariates)
        self.covariate_names_ = tuple(names)
        self.coef_ = result.params_hat.gamma.copy()
        self.coef_names_ = tuple(design.column_names)
        self.sigma_ = result.params_hat.sigma
        self.alpha_ = result.params_hat.alpha
        self.delta_ = result.params_hat.delta
        self.std_errors_ = result.std_errors
        self.covariance_ = result.covariance
        self.nll_ = result.nll
        self.aic_ = selection.aic
        self.bic_ = selection.bic
        self.df_ = result.df
        self.n_ = result.n
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        self.n_features_in_ = len(names)
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit before using this estimator")

    def _design_for(self, X):
        self._check_fitted()
        cols = _table_columns(X)
        missing = [n for n in self.covariate_names_ if n not in cols]
        if missing:
            raise DataError(f"covariates not present in X: {missing}")
        n = len(next(iter(cols.values()))) if cols else 0
        dataset = dataset_from_columns(
            np.ones(max(n, 1)), {name: cols[name] for name in self.covariate_names_},
            declared=self.design_info_,
        )
        return encode(dataset, list(self.covariate_names_), require_variation=False)

    def predict(self, X, quantile=0.5):
        """Conditional severity quantiles, one per row (default: the median)."""
        design = self._design_for(X)
        comp = build_composite(self.result_.params_hat, design)
        return np.asarray(comp.quantile(quantile), dtype=float)

    def predict_threshold(self, X):
        """Per-row splice threshold (the tail mode under the fitted model)."""
        design = self._design_for(X)
        comp = build_composite(self.result_.params_hat, design)
        return np.broadcast_to(np.asarray(comp.derived.y_mo, dtype=float), (design.n,)).copy()

    def sample(self, X, random_state=None):
        """Draw one response per row of X from the fitted conditional model."""
        design = self._design_for(X)
        comp = build_composite(self.result_.params_hat, design)
        seed = self.random_state if random_state is None else random_state
        u = np.random.Generator(np.random.Philox(seed)).random(design.n)
        return np.asarray(comp.quantile(u), dtype=float)

    def quantile_residuals(self, X, y):
        """Normalized quantile residuals of y under the fitted model."""
        design = self._design_for(X)
        return quantile_residuals(self.result_, np.asarray(y, dtype=float), design)

    def summary(self) -> str:
        self._check_fitted()
        lines = [
            f"CompositeSeverityRegressor(family={self.family!r})",
            f"n = {self.n_}, df = {self.df_}, converged = {self.converged_}",
            f"NLL = {self.nll_:.4f}, AIC = {self.aic_:.4f}, BIC = {self.bic_:.4f}",
        ]
        shapes = [("sigma", self.sigma_), ("alpha", self.alpha_)]
        if family_has_delta(self.family):
            shapes.append(("delta", self.delta_))
        header = f"{'term':<24}{'estimate':>12}{'std err':>12}{'t':>10}{'p':>10}"
        lines += ["", header, "-" * len(header)]
        se = self.std_errors_
        for j, (name, value) in enumerate(shapes):
            se_txt = f"{se[j]:>12.4f}" if se is not None else f"{'--':>12}"
            lines.append(f"{name:<24}{value:>12.4f}{se_txt}{'--':>10}{'--':>10}")
        try:
            tests = coefficient_tests(self.result_, _DesignView(self.coef_names_),
                                      self.alpha_level)
        except StdErrorsUnavailable:
            tests = None
        for j, name in enumerate(self.coef_names_):
            if tests is None:
                lines.append(f"{name:<24}{self.coef_[j]:>12.4f}{'--':>12}{'--':>10}{'--':>10}")
            else:
                t = tests[j]
                flag = " *" if t.significant else ""
                lines.append(
                    f"{name:<24}{t.estimate:>12.4f}{t.std_error:>12.4f}"
                    f"{t.t_ratio:>10.4f}{t.p_value:>10.4g}{flag}"
                )
        return "\n".join(lines)


class _DesignView:
    """Just enough of a design matrix for coefficient_tests (names and p)."""

    def __init__(self, column_names):
        self.column_names = tuple(column_names)

    @property
    def p(self) -> int:
        return len(self.column_names)
