"""Model selection and adequacy checks.

AIC/BIC from the fitted negative log likelihood, per-coefficient t-ratios
against a Student-t reference with n - p degrees of freedom, and
normalized quantile residuals (standard-normal quantiles of the fitted
per-observation cdf) with QQ-plot data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as _sp
from scipy import stats as _stats

from .exceptions import DataError, StdErrorsUnavailable
from .families import family_has_delta
from .regression import Dataset, DesignMatrix, ModelParams, build_composite


@dataclass(frozen=True)
class SelectionReport:
    nll: float
    df: int
    n: float
    aic: float
    bic: float


def selection_report(nll: float, df: int, n) -> SelectionReport:
    """AIC = 2*nll + 2*df, BIC = 2*nll + log(n)*df (nll is the *negative* maximum)."""
    if df < 1:
        raise DataError("df must be at least 1")
    if n < 1:
        raise DataError("n must be at least 1")
    nll = float(nll)
    return SelectionReport(
        nll=nll,
        df=int(df),
        n=n,
        aic=2.0 * nll + 2.0 * df,
        bic=2.0 * nll + float(np.log(n)) * df,
    )


@dataclass(frozen=True)
class CoefficientTest:
    name: str
    estimate: float
    std_error: float
    t_ratio: float
    p_value: float
    significant: bool


def t_sf(x, dof: float):
    """Student-t survival function via the regularized incomplete beta."""
    x = np.asarray(x, dtype=float)
    out = _stats.t.sf(x, dof)
    return out if np.ndim(out) else float(out)


def coefficient_tests(fit, design: DesignMatrix, alpha_level: float = 0.05) -> list[CoefficientTest]:
    """Two-sided t tests of each regression coefficient against zero.

    Degrees of freedom are n - p with p the number of regression
    coefficients.  Withheld (raises) when the fit carries no standard
    errors.
    """
    if fit.std_errors is None:
        raise StdErrorsUnavailable("standard errors unavailable; tests withheld")
    params = fit.params_hat
    offset = 3 if family_has_delta(params.family) else 2
    dof = fit.n - design.p
    out = []
    for j, name in enumerate(design.column_names):
        est = float(params.gamma[j])
        se = float(fit.std_errors[offset + j])
        t = est / se
        p = 2.0 * t_sf(abs(t), dof)
        out.append(CoefficientTest(
            name=name, estimate=est, std_error=se, t_ratio=t,
            p_value=float(p), significant=bool(p < alpha_level),
        ))
    return out


@dataclass(frozen=True, eq=False)
class ResidualSet:
    """Normalized quantile residuals and their QQ pairing.

    Residuals whose fitted cdf saturated to 0 or 1 are kept as -inf/+inf
    in ``k`` but excluded from the QQ pairs; ``n_saturated`` counts them.
    """

    k: np.ndarray
    qq_theoretical: np.ndarray
    qq_empirical: np.ndarray
    n_saturated: int
    cdf_values: np.ndarray


def quantile_residuals(fit, dataset, design: DesignMatrix) -> ResidualSet:
    """k_i = Phi^{-1}(F(y_i)) under the fitted per-observation composite cdf."""
    params = fit.params_hat if hasattr(fit, "params_hat") else fit
    if not isinstance(params, ModelParams):
        raise DataError("expected a FitResult or ModelParams")
    y = dataset.y if isinstance(dataset, Dataset) else np.asarray(dataset, dtype=float)
    comp = build_composite(params, design)
    f = np.asarray(comp.cdf(y), dtype=float)
    k = np.empty_like(f)
    interior = (f > 0.0) & (f < 1.0)
    k[interior] = _sp.ndtri(f[interior])
    k[f <= 0.0] = -np.inf
    k[f >= 1.0] = np.inf
    finite = np.sort(k[interior])
    m = finite.size
    positions = (np.arange(1, m + 1) - 0.5) / m if m else np.empty(0)
    return ResidualSet(
        k=k,
        qq_theoretical=_sp.ndtri(positions) if m else np.empty(0),
        qq_empirical=finite,
        n_saturated=int(k.size - m),
        cdf_values=f,
    )
