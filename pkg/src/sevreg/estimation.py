"""Maximum likelihood fitting.

Constrained parameters are mapped to the real line (log for sigma/delta,
log(alpha - 1) where the composite needs alpha > 1, log(alpha) otherwise),
a quasi-Newton (BFGS) search runs unconstrained with central-difference
gradients, and the estimates are mapped back.  Standard errors come from
the inverse of the numerical Hessian of the negative log likelihood taken
on the *original* parameter scale at the optimum; a Hessian that fails its
Cholesky factorization withholds the covariance instead of guessing.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .exceptions import DomainError, NumericError, ParameterError
from .regression import Dataset, DesignMatrix, ModelParams, neg_log_likelihood
from .families import family_has_delta

_EPS_THIRD = float(np.finfo(float).eps) ** (1.0 / 3.0)
_EPS_FOURTH = float(np.finfo(float).eps) ** 0.25


@dataclass(frozen=True)
class FitControls:
    """Optimizer settings; the defaults are the documented contract."""

    gtol: float = 1e-6
    ftol_rel: float = 1e-10
    max_iter: int = 500
    n_starts: int = 5
    jitter: float = 0.25
    seed: int = 12345
    threads: int | None = None  # falls back to SEVERITY_THREADS, then 1


@dataclass(frozen=True, eq=False)
class FitResult:
    """Estimates with uncertainty and convergence metadata.

    ``std_errors`` / ``covariance`` are None when the Hessian was singular
    or not positive definite.  ``gradient_norm`` is the infinity norm of
    the central-difference gradient in the unconstrained space.
    """

    params_hat: ModelParams
    param_names: tuple[str, ...]
    covariance: np.ndarray | None
    std_errors: np.ndarray | None
    nll: float
    converged: bool
    iterations: int
    gradient_norm: float
    n: int
    df: int
    n_starts: int
    n_distinct_optima: int

    @property
    def family(self) -> str:
        return self.params_hat.family


def to_unconstrained(params: ModelParams) -> np.ndarray:
    """[log sigma, transformed alpha, (log delta), gamma...]."""
    head = [np.log(params.sigma)]
    if params.family in ("burr", "stoppa"):
        if params.alpha <= 1.0:
            raise ParameterError("alpha must exceed 1 to be transformed")
        head.append(np.log(params.alpha - 1.0))
        head.append(np.log(params.delta))
    else:
        head.append(np.log(params.alpha))
    return np.concatenate([head, params.gamma])


def from_unconstrained(t, family: str, p: int) -> ModelParams:
    t = np.asarray(t, dtype=float)
    k = n_free_params(family, p)
    if t.shape != (k,):
        raise ParameterError(f"expected {k} unconstrained parameters, got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ParameterError("unconstrained parameters must be finite")
    with np.errstate(over="ignore"):
        sigma = float(np.exp(t[0]))
        if family_has_delta(family):
            alpha = float(np.exp(t[1])) + 1.0
            delta = float(np.exp(t[2]))
            gamma = t[3:]
        else:
            alpha = float(np.exp(t[1]))
            delta = None
            gamma = t[2:]
    return ModelParams(family=family, sigma=sigma, alpha=alpha, delta=delta, gamma=gamma)


def n_free_params(family: str, p: int) -> int:
    return p + (3 if family_has_delta(family) else 2)


def param_names(family: str, design: DesignMatrix) -> tuple[str, ...]:
    shapes = ("sigma", "alpha", "delta") if family_has_delta(family) else ("sigma", "alpha")
    return shapes + tuple(design.column_names)


def params_to_vector(params: ModelParams) -> np.ndarray:
    """Original-scale stacking matching :func:`param_names`."""
    shapes = [params.sigma, params.alpha]
    if family_has_delta(params.family):
        shapes.append(params.delta)
    return np.concatenate([shapes, params.gamma])


def params_from_vector(vec, family: str, p: int) -> ModelParams:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (n_free_params(family, p),):
        raise ParameterError("parameter vector has the wrong length")
    if family_has_delta(family):
        return ModelParams(family=family, sigma=float(vec[0]), alpha=float(vec[1]),
                           delta=float(vec[2]), gamma=vec[3:])
    return ModelParams(family=family, sigma=float(vec[0]), alpha=float(vec[1]),
                       delta=None, gamma=vec[2:])


def _steps(x: np.ndarray) -> np.ndarray:
    return _EPS_THIRD * np.maximum(1.0, np.abs(x))


def central_gradient(f, x) -> np.ndarray:
    """Two-sided finite-difference gradient, per-coordinate relative steps."""
    x = np.asarray(x, dtype=float)
    h = _steps(x)
    g = np.empty_like(x)
    for j in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[j] = x[j] + h[j]
        xm[j] = x[j] - h[j]
        g[j] = (f(xp) - f(xm)) / (xp[j] - xm[j])
    return g


def numerical_hessian(objective, point, step_rule=None) -> np.ndarray:
    """Central-difference Hessian, symmetric by construction.

    ``step_rule(point) -> steps`` overrides the default per-coordinate
    steps ``eps**(1/4) * max(1, |x_j|)``.  A second difference divides by
    h**2, so its roundoff floor is ~4*eps*|f|/h**2; the quarter-power step
    balances that against the O(h**2) truncation term.
    """
    x = np.asarray(point, dtype=float)
    h = (np.asarray(step_rule(x), dtype=float) if step_rule is not None
         else _EPS_FOURTH * np.maximum(1.0, np.abs(x)))
    k = x.size
    f0 = objective(x)
    hess = np.empty((k, k), dtype=float)
    for j in range(k):
        xp = x.copy(); xp[j] += h[j]
        xm = x.copy(); xm[j] -= h[j]
        hess[j, j] = (objective(xp) - 2.0 * f0 + objective(xm)) / (h[j] * h[j])
        if not np.isfinite(hess[j, j]):
            raise NumericError(f"non-finite Hessian entry at coordinates ({j}, {j})")
    for j in range(k):
        for l in range(j + 1, k):
            xpp = x.copy(); xpp[j] += h[j]; xpp[l] += h[l]
            xpm = x.copy(); xpm[j] += h[j]; xpm[l] -= h[l]
            xmp = x.copy(); xmp[j] -= h[j]; xmp[l] += h[l]
            xmm = x.copy(); xmm[j] -= h[j]; xmm[l] -= h[l]
            val = (objective(xpp) - objective(xpm) - objective(xmp) + objective(xmm)) / (4.0 * h[j] * h[l])
            if not np.isfinite(val):
                raise NumericError(f"non-finite Hessian entry at coordinates ({j}, {l})")
            hess[j, l] = val
            hess[l, j] = val
    return hess


def _empirical_mode(y: np.ndarray) -> float:
    """Center of the fullest log-scale histogram bin."""
    ly = np.log(y)
    if np.ptp(ly) == 0.0:
        return float(y[0])
    counts, edges = np.histogram(ly, bins="sturges")
    j = int(np.argmax(counts))
    return float(np.exp(0.5 * (edges[j] + edges[j + 1])))


def default_init(y, design: DesignMatrix, family: str) -> ModelParams:
    """Start near the empirical mode so both branches are populated.

    The intercept is chosen so the implied initial threshold sits at the
    histogram mode; the sign of the adjustment flips for Burr because its
    mode shrinks as beta grows.
    """
    y = np.asarray(y, dtype=float)
    sigma0 = float(np.std(np.log(y), ddof=1)) if y.size > 1 else 1.0
    if not np.isfinite(sigma0) or sigma0 < 0.05:
        sigma0 = max(sigma0, 0.05) if np.isfinite(sigma0) else 1.0
    t0 = _empirical_mode(y)
    gamma0 = np.zeros(design.p)
    if family == "burr":
        alpha0, delta0 = 2.0, 1.0
        gamma0[0] = np.log((alpha0 - 1.0) / (delta0 * alpha0 + 1.0)) / alpha0 - np.log(t0)
    elif family == "stoppa":
        alpha0, delta0 = 2.0, 1.0
        gamma0[0] = np.log(t0) - np.log((1.0 + alpha0 * delta0) / (1.0 + delta0)) / delta0
    elif family == "glogm":
        alpha0, delta0 = 1.0, None
        gamma0[0] = np.log(t0) + alpha0 * np.log1p(2.0 * alpha0)
    else:
        raise ParameterError(f"unknown tail family {family!r}")
    return ModelParams(family=family, sigma=sigma0, alpha=alpha0, delta=delta0, gamma=gamma0)


def _standardized_design(design: DesignMatrix):
    """Z-score numeric columns; constant columns are left alone."""
    idx = design.numeric_column_indices()
    m = design.matrix.copy()
    means = np.zeros(design.p)
    sds = np.ones(design.p)
    for j in idx:
        sd = float(np.std(m[:, j]))
        if sd > 0.0:
            means[j] = float(np.mean(m[:, j]))
            sds[j] = sd
            m[:, j] = (m[:, j] - means[j]) / sd
    std = DesignMatrix(matrix=m, column_names=design.column_names,
                       terms=design.terms, covariates=design.covariates)
    return std, means, sds


def _destandardize_gamma(gamma_std: np.ndarray, means: np.ndarray, sds: np.ndarray) -> np.ndarray:
    gamma = gamma_std / sds
    gamma[0] = gamma_std[0] - float(np.sum(gamma_std[1:] * means[1:] / sds[1:]))
    return gamma


def _resolve_threads(controls: FitControls) -> int:
    if controls.threads is not None:
        return max(1, int(controls.threads))
    env = os.environ.get("SEVERITY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            return 1
    return 1


def _minimize_start(obj, grad, t0, controls: FitControls):
    history = [obj(t0)]
    res = minimize(
        obj, t0, jac=grad, method="BFGS",
        callback=lambda xk: history.append(obj(xk)),
        options={"gtol": controls.gtol, "maxiter": controls.max_iter},
    )
    return res, history


def fit(dataset, design: DesignMatrix, family: str,
        init: ModelParams | None = None,
        controls: FitControls | None = None,
        standardize: bool = False) -> FitResult:
    """Maximize the composite likelihood; returns estimates, SEs and metadata.

    Multi-start: the first start is ``init`` (or the data-driven default),
    the rest are seeded jitters of it in the unconstrained space; the best
    final NLL wins, ties broken by start index.
    """
    controls = controls or FitControls()
    y = dataset.y if isinstance(dataset, Dataset) else np.asarray(dataset, dtype=float)
    if y.shape != (design.n,):
        raise ParameterError("response vector does not match the design matrix")

    fit_design = design
    means = sds = None
    if standardize:
        fit_design, means, sds = _standardized_design(design)

    if init is None:
        init = default_init(y, fit_design, family)
    elif init.family != family:
        raise ParameterError("init parameters belong to a different family")

    p = fit_design.p

    def obj(t):
        try:
            return neg_log_likelihood(from_unconstrained(t, family, p), y, fit_design)
        except (NumericError, ParameterError, DomainError):
            return float("inf")

    def grad(t):
        return central_gradient(obj, t)

    t0 = to_unconstrained(init)
    if not np.isfinite(obj(t0)):
        raise NumericError("likelihood is not finite at the starting point")

    rng = np.random.Generator(np.random.Philox(controls.seed))
    starts = [t0]
    for _ in range(max(0, controls.n_starts - 1)):
        starts.append(t0 + controls.jitter * rng.standard_normal(t0.size))

    workers = min(_resolve_threads(controls), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda s: _minimize_start(obj, grad, s, controls), starts))
    else:
        outcomes = [_minimize_start(obj, grad, s, controls) for s in starts]

    finite = [(res.fun, i) for i, (res, _) in enumerate(outcomes) if np.isfinite(res.fun)]
    if not finite:
        raise NumericError("no start produced a finite likelihood")
    _, best_idx = min(finite)
    best_res, best_hist = outcomes[best_idx]

    nlls = sorted(f for f, _ in finite)
    distinct = 1
    for a, b in zip(nlls, nlls[1:]):
        if b - a > 1e-8 * max(1.0, abs(b)):
            distinct += 1

    g = central_gradient(obj, best_res.x)
    gradient_norm = float(np.max(np.abs(g))) if np.all(np.isfinite(g)) else float("inf")
    rel_change = (
        abs(best_hist[-1] - best_hist[-2]) / max(1.0, abs(best_hist[-1]))
        if len(best_hist) >= 2 else float("inf")
    )
    converged = bool(best_res.success) or gradient_norm <= controls.gtol or rel_change <= controls.ftol_rel

    params_hat = from_unconstrained(best_res.x, family, p)
    if standardize:
        params_hat = replace(params_hat, gamma=_destandardize_gamma(params_hat.gamma, means, sds))
    nll = neg_log_likelihood(params_hat, y, design)

    vec_hat = params_to_vector(params_hat)

    def obj_original(v):
        try:
            return neg_log_likelihood(params_from_vector(v, family, design.p), y, design)
        except (NumericError, ParameterError, DomainError):
            return float("inf")

    covariance = std_errors = None
    try:
        hess = numerical_hessian(obj_original, vec_hat)
        chol = scipy.linalg.cho_factor(hess)
        covariance = scipy.linalg.cho_solve(chol, np.eye(vec_hat.size))
        covariance = 0.5 * (covariance + covariance.T)
        std_errors = np.sqrt(np.diag(covariance))
    except (NumericError, scipy.linalg.LinAlgError):
        covariance = std_errors = None

    return FitResult(
        params_hat=params_hat,
        param_names=param_names(family, design),
        covariance=covariance,
        std_errors=std_errors,
        nll=nll,
        converged=converged,
        iterations=int(best_res.nit),
        gradient_norm=gradient_norm,
        n=int(y.size),
        df=n_free_params(family, design.p),
        n_starts=len(starts),
        n_distinct_optima=distinct,
    )
