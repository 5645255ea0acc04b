"""The four base families: Lognormal head and Burr / Stoppa / GlogM tails.

Each family exposes ``pdf``/``logpdf``/``cdf``/``sf``/``quantile``/``isf``
and a closed-form ``mode``.  All densities are evaluated in log space:
terms like ``(y*beta)**alpha`` overflow quickly, so powers become
``alpha * log(y*beta)`` and the ``+1`` terms go through ``logaddexp`` /
``log1p``.  Likelihoods sum thousands of log densities, so this is not
optional hygiene.

Parameters may be scalars or arrays (NumPy broadcasting applies); in the
regression setting the scale ``beta`` is a per-observation vector.

Parameterization warning
------------------------
``Burr.beta`` multiplies ``y`` inside the density, i.e. it acts as a
*rate*: larger ``beta`` shifts mass toward zero and the mode is
proportional to ``1/beta``.  Many references use a divisor instead; do
not swap conventions when comparing against other software.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .exceptions import DomainError, ModeUndefinedError, ParameterError
from .special import erf_inv, log_erfc, norm_quantile

_LOG_SQRT_2PI = 0.5 * float(np.log(2.0 * np.pi))
_SQRT2 = float(np.sqrt(2.0))
_LOG2 = float(np.log(2.0))


def _as_float(x):
    a = np.asarray(x, dtype=float)
    return a if a.ndim else a[()]


def _maybe_scalar(a):
    return a if np.ndim(a) else float(a)


def _check_positive(value, name: str) -> None:
    v = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
        raise ParameterError(f"{name} must be positive and finite")


def _check_prob_open(p, what: str):
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0) or not np.all(np.isfinite(p)):
        raise DomainError(f"{what} requires values in the open interval (0, 1)")
    return p


def _check_support(y, low, name: str, *, closed: bool = False):
    y = np.asarray(y, dtype=float)
    bad = ~np.isfinite(y) | ((y < low) if closed else (y <= low))
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise DomainError(f"{name}: argument outside support at position {idx}")
    return y


def _log1mexp(a):
    """log(1 - exp(a)) for a <= 0, split at -log(2) to keep full precision."""
    a = np.asarray(a, dtype=float)
    scalar = a.ndim == 0
    a = np.atleast_1d(a)
    out = np.empty_like(a)
    small = a > -_LOG2  # exp(a) close to 1
    with np.errstate(divide="ignore"):
        out[small] = np.log(-np.expm1(a[small]))
        out[~small] = np.log1p(-np.exp(a[~small]))
    return out.reshape(()) if scalar else out


def _logexpm1(w):
    """log(exp(w) - 1) for w > 0 without overflow."""
    w = np.asarray(w, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    out = np.empty_like(w)
    big = w > _LOG2
    out[big] = w[big] + np.log1p(-np.exp(-w[big]))
    out[~big] = np.log(np.expm1(w[~big]))
    return out.reshape(()) if scalar else out


class _Family:
    """Shared plumbing: pdf from logpdf, parameter subsetting."""

    def pdf(self, y):
        with np.errstate(over="ignore"):
            return _maybe_scalar(np.exp(self.logpdf(y)))

    def take(self, idx):
        """Family with parameters restricted to index/mask ``idx`` (arrays only)."""
        kwargs = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            kwargs[f.name] = np.asarray(v, dtype=float)[idx] if np.ndim(v) > 0 else v
        return type(self)(**kwargs)


@dataclass(frozen=True, eq=False)
class Lognormal(_Family):
    """Lognormal with log-scale location ``mu`` and spread ``sigma`` > 0."""

    mu: object
    sigma: object

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        if not np.all(np.isfinite(mu)):
            raise ParameterError("mu must be finite")
        _check_positive(self.sigma, "sigma")

    def _z(self, y):
        return (np.log(y) - self.mu) / self.sigma

    def logpdf(self, y):
        y = _check_support(y, 0.0, "lognormal")
        z = self._z(y)
        return _maybe_scalar(-0.5 * z * z - _LOG_SQRT_2PI - np.log(y) - np.log(self.sigma))

    def cdf(self, y):
        y = _check_support(y, 0.0, "lognormal")
        return _maybe_scalar(_sp.ndtr(self._z(y)))

    def logcdf(self, y):
        y = _check_support(y, 0.0, "lognormal")
        return _maybe_scalar(_sp.log_ndtr(self._z(y)))

    def sf(self, y):
        y = _check_support(y, 0.0, "lognormal")
        return _maybe_scalar(_sp.ndtr(-self._z(y)))

    def logsf(self, y):
        y = _check_support(y, 0.0, "lognormal")
        return _maybe_scalar(_sp.log_ndtr(-self._z(y)))

    def quantile(self, p):
        p = _check_prob_open(p, "lognormal quantile")
        return _maybe_scalar(np.exp(self.mu + self.sigma * _sp.ndtri(p)))

    def isf(self, s):
        s = _check_prob_open(s, "lognormal isf")
        return _maybe_scalar(np.exp(self.mu - self.sigma * _sp.ndtri(s)))

    def mode(self):
        return _maybe_scalar(np.exp(np.asarray(self.mu, dtype=float) - np.square(self.sigma)))


@dataclass(frozen=True, eq=False)
class Burr(_Family):
    """Burr with shapes ``alpha``, ``delta`` and rate-like scale ``beta``.

    Density ``delta*alpha*y**(alpha-1)*beta**alpha / ((y*beta)**alpha + 1)**(delta+1)``
    on y > 0; the survival function is ``((y*beta)**alpha + 1)**(-delta)``.
    The mode exists only for ``alpha > 1``.
    """

    alpha: object
    delta: object
    beta: object

    def __post_init__(self):
        _check_positive(self.alpha, "alpha")
        _check_positive(self.delta, "delta")
        _check_positive(self.beta, "beta")

    def _t(self, y):
        # t = alpha * log(y*beta); (y*beta)**alpha == exp(t)
        return self.alpha * (np.log(y) + np.log(self.beta))

    def logpdf(self, y):
        y = _check_support(y, 0.0, "burr")
        t = self._t(y)
        return _maybe_scalar(
            np.log(self.delta) + np.log(self.alpha) + t - np.log(y)
            - (self.delta + 1.0) * np.logaddexp(t, 0.0)
        )

    def logsf(self, y):
        y = _check_support(y, 0.0, "burr")
        return _maybe_scalar(-np.asarray(self.delta, dtype=float) * np.logaddexp(self._t(y), 0.0))

    def sf(self, y):
        return _maybe_scalar(np.exp(self.logsf(y)))

    def cdf(self, y):
        return _maybe_scalar(-np.expm1(self.logsf(y)))

    def logcdf(self, y):
        return _maybe_scalar(_log1mexp(np.asarray(self.logsf(y), dtype=float)))

    def quantile(self, p):
        p = _check_prob_open(p, "burr quantile")
        w = -np.log1p(-p) / self.delta  # (1-p)**(-1/delta) == exp(w)
        return _maybe_scalar(np.exp(_logexpm1(w) / self.alpha - np.log(self.beta)))

    def isf(self, s):
        s = _check_prob_open(s, "burr isf")
        w = -np.log(s) / self.delta
        return _maybe_scalar(np.exp(_logexpm1(w) / self.alpha - np.log(self.beta)))

    def mode(self):
        alpha = np.asarray(self.alpha, dtype=float)
        if np.any(alpha <= 1.0):
            raise ModeUndefinedError("burr mode requires alpha > 1")
        return _maybe_scalar(
            np.exp(np.log((alpha - 1.0) / (self.delta * alpha + 1.0)) / alpha - np.log(self.beta))
        )


@dataclass(frozen=True, eq=False)
class Stoppa(_Family):
    """Stoppa with shapes ``alpha``, ``delta`` and lower support bound ``beta``.

    cdf ``(1 - (y/beta)**(-delta))**alpha`` on y > beta.  cdf/pdf accept
    y == beta (cdf 0, pdf its limiting value); smaller arguments raise.
    The mode exists only for ``alpha > 1``.
    """

    alpha: object
    delta: object
    beta: object

    def __post_init__(self):
        _check_positive(self.alpha, "alpha")
        _check_positive(self.delta, "delta")
        _check_positive(self.beta, "beta")

    def _logv(self, y):
        # v = (y/beta)**(-delta) in (0, 1]; log v <= 0
        return -np.asarray(self.delta, dtype=float) * (np.log(y) - np.log(self.beta))

    def logpdf(self, y):
        y = _check_support(y, np.asarray(self.beta, dtype=float), "stoppa", closed=True)
        log1mv = _log1mexp(self._logv(y))
        alpha = np.asarray(self.alpha, dtype=float)
        with np.errstate(invalid="ignore"):
            shape_term = np.where(alpha == 1.0, 0.0, (alpha - 1.0) * log1mv)
        return _maybe_scalar(
            np.log(alpha) + np.log(self.delta) + self.delta * np.log(self.beta)
            - (self.delta + 1.0) * np.log(y) + shape_term
        )

    def logcdf(self, y):
        y = _check_support(y, np.asarray(self.beta, dtype=float), "stoppa", closed=True)
        with np.errstate(invalid="ignore"):
            return _maybe_scalar(self.alpha * _log1mexp(self._logv(y)))

    def cdf(self, y):
        with np.errstate(over="ignore"):
            return _maybe_scalar(np.exp(self.logcdf(y)))

    def sf(self, y):
        return _maybe_scalar(-np.expm1(np.asarray(self.logcdf(y), dtype=float)))

    def logsf(self, y):
        return _maybe_scalar(_log1mexp(np.asarray(self.logcdf(y), dtype=float)))

    def quantile(self, p):
        p = _check_prob_open(p, "stoppa quantile")
        inner = -np.expm1(np.log(p) / self.alpha)  # 1 - p**(1/alpha)
        return _maybe_scalar(self.beta * np.exp(-np.log(inner) / self.delta))

    def isf(self, s):
        s = _check_prob_open(s, "stoppa isf")
        inner = -np.expm1(np.log1p(-s) / self.alpha)
        return _maybe_scalar(self.beta * np.exp(-np.log(inner) / self.delta))

    def mode(self):
        alpha = np.asarray(self.alpha, dtype=float)
        if np.any(alpha <= 1.0):
            raise ModeUndefinedError("stoppa mode requires alpha > 1")
        return _maybe_scalar(
            self.beta * np.exp(np.log((1.0 + alpha * self.delta) / (1.0 + self.delta)) / self.delta)
        )


@dataclass(frozen=True, eq=False)
class GlogM(_Family):
    """Generalized log-Moyal with tail-heaviness ``alpha`` and scale ``beta``.

    With t = (beta/y)**(1/(2*alpha)), the cdf is 1 - erf(t/sqrt(2)) on
    y > 0; the survival function erf(t/sqrt(2)) stays accurate far into
    the tail because erf vanishes linearly at 0.
    """

    alpha: object
    beta: object

    def __post_init__(self):
        _check_positive(self.alpha, "alpha")
        _check_positive(self.beta, "beta")

    def _w(self, y):
        # w = log(beta/y) / alpha; (beta/y)**(1/alpha) == exp(w)
        return (np.log(self.beta) - np.log(y)) / self.alpha

    def logpdf(self, y):
        y = _check_support(y, 0.0, "glogm")
        w = self._w(y)
        with np.errstate(over="ignore"):
            return _maybe_scalar(
                0.5 * w - np.log(y) - np.log(self.alpha) - _LOG_SQRT_2PI - 0.5 * np.exp(w)
            )

    def _t(self, y):
        with np.errstate(over="ignore"):
            return np.exp(0.5 * self._w(y))

    def cdf(self, y):
        y = _check_support(y, 0.0, "glogm")
        return _maybe_scalar(_sp.erfc(self._t(y) / _SQRT2))

    def logcdf(self, y):
        y = _check_support(y, 0.0, "glogm")
        return _maybe_scalar(log_erfc(self._t(y) / _SQRT2))

    def sf(self, y):
        y = _check_support(y, 0.0, "glogm")
        return _maybe_scalar(_sp.erf(self._t(y) / _SQRT2))

    def logsf(self, y):
        with np.errstate(divide="ignore"):
            return _maybe_scalar(np.log(self.sf(y)))

    def quantile(self, p):
        p = _check_prob_open(p, "glogm quantile")
        # cdf == 2*Phi(-t), so t at probability p is -ndtri(p/2); this equals
        # sqrt(2)*erfinv(1-p) but stays accurate for tiny p
        t = -_sp.ndtri(0.5 * np.asarray(p, dtype=float))
        return _maybe_scalar(self.beta * np.exp(-2.0 * self.alpha * np.log(t)))

    def isf(self, s):
        s = _check_prob_open(s, "glogm isf")
        t = _SQRT2 * erf_inv(s)
        return _maybe_scalar(self.beta * np.exp(-2.0 * self.alpha * np.log(t)))

    def mode(self):
        alpha = np.asarray(self.alpha, dtype=float)
        return _maybe_scalar(self.beta * np.exp(-alpha * np.log1p(2.0 * alpha)))


TAIL_FAMILIES = {"burr": Burr, "stoppa": Stoppa, "glogm": GlogM}

# families whose mode formula needs alpha > 1
ALPHA_GT_ONE = frozenset({"burr", "stoppa"})


def family_has_delta(family: str) -> bool:
    return family in ("burr", "stoppa")


def mode_increases_with_beta(family: str) -> bool:
    """True when the tail mode grows with beta (Burr's beta is a rate)."""
    return family != "burr"


def make_tail(family: str, alpha, beta, delta=None):
    """Build a tail-family instance from loose parameters.

    ``delta`` is required for burr/stoppa and must be omitted for glogm.
    """
    if family not in TAIL_FAMILIES:
        raise ParameterError(f"unknown tail family {family!r}")
    if family_has_delta(family):
        if delta is None:
            raise ParameterError(f"{family} requires a delta parameter")
        return TAIL_FAMILIES[family](alpha=alpha, delta=delta, beta=beta)
    if delta is not None:
        raise ParameterError("glogm has no delta parameter")
    return GlogM(alpha=alpha, beta=beta)
