"""Mode-matched splice of a Lognormal head with a heavy tail.

The splice threshold is the tail family's mode ``y_mo``.  Forcing the
head's mode to sit there fixes the head location at
``mu = sigma**2 + log(y_mo)`` and density continuity at the threshold
fixes the head mass

    r = f_T(y_mo) F_H(y_mo) / (f_T(y_mo) F_H(y_mo) + f_H(y_mo) (1 - F_T(y_mo))),

with F_H/f_H the Lognormal(mu, sigma) cdf/pdf.  Because of the mode
match, F_H(y_mo) collapses to Phi(-sigma), and r is computed here as a
sigmoid of a log-odds so it lands strictly inside (0, 1) and its log is
available without cancellation.

``tail.beta`` may be a vector, giving one threshold/weight per
observation; every operation broadcasts accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import special as _sp

from .exceptions import NumericError, ParameterError
from .families import ALPHA_GT_ONE, Burr, GlogM, Lognormal, Stoppa, _check_prob_open, _check_support

_TAIL_TYPES = (Burr, Stoppa, GlogM)


@dataclass(frozen=True, eq=False)
class CompositeDerived:
    """Quantities fixed by mode matching: threshold, head location, head mass.

    ``log_head_norm`` is log F_H(y_mo) = log Phi(-sigma) and
    ``log_tail_norm`` is log(1 - F_T(y_mo)); both are cached because every
    density evaluation divides by them.
    """

    y_mo: object
    mu: object
    r: object
    log_r: object
    log_one_minus_r: object
    log_head_norm: object
    log_tail_norm: object


def _first_bad_row(*arrays) -> int | None:
    for a in arrays:
        bad = ~np.isfinite(np.atleast_1d(np.asarray(a, dtype=float)))
        if np.any(bad):
            return int(np.argmax(bad))
    return None


@dataclass(frozen=True, eq=False)
class CompositeLognormal:
    """Composite distribution with Lognormal head and ``tail`` above its mode."""

    sigma: object
    tail: object

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0.0):
            raise ParameterError("sigma must be positive and finite")
        if not isinstance(self.tail, _TAIL_TYPES):
            raise ParameterError("tail must be a Burr, Stoppa or GlogM instance")
        if isinstance(self.tail, (Burr, Stoppa)) and np.any(np.asarray(self.tail.alpha) <= 1.0):
            raise ParameterError("composite with burr/stoppa tail requires alpha > 1")

    @cached_property
    def derived(self) -> CompositeDerived:
        """Threshold, reduced head location, and continuity weight (broadcast over beta)."""
        sigma = np.asarray(self.sigma, dtype=float)
        y_mo = np.asarray(self.tail.mode(), dtype=float)
        mu = sigma * sigma + np.log(y_mo)
        log_head_norm = _sp.log_ndtr(-sigma)
        log_tail_norm = np.asarray(self.tail.logsf(y_mo), dtype=float)
        log_f_head = np.asarray(Lognormal(mu, sigma).logpdf(y_mo), dtype=float)
        log_f_tail = np.asarray(self.tail.logpdf(y_mo), dtype=float)
        log_odds = log_f_tail + log_head_norm - log_f_head - log_tail_norm
        row = _first_bad_row(y_mo, mu, log_odds)
        if row is not None or np.any(~np.isfinite(np.atleast_1d(log_odds))):
            raise NumericError("non-finite quantity while deriving the composite", row=row)
        r = _sp.expit(log_odds)
        if np.any(np.atleast_1d(r) <= 0.0) or np.any(np.atleast_1d(r) >= 1.0):
            raise NumericError(
                "mixing weight reached the boundary of (0, 1)",
                row=int(np.argmax(np.atleast_1d((r <= 0.0) | (r >= 1.0)))),
            )
        return CompositeDerived(
            y_mo=y_mo,
            mu=mu,
            r=r,
            log_r=_sp.log_expit(log_odds),
            log_one_minus_r=_sp.log_expit(-log_odds),
            log_head_norm=log_head_norm,
            log_tail_norm=log_tail_norm,
        )

    def _head(self) -> Lognormal:
        return Lognormal(self.derived.mu, self.sigma)

    def logpdf(self, y, ties: str = "head"):
        """Log density; ``ties`` picks the branch charged when y == y_mo.

        The distribution itself assigns the threshold to the head; the
        likelihood convention assigns it to the tail.
        """
        if ties not in ("head", "tail"):
            raise ValueError("ties must be 'head' or 'tail'")
        y = _check_support(y, 0.0, "composite")
        d = self.derived
        y_b, y_mo, mu, log_r, log_1mr, lhn, ltn, sigma = np.broadcast_arrays(
            y, d.y_mo, d.mu, d.log_r, d.log_one_minus_r, d.log_head_norm,
            d.log_tail_norm, np.asarray(self.sigma, dtype=float),
        )
        scalar = y_b.ndim == 0
        y_b = np.atleast_1d(y_b)
        head = np.atleast_1d((y_b <= y_mo) if ties == "head" else (y_b < y_mo))
        out = np.empty(y_b.shape, dtype=float)

        if np.any(head):
            yh = y_b[head]
            z = (np.log(yh) - np.atleast_1d(mu)[head]) / np.atleast_1d(sigma)[head]
            log_f = -0.5 * z * z - 0.5 * np.log(2.0 * np.pi) - np.log(yh) - np.log(np.atleast_1d(sigma)[head])
            out[head] = np.atleast_1d(log_r)[head] + log_f - np.atleast_1d(lhn)[head]
        if not np.all(head):
            tail_mask = ~head
            tail_sub = self.tail.take(tail_mask) if np.ndim(d.y_mo) else self.tail
            log_f = np.asarray(tail_sub.logpdf(y_b[tail_mask]), dtype=float)
            out[tail_mask] = (
                np.atleast_1d(log_1mr)[tail_mask] + log_f - np.atleast_1d(ltn)[tail_mask]
            )
        return float(out[0]) if scalar else out

    def pdf(self, y, ties: str = "head"):
        with np.errstate(over="ignore"):
            out = np.exp(self.logpdf(y, ties=ties))
        return out

    def cdf(self, y):
        """Composite cdf; equals r exactly at the threshold."""
        y = _check_support(y, 0.0, "composite")
        d = self.derived
        y_b, y_mo, mu, log_r, log_1mr, lhn, ltn, sigma = np.broadcast_arrays(
            y, d.y_mo, d.mu, d.log_r, d.log_one_minus_r, d.log_head_norm,
            d.log_tail_norm, np.asarray(self.sigma, dtype=float),
        )
        scalar = y_b.ndim == 0
        y_b = np.atleast_1d(y_b)
        head = np.atleast_1d(y_b <= y_mo)
        out = np.empty(y_b.shape, dtype=float)

        if np.any(head):
            z = (np.log(y_b[head]) - np.atleast_1d(mu)[head]) / np.atleast_1d(sigma)[head]
            out[head] = np.exp(
                np.atleast_1d(log_r)[head] + _sp.log_ndtr(z) - np.atleast_1d(lhn)[head]
            )
        if not np.all(head):
            tail_mask = ~head
            tail_sub = self.tail.take(tail_mask) if np.ndim(d.y_mo) else self.tail
            log_sf = np.asarray(tail_sub.logsf(y_b[tail_mask]), dtype=float)
            out[tail_mask] = -np.expm1(
                np.atleast_1d(log_1mr)[tail_mask] + log_sf - np.atleast_1d(ltn)[tail_mask]
            )
        return float(out[0]) if scalar else out

    def quantile(self, p):
        """Piecewise inverse of :meth:`cdf`; p <= r inverts the head branch."""
        p = _check_prob_open(p, "composite quantile")
        d = self.derived
        p_b, y_mo, mu, r, log_1mr, lhn, ltn, sigma = np.broadcast_arrays(
            p, d.y_mo, d.mu, d.r, d.log_one_minus_r, d.log_head_norm,
            d.log_tail_norm, np.asarray(self.sigma, dtype=float),
        )
        scalar = p_b.ndim == 0
        p_b = np.atleast_1d(p_b)
        head = np.atleast_1d(p_b <= r)
        out = np.empty(p_b.shape, dtype=float)

        if np.any(head):
            ph = p_b[head]
            arg = (ph / np.atleast_1d(r)[head]) * np.exp(np.atleast_1d(lhn)[head])
            out[head] = np.exp(
                np.atleast_1d(mu)[head]
                + np.atleast_1d(sigma)[head] * _sp.ndtri(arg)
            )
        if not np.all(head):
            tail_mask = ~head
            s = np.exp(
                np.atleast_1d(ltn)[tail_mask]
                + np.log1p(-p_b[tail_mask])
                - np.atleast_1d(log_1mr)[tail_mask]
            )
            tail_sub = self.tail.take(tail_mask) if np.ndim(d.y_mo) else self.tail
            out[tail_mask] = np.asarray(tail_sub.isf(s), dtype=float)
        return float(out[0]) if scalar else out
