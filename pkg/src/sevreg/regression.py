"""Covariate handling and the covariate-indexed composite likelihood.

The tail scale follows a log link, ``beta_i = exp(gamma . x_i)``, so the
splice threshold (the tail mode) varies across observations.  The
likelihood charges each observation to exactly one branch: head when
``y_i < y_mo_i``, tail when ``y_i >= y_mo_i``.  Note the asymmetry with
the distribution functions, which put the threshold itself in the head
branch; the tie is a measure-zero event but conventions are kept apart
deliberately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .composite import CompositeLognormal
from .exceptions import DataError, NumericError, ParameterError
from .families import family_has_delta, make_tail

INTERCEPT = "Intercept"


@dataclass(frozen=True)
class Covariate:
    """Declaration of one covariate: its name, kind and (categorical) level order.

    The first declared level is the treatment-coding reference.
    """

    name: str
    kind: str  # "numeric" | "categorical"
    levels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise DataError(f"unknown covariate kind {self.kind!r}", column=self.name)
        if self.kind == "categorical":
            if not self.levels:
                raise DataError("categorical covariate needs at least one level", column=self.name)
            if len(set(self.levels)) != len(self.levels):
                raise DataError("duplicate categorical levels", column=self.name)
        elif self.levels is not None:
            raise DataError("numeric covariate cannot declare levels", column=self.name)


@dataclass(frozen=True, eq=False)
class Column:
    """One typed data column: float values (numeric) or level codes (categorical)."""

    spec: Covariate
    values: np.ndarray  # float for numeric, int codes into spec.levels otherwise

    @property
    def name(self) -> str:
        return self.spec.name


@dataclass(frozen=True, eq=False)
class Dataset:
    """Positive responses plus typed covariate columns, all of one length."""

    y: np.ndarray
    columns: dict[str, Column] = field(default_factory=dict)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise DataError("responses must form a non-empty vector")
        if not np.all(np.isfinite(y)):
            raise DataError("non-finite response", row=int(np.argmax(~np.isfinite(y))))
        if np.any(y <= 0.0):
            raise DataError("nonpositive response", row=int(np.argmax(y <= 0.0)))
        object.__setattr__(self, "y", y)
        for c in self.columns.values():
            if len(c.values) != y.size:
                raise DataError("column length does not match responses", column=c.name)

    @property
    def n(self) -> int:
        return int(self.y.size)


def dataset_from_columns(y, columns: dict[str, object], declared: list[Covariate] | None = None) -> Dataset:
    """Type raw columns into a :class:`Dataset`.

    Without declarations, kinds are inferred (non-numeric dtype means
    categorical) and categorical levels are taken in order of first
    appearance.  Declared levels are authoritative: a value outside them
    is a data error.
    """
    decl = {c.name: c for c in declared} if declared else {}
    typed: dict[str, Column] = {}
    for name, raw in columns.items():
        arr = np.asarray(raw)
        spec = decl.get(name)
        if spec is None:
            kind = "numeric" if np.issubdtype(arr.dtype, np.number) else "categorical"
            spec = Covariate(name, kind, _observed_levels(arr) if kind == "categorical" else None)
        if spec.kind == "numeric":
            try:
                values = np.asarray(arr, dtype=float)
            except (TypeError, ValueError) as exc:
                raise DataError(f"unparseable numeric value: {exc}", column=name) from None
            if not np.all(np.isfinite(values)):
                raise DataError("non-finite covariate value",
                                row=int(np.argmax(~np.isfinite(values))), column=name)
        else:
            values = _encode_levels(arr, spec.levels, name)
        typed[name] = Column(spec=spec, values=values)
    return Dataset(y=np.asarray(y, dtype=float), columns=typed)


def _observed_levels(arr) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for v in arr:
        seen.setdefault(str(v), None)
    return tuple(seen)


def _encode_levels(arr, levels: tuple[str, ...], name: str) -> np.ndarray:
    lookup = {lev: i for i, lev in enumerate(levels)}
    codes = np.empty(len(arr), dtype=np.intp)
    for i, v in enumerate(arr):
        try:
            codes[i] = lookup[str(v)]
        except KeyError:
            raise DataError(f"level {v!r} not among declared levels", row=i, column=name) from None
    return codes


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Encoded covariates: intercept column, then treatment-coded terms.

    ``terms`` records, per design column, the source covariate, its kind
    and (for dummies) the level the column indicates.
    """

    matrix: np.ndarray
    column_names: tuple[str, ...]
    terms: tuple[dict, ...]
    covariates: tuple[Covariate, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[1] < 1:
            raise DataError("design matrix must be 2-d with at least one column")
        if not np.all(m[:, 0] == 1.0):
            raise DataError("first design column must be the intercept")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    def numeric_column_indices(self) -> list[int]:
        return [j for j, t in enumerate(self.terms) if t["kind"] == "numeric"]


def encode(dataset: Dataset, covariate_names: list[str], *,
           require_variation: bool = True) -> DesignMatrix:
    """Intercept plus treatment coding, reference = first declared level.

    ``require_variation=False`` skips the degenerate-categorical check,
    for encoding prediction batches against an already-fitted model.
    """
    n = dataset.n
    cols: list[np.ndarray] = [np.ones(n)]
    names: list[str] = [INTERCEPT]
    terms: list[dict] = [{"covariate": None, "kind": "intercept", "level": None}]
    specs: list[Covariate] = []
    for name in covariate_names:
        if name not in dataset.columns:
            raise DataError("unknown covariate name", column=name)
        col = dataset.columns[name]
        specs.append(col.spec)
        if col.spec.kind == "numeric":
            cols.append(col.values)
            names.append(name)
            terms.append({"covariate": name, "kind": "numeric", "level": None})
        else:
            levels = col.spec.levels
            if require_variation and len(levels) > 1 and np.unique(col.values).size < 2:
                raise DataError(
                    "categorical has a single observed level but multiple declared",
                    column=name,
                )
            for code, level in enumerate(levels[1:], start=1):
                cols.append((col.values == code).astype(float))
                names.append(f"{name}:{level}")
                terms.append({"covariate": name, "kind": "categorical", "level": level})
    return DesignMatrix(
        matrix=np.column_stack(cols),
        column_names=tuple(names),
        terms=tuple(terms),
        covariates=tuple(specs),
    )


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Full parameter vector: head spread, tail shapes, regression coefficients."""

    family: str
    sigma: float
    alpha: float
    gamma: np.ndarray
    delta: float | None = None

    def __post_init__(self):
        if self.family not in ("burr", "stoppa", "glogm"):
            raise ParameterError(f"unknown tail family {self.family!r}")
        if not np.isfinite(self.sigma) or self.sigma <= 0.0:
            raise ParameterError("sigma must be positive and finite")
        alpha_min = 1.0 if self.family in ("burr", "stoppa") else 0.0
        if not np.isfinite(self.alpha) or self.alpha <= alpha_min:
            raise ParameterError(f"alpha must exceed {alpha_min} for {self.family}")
        if family_has_delta(self.family):
            if self.delta is None or not np.isfinite(self.delta) or self.delta <= 0.0:
                raise ParameterError(f"{self.family} requires a positive finite delta")
        elif self.delta is not None:
            raise ParameterError("glogm has no delta parameter")
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.ndim != 1 or gamma.size < 1 or not np.all(np.isfinite(gamma)):
            raise ParameterError("gamma must be a finite vector")
        object.__setattr__(self, "gamma", gamma)

    @property
    def n_free(self) -> int:
        return int(self.gamma.size) + (3 if family_has_delta(self.family) else 2)


@dataclass(frozen=True, eq=False)
class PerObservationComposite:
    """Per-row derived quantities: scale, threshold, head location, head mass."""

    beta: np.ndarray
    y_mo: np.ndarray
    mu: np.ndarray
    r: np.ndarray


def link_beta(design_row, gamma) -> float:
    """Log link for a single design row; overflow is an error, not a saturation."""
    row = np.asarray(design_row, dtype=float)
    g = np.asarray(gamma, dtype=float)
    if row.shape != g.shape:
        raise ParameterError("design row and gamma have mismatched lengths")
    with np.errstate(over="ignore"):
        beta = float(np.exp(row @ g))
    if not np.isfinite(beta) or beta <= 0.0:
        raise NumericError("beta overflowed or underflowed under the log link")
    return beta


def linked_betas(design: DesignMatrix, gamma) -> np.ndarray:
    """Vector log link across all rows, with the first offending row reported."""
    g = np.asarray(gamma, dtype=float)
    if g.shape != (design.p,):
        raise ParameterError("gamma length does not match design columns")
    eta = design.matrix @ g
    with np.errstate(over="ignore"):
        beta = np.exp(eta)
    bad = ~np.isfinite(beta) | (beta <= 0.0)
    if np.any(bad):
        raise NumericError("beta overflowed or underflowed under the log link",
                           row=int(np.argmax(bad)))
    return beta


def build_composite(params: ModelParams, design: DesignMatrix) -> CompositeLognormal:
    """Composite distribution with one threshold/weight per design row."""
    beta = linked_betas(design, params.gamma)
    tail = make_tail(params.family, params.alpha, beta,
                     params.delta if family_has_delta(params.family) else None)
    return CompositeLognormal(sigma=params.sigma, tail=tail)


def per_observation(params: ModelParams, design: DesignMatrix) -> PerObservationComposite:
    comp = build_composite(params, design)
    d = comp.derived
    beta = np.asarray(comp.tail.beta, dtype=float)
    return PerObservationComposite(
        beta=np.broadcast_to(beta, (design.n,)).copy(),
        y_mo=np.broadcast_to(d.y_mo, (design.n,)).copy(),
        mu=np.broadcast_to(d.mu, (design.n,)).copy(),
        r=np.broadcast_to(d.r, (design.n,)).copy(),
    )


def neg_log_likelihood(params: ModelParams, dataset, design: DesignMatrix) -> float:
    """Negative log likelihood; ties at the threshold are charged to the tail.

    The sum runs through numpy's fixed-chunk pairwise summation, so
    repeated evaluations on the same data are bit-stable.
    """
    y = dataset.y if isinstance(dataset, Dataset) else np.asarray(dataset, dtype=float)
    if y.shape != (design.n,):
        raise DataError("response vector does not match the design matrix")
    comp = build_composite(params, design)
    terms = comp.logpdf(y, ties="tail")
    finite = np.isfinite(terms)
    if not np.all(finite):
        raise NumericError("non-finite log-likelihood term",
                           row=int(np.argmax(~finite)))
    return float(-np.sum(terms))
