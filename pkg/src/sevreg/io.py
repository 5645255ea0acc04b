"""File formats: CSV data (RFC 4180), JSON configs and fit reports.

All numbers are serialized with 17 significant digits so a written report
reloads to bit-identical doubles; reports therefore round-trip exactly
through ``diagnose``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .diagnostics import CoefficientTest, ResidualSet, SelectionReport
from .estimation import FitControls, FitResult
from .exceptions import DataError, SevregError
from .families import TAIL_FAMILIES, family_has_delta
from .regression import Covariate, Dataset, ModelParams, dataset_from_columns
from .simulation import CategoricalRecipe, NumericRecipe, SimulationPlan


class ConfigError(SevregError, ValueError):
    """Malformed configuration; treated as a usage error by the CLI."""


def _format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        return "null"
    s = format(x, ".17g")
    return s


def dumps_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return _format_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{inner}{dumps_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelConfig:
    family: str
    response: str
    covariates: tuple[Covariate, ...]
    standardize: bool
    controls: FitControls


def _parse_covariate(entry, *, for_simulation: bool = False):
    if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
        raise ConfigError("each covariate needs at least name and kind")
    name = str(entry["name"])
    kind = str(entry["kind"])
    if kind == "categorical":
        levels = entry.get("levels")
        if for_simulation:
            if not levels or "probs" not in entry:
                raise ConfigError(f"simulated categorical {name!r} needs levels and probs")
            return CategoricalRecipe(name, tuple(str(v) for v in levels),
                                     tuple(float(p) for p in entry["probs"]))
        return Covariate(name, "categorical", tuple(str(v) for v in levels) if levels else None)
    if kind == "numeric":
        if for_simulation:
            dist = entry.get("distribution")
            params = entry.get("params")
            if dist not in ("uniform", "integer", "lognormal") or params is None or len(params) != 2:
                raise ConfigError(
                    f"simulated numeric {name!r} needs a distribution "
                    "(uniform/integer/lognormal) and two params"
                )
            return NumericRecipe(name, dist, (float(params[0]), float(params[1])))
        return Covariate(name, "numeric")
    raise ConfigError(f"unknown covariate kind {kind!r}")


def _parse_controls(entry) -> FitControls:
    if entry is None:
        return FitControls()
    if not isinstance(entry, dict):
        raise ConfigError("controls must be an object")
    known = {"gtol", "ftol_rel", "max_iter", "n_starts", "jitter", "seed", "threads"}
    unknown = set(entry) - known
    if unknown:
        raise ConfigError(f"unknown control settings: {sorted(unknown)}")
    return FitControls(**entry)


def parse_model_config(doc: dict) -> ModelConfig:
    try:
        family = str(doc["family"])
        response = str(doc["response"])
        raw_covs = doc["covariates"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"config must define family, response and covariates ({exc})") from None
    if family not in TAIL_FAMILIES:
        raise ConfigError(f"unknown family {family!r}; expected one of {sorted(TAIL_FAMILIES)}")
    covariates = tuple(_parse_covariate(e) for e in raw_covs)
    names = [c.name for c in covariates]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate covariate names")
    if response in names:
        raise ConfigError("response must not appear among the covariates")
    try:
        return ModelConfig(
            family=family,
            response=response,
            covariates=covariates,
            standardize=bool(doc.get("standardize", False)),
            controls=_parse_controls(doc.get("controls")),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_simulation_config(doc: dict, n: int | None, seed: int | None) -> tuple[SimulationPlan, str]:
    try:
        family = str(doc["family"])
    except (KeyError, TypeError):
        raise ConfigError("simulation config must define a family") from None
    if family not in TAIL_FAMILIES:
        raise ConfigError(f"unknown family {family!r}; expected one of {sorted(TAIL_FAMILIES)}")
    response = str(doc.get("response", "y"))
    try:
        recipe = [_parse_covariate(e, for_simulation=True) for e in doc.get("covariates", [])]
        params = ModelParams(
            family=family,
            sigma=float(doc["sigma"]),
            alpha=float(doc["alpha"]),
            delta=float(doc["delta"]) if family_has_delta(family) else None,
            gamma=np.asarray(doc["gamma"], dtype=float),
        )
        n = int(n if n is not None else doc["n"])
        seed = int(seed if seed is not None else doc["seed"])
        plan = SimulationPlan(params=params, n=n, seed=seed, recipe=recipe, response=response)
    except (KeyError, TypeError, ValueError, SevregError) as exc:
        raise ConfigError(f"bad simulation config: {exc}") from None
    return plan, response


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None


# ---------------------------------------------------------------------------
# CSV data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IngestReport:
    n_rows: int
    n_rejected: int
    rejects: tuple[tuple[int, str], ...]


def read_csv(path, config: ModelConfig, *, drop_invalid: bool = False) -> tuple[Dataset, IngestReport]:
    """Load and type a data file against a model config.

    Strict by default: the first bad cell raises with its row index and
    column.  With ``drop_invalid`` the offending rows are dropped and
    listed in the report instead.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise DataError("empty file: missing header")
    header = rows[0]
    positions = {name: i for i, name in enumerate(header)}
    needed = [config.response] + [c.name for c in config.covariates]
    for name in needed:
        if name not in positions:
            raise DataError("missing column", column=name)

    y_raw: list[float] = []
    cov_raw: dict[str, list] = {c.name: [] for c in config.covariates}
    rejects: list[tuple[int, str]] = []
    declared = {c.name: c for c in config.covariates}

    def fail(row_idx: int, message: str, column: str):
        if drop_invalid:
            rejects.append((row_idx, f"{message} (column {column!r})"))
            return True
        raise DataError(message, row=row_idx, column=column)

    for i, row in enumerate(rows[1:]):
        if len(row) != len(header):
            if fail(i, f"expected {len(header)} fields, got {len(row)}", header[0]):
                continue
        bad = False
        cell = row[positions[config.response]]
        try:
            y_val = float(cell)
        except ValueError:
            bad = fail(i, f"unparseable numeric cell {cell!r}", config.response)
            y_val = None
        if y_val is not None and (not np.isfinite(y_val) or y_val <= 0.0):
            bad = fail(i, f"nonpositive response {cell!r}", config.response)
            y_val = None
        values = {}
        for c in config.covariates:
            if bad:
                break
            cell = row[positions[c.name]]
            if c.kind == "numeric":
                try:
                    v = float(cell)
                except ValueError:
                    bad = fail(i, f"unparseable numeric cell {cell!r}", c.name)
                    break
                if not np.isfinite(v):
                    bad = fail(i, f"non-finite value {cell!r}", c.name)
                    break
                values[c.name] = v
            else:
                if cell == "":
                    bad = fail(i, "missing value", c.name)
                    break
                if c.levels is not None and cell not in c.levels:
                    bad = fail(i, f"level {cell!r} not among declared levels", c.name)
                    break
                values[c.name] = cell
        if bad:
            continue
        y_raw.append(y_val)
        for name, v in values.items():
            cov_raw[name].append(v)

    if not y_raw:
        raise DataError("no usable data rows")
    columns = {
        c.name: (np.asarray(cov_raw[c.name], dtype=float) if c.kind == "numeric"
                 else np.asarray(cov_raw[c.name], dtype=object))
        for c in config.covariates
    }
    dataset = dataset_from_columns(np.asarray(y_raw), columns, declared=list(declared.values()))
    return dataset, IngestReport(
        n_rows=dataset.n, n_rejected=len(rejects), rejects=tuple(rejects)
    )


def write_dataset_csv(path, dataset: Dataset, response: str = "y") -> None:
    """Response first, covariates in column order; floats at 17 significant digits."""
    names = list(dataset.columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([response] + names)
        for i in range(dataset.n):
            row = [format(dataset.y[i], ".17g")]
            for name in names:
                col = dataset.columns[name]
                if col.spec.kind == "categorical":
                    row.append(col.spec.levels[int(col.values[i])])
                else:
                    row.append(format(float(col.values[i]), ".17g"))
            writer.writerow(row)


# ---------------------------------------------------------------------------
# fit reports
# ---------------------------------------------------------------------------

def fit_report(result: FitResult, config: ModelConfig,
               selection: SelectionReport,
               tests: list[CoefficientTest] | None) -> dict:
    params = result.params_hat
    offset = 3 if family_has_delta(params.family) else 2
    names = result.param_names[offset:]
    coefficients = []
    for j, name in enumerate(names):
        entry = {
            "name": name,
            "estimate": float(params.gamma[j]),
            "std_error": float(result.std_errors[offset + j]) if result.std_errors is not None else None,
            "t_ratio": tests[j].t_ratio if tests else None,
            "p_value": tests[j].p_value if tests else None,
        }
        coefficients.append(entry)

    def shape_entry(pos: int, value: float) -> dict:
        se = float(result.std_errors[pos]) if result.std_errors is not None else None
        return {"estimate": float(value), "std_error": se}

    doc = {
        "family": params.family,
        "model": {
            "response": config.response,
            "covariates": [
                {"name": c.name, "kind": c.kind,
                 **({"levels": list(c.levels)} if c.levels else {})}
                for c in config.covariates
            ],
            "standardize": config.standardize,
        },
        "coefficients": coefficients,
        "sigma": shape_entry(0, params.sigma),
        "alpha": shape_entry(1, params.alpha),
    }
    if family_has_delta(params.family):
        doc["delta"] = shape_entry(2, params.delta)
    doc.update({
        "nll": result.nll,
        "aic": selection.aic,
        "bic": selection.bic,
        "df": result.df,
        "n": result.n,
        "converged": result.converged,
        "iterations": result.iterations,
        "gradient_norm": result.gradient_norm,
        "n_starts": result.n_starts,
        "n_distinct_optima": result.n_distinct_optima,
    })
    return doc


def parse_fit_report(doc: dict) -> tuple[ModelParams, ModelConfig, dict]:
    """Rebuild parameters and model declaration from a saved fit report."""
    try:
        family = str(doc["family"])
        model = doc["model"]
        covariates = tuple(_parse_covariate(e) for e in model["covariates"])
        config = ModelConfig(
            family=family,
            response=str(model["response"]),
            covariates=covariates,
            standardize=bool(model.get("standardize", False)),
            controls=FitControls(),
        )
        gamma = np.asarray([c["estimate"] for c in doc["coefficients"]], dtype=float)
        params = ModelParams(
            family=family,
            sigma=float(doc["sigma"]["estimate"]),
            alpha=float(doc["alpha"]["estimate"]),
            delta=float(doc["delta"]["estimate"]) if "delta" in doc else None,
            gamma=gamma,
        )
    except (KeyError, TypeError, ValueError, SevregError) as exc:
        raise ConfigError(f"bad fit report: {exc}") from None
    return params, config, doc


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(doc) + "\n")


def write_residuals_csv(path, dataset: Dataset, residuals: ResidualSet) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "y", "cdf", "k"])
        for i in range(dataset.n):
            writer.writerow([
                i,
                format(dataset.y[i], ".17g"),
                format(float(residuals.cdf_values[i]), ".17g"),
                format(float(residuals.k[i]), ".17g"),
            ])


def write_qq_csv(path, residuals: ResidualSet) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theoretical", "empirical"])
        for t, e in zip(residuals.qq_theoretical, residuals.qq_empirical):
            writer.writerow([format(float(t), ".17g"), format(float(e), ".17g")])
