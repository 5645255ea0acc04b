import numpy as np
import pytest
from scipy import stats

from sevreg import (
    CategoricalRecipe,
    DataError,
    ModelParams,
    SimulationPlan,
    StdErrorsUnavailable,
    coefficient_tests,
    dataset_from_columns,
    encode,
    per_observation,
    quantile_residuals,
    sample,
    selection_report,
)
from sevreg.estimation import FitResult
from sevreg.regression import Dataset


# ---------------------------------------------------------------------------
# selection report
# ---------------------------------------------------------------------------

def test_aic_published_values():
    assert abs(selection_report(31273.95, 11, 7263).aic - 62569.90) <= 0.02
    assert abs(selection_report(31681.67, 10, 7263).aic - 63383.34) <= 0.02


def test_bic_log_n():
    rep = selection_report(100.0, 2, np.exp(2.0))
    assert abs(rep.bic - 204.0) <= 1e-9


def test_selection_formulas_exact():
    rep = selection_report(1234.5678, 7, 321)
    assert rep.aic == 2.0 * 1234.5678 + 2.0 * 7
    assert rep.bic == 2.0 * 1234.5678 + np.log(321) * 7
    assert rep.df == 7


def test_selection_validation():
    with pytest.raises(DataError):
        selection_report(10.0, 0, 5)
    with pytest.raises(DataError):
        selection_report(10.0, 2, 0)


# ---------------------------------------------------------------------------
# coefficient tests
# ---------------------------------------------------------------------------

def _fake_fit(estimates, ses, family="glogm", n=7263):
    gamma = np.asarray(estimates, dtype=float)
    params = ModelParams(family=family, sigma=1.0, alpha=0.5, gamma=gamma)
    shape_count = 2
    std = np.concatenate([np.full(shape_count, 0.1), np.asarray(ses, dtype=float)])
    k = shape_count + gamma.size
    return FitResult(
        params_hat=params,
        param_names=("sigma", "alpha") + tuple(f"c{i}" for i in range(gamma.size)),
        covariance=np.diag(std ** 2),
        std_errors=std,
        nll=0.0, converged=True, iterations=1, gradient_norm=0.0,
        n=n, df=k, n_starts=1, n_distinct_optima=1,
    )


class _DesignNames:
    def __init__(self, names):
        self.column_names = tuple(names)

    @property
    def p(self):
        return len(self.column_names)


def test_t_ratio_published_rows():
    fit = _fake_fit([-0.7839, -1.2333], [0.1265, 0.0771])
    tests = coefficient_tests(fit, _DesignNames(["Intercept", "cc2"]))
    assert abs(tests[0].t_ratio - (-6.1969)) <= 5e-3
    assert abs(tests[1].t_ratio - (-15.9961)) <= 5e-3
    assert all(t.p_value <= 0.001 for t in tests)
    assert all(t.significant for t in tests)


def test_t_ratio_zero_estimate():
    fit = _fake_fit([0.0], [0.25])
    (test,) = coefficient_tests(fit, _DesignNames(["Intercept"]))
    assert test.t_ratio == 0.0
    assert test.p_value == 1.0
    assert not test.significant


def test_t_sign_matches_estimate_sign():
    fit = _fake_fit([1.5, -2.5, 0.3], [0.5, 0.5, 0.5])
    tests = coefficient_tests(fit, _DesignNames(["a", "b", "c"]))
    for t in tests:
        assert np.sign(t.t_ratio) == np.sign(t.estimate)
        assert t.t_ratio == t.estimate / t.std_error


def test_p_value_uses_student_t_with_n_minus_p():
    n = 30
    fit = _fake_fit([0.8, -0.4], [0.3, 0.3], n=n)
    tests = coefficient_tests(fit, _DesignNames(["a", "b"]))
    dof = n - 2
    for t in tests:
        assert abs(t.p_value - 2.0 * stats.t.sf(abs(t.t_ratio), dof)) <= 1e-15


def test_tests_withheld_without_ses():
    fit = _fake_fit([1.0], [0.5])
    object.__setattr__(fit, "std_errors", None)
    with pytest.raises(StdErrorsUnavailable):
        coefficient_tests(fit, _DesignNames(["a"]))


# ---------------------------------------------------------------------------
# quantile residuals
# ---------------------------------------------------------------------------

def _intercept_model(family="burr"):
    if family == "burr":
        params = ModelParams(family=family, sigma=1.0, alpha=2.0, delta=1.0, gamma=np.zeros(1))
    else:
        params = ModelParams(family=family, sigma=1.0, alpha=0.5, gamma=np.zeros(1))
    return params


def test_residual_at_threshold_is_quantile_of_weight():
    params = _intercept_model()
    ds = Dataset(y=np.array([0.5773502691896257, 1.0, 2.0]))
    design = encode(ds, [])
    po = per_observation(params, design)
    out = quantile_residuals(params, ds, design)
    from scipy.special import ndtri

    assert abs(out.k[0] - ndtri(po.r[0])) <= 1e-9
    assert out.n_saturated == 0


def test_residual_zero_at_median():
    params = _intercept_model()
    from sevreg import build_composite

    ds0 = Dataset(y=np.array([1.0]))
    design0 = encode(ds0, [])
    median = float(build_composite(params, design0).quantile(0.5)[0])
    ds = Dataset(y=np.array([median]))
    out = quantile_residuals(params, ds, encode(ds, []))
    assert abs(out.k[0]) <= 1e-9


def test_saturated_residuals_become_sentinels():
    params = _intercept_model("glogm")
    ds = Dataset(y=np.array([1e-300, 1.0, 1e300]))
    design = encode(ds, [])
    out = quantile_residuals(params, ds, design)
    assert out.k[0] == -np.inf
    assert out.k[2] == np.inf
    assert out.n_saturated == 2
    assert out.qq_empirical.size == 1
    assert out.qq_theoretical.size == 1


def test_residual_monotone_in_y():
    params = _intercept_model()
    y = np.linspace(0.05, 8.0, 200)
    ds = Dataset(y=y)
    out = quantile_residuals(params, ds, encode(ds, []))
    assert np.all(np.diff(out.k) > 0.0)


def test_qq_positions():
    params = _intercept_model()
    ds = Dataset(y=np.array([0.4, 1.1, 0.9, 2.5]))
    out = quantile_residuals(params, ds, encode(ds, []))
    m = 4
    from scipy.special import ndtri

    expect = ndtri((np.arange(1, m + 1) - 0.5) / m)
    assert np.allclose(out.qq_theoretical, expect)
    assert np.all(np.diff(out.qq_empirical) >= 0.0)


def test_residuals_accept_fit_result_and_params():
    fit = _fake_fit([0.0], [0.5])
    ds = Dataset(y=np.array([0.7, 1.3]))
    design = encode(ds, [])
    a = quantile_residuals(fit, ds, design)
    b = quantile_residuals(fit.params_hat, ds, design)
    assert np.array_equal(a.k, b.k)
    with pytest.raises(DataError):
        quantile_residuals("nonsense", ds, design)


def test_pit_property_on_simulated_data():
    params = ModelParams(family="glogm", sigma=1.0, alpha=0.5, gamma=np.array([1.0, 0.5]))
    recipe = [CategoricalRecipe("g", ("a", "b"), (0.5, 0.5))]
    ds = sample(SimulationPlan(params=params, n=2000, seed=99, recipe=recipe))
    design = encode(ds, ["g"])
    out = quantile_residuals(params, ds, design)
    stat, p = stats.kstest(out.k, "norm")
    assert p > 0.01
