import numpy as np
import pandas as pd
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from sevreg import (
    CategoricalRecipe,
    CompositeSeverityRegressor,
    DataError,
    ModelParams,
    NumericRecipe,
    SimulationPlan,
    sample,
)

TRUE = ModelParams(family="glogm", sigma=1.0, alpha=0.5, gamma=np.array([1.0, 0.5, -0.5]))
RECIPE = [CategoricalRecipe("g", ("a", "b"), (0.5, 0.5)),
          NumericRecipe("z", "uniform", (0.0, 1.0))]


@pytest.fixture(scope="module")
def frame():
    ds = sample(SimulationPlan(params=TRUE, n=1500, seed=17, recipe=RECIPE))
    levels = ds.columns["g"].spec.levels
    X = pd.DataFrame({
        "g": [levels[c] for c in ds.columns["g"].values],
        "z": ds.columns["z"].values,
    })
    return X, ds.y


@pytest.fixture(scope="module")
def fitted(frame):
    X, y = frame
    est = CompositeSeverityRegressor(family="glogm", n_starts=1)
    return est.fit(X, y)


def test_sklearn_params_contract():
    est = CompositeSeverityRegressor(family="stoppa", n_starts=2)
    params = est.get_params()
    assert params["family"] == "stoppa"
    assert params["n_starts"] == 2
    est.set_params(family="burr")
    assert est.family == "burr"
    cloned = clone(est)
    assert cloned.get_params() == est.get_params()


def test_fit_returns_self_with_attributes(fitted):
    est = fitted
    assert isinstance(est, CompositeSeverityRegressor)
    assert est.coef_.shape == (3,)
    assert est.coef_names_ == ("Intercept", "g:b", "z")
    assert est.sigma_ > 0 and est.alpha_ > 0 and est.delta_ is None
    assert est.converged_
    assert est.nll_ > 0
    assert est.aic_ == 2 * est.nll_ + 2 * est.df_
    assert est.n_ == 1500 and est.df_ == 5
    assert est.std_errors_ is not None and est.covariance_.shape == (5, 5)
    # estimates should be near the simulating parameters
    assert abs(est.sigma_ - 1.0) < 0.15
    assert abs(est.alpha_ - 0.5) < 0.08
    assert np.all(np.abs(est.coef_ - TRUE.gamma) < 0.35)


def test_fit_accepts_dict_and_array(frame):
    X, y = frame
    as_dict = {"g": X["g"].to_numpy(), "z": X["z"].to_numpy()}
    est = CompositeSeverityRegressor(family="glogm", n_starts=1).fit(as_dict, y)
    assert est.converged_
    arr = np.column_stack([np.asarray(X["z"], dtype=float), np.asarray(X["z"], dtype=float) ** 2])
    est2 = CompositeSeverityRegressor(family="glogm", n_starts=1, max_iter=60).fit(arr, y)
    assert est2.coef_names_[0] == "Intercept"
    assert est2.n_features_in_ == 2


def test_covariate_subset_and_missing(frame):
    X, y = frame
    est = CompositeSeverityRegressor(family="glogm", covariates=["z"], n_starts=1).fit(X, y)
    assert est.coef_names_ == ("Intercept", "z")
    with pytest.raises(DataError):
        CompositeSeverityRegressor(family="glogm", covariates=["nope"]).fit(X, y)
    with pytest.raises(DataError):
        CompositeSeverityRegressor(family="weird").fit(X, y)


def test_predict_quantiles_ordered(fitted, frame):
    X, _ = frame
    head = X.head(20)
    q25 = fitted.predict(head, quantile=0.25)
    q50 = fitted.predict(head)
    q90 = fitted.predict(head, quantile=0.9)
    assert q25.shape == (20,)
    assert np.all(q25 < q50) and np.all(q50 < q90)
    assert np.all(q25 > 0)


def test_predict_threshold_matches_per_observation(fitted, frame):
    from sevreg import encode, per_observation, dataset_from_columns

    X, _ = frame
    head = X.head(10)
    thr = fitted.predict_threshold(head)
    ds = dataset_from_columns(np.ones(10), {"g": head["g"].to_numpy(), "z": head["z"].to_numpy()},
                              declared=fitted.design_info_)
    design = encode(ds, ["g", "z"], require_variation=False)
    po = per_observation(fitted.result_.params_hat, design)
    assert np.allclose(thr, po.y_mo)


def test_single_row_predict(fitted):
    one = pd.DataFrame({"g": ["a"], "z": [0.5]})
    val = fitted.predict(one)
    assert val.shape == (1,) and val[0] > 0


def test_unseen_level_rejected(fitted):
    bad = pd.DataFrame({"g": ["mystery"], "z": [0.5]})
    with pytest.raises(DataError):
        fitted.predict(bad)


def test_sample_determinism(fitted, frame):
    X, _ = frame
    head = X.head(50)
    a = fitted.sample(head, random_state=3)
    b = fitted.sample(head, random_state=3)
    c = fitted.sample(head, random_state=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.all(a > 0)


def test_quantile_residuals_from_estimator(fitted, frame):
    X, y = frame
    out = fitted.quantile_residuals(X, y)
    finite = np.isfinite(out.k)
    assert finite.mean() > 0.99
    assert abs(np.mean(out.k[finite])) < 0.1


def test_summary_contains_terms(fitted):
    text = fitted.summary()
    assert "sigma" in text and "alpha" in text
    assert "Intercept" in text and "g:b" in text and "z" in text
    assert "AIC" in text


def test_not_fitted_errors():
    est = CompositeSeverityRegressor()
    with pytest.raises(NotFittedError):
        est.predict(pd.DataFrame({"z": [1.0]}))
    with pytest.raises(NotFittedError):
        est.summary()


def test_standardize_reports_original_scale(frame):
    X, y = frame
    plain = CompositeSeverityRegressor(family="glogm", n_starts=1).fit(X, y)
    std = CompositeSeverityRegressor(family="glogm", n_starts=1, standardize=True).fit(X, y)
    assert np.allclose(plain.coef_, std.coef_, rtol=1e-3, atol=1e-3)
    assert abs(plain.nll_ - std.nll_) < 1e-3
