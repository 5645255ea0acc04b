import numpy as np
import pytest

from sevreg import (
    CategoricalRecipe,
    DataError,
    ModelParams,
    NumericRecipe,
    ParameterError,
    SimulationPlan,
    build_composite,
    encode,
    motor_portfolio_recipe,
    per_observation,
    sample,
)

from _oracles import ks_distance

GLOGM = ModelParams(family="glogm", sigma=1.0, alpha=0.5, gamma=np.array([1.0, 0.5, -0.5]))
RECIPE = [CategoricalRecipe("g", ("a", "b"), (0.5, 0.5)),
          NumericRecipe("z", "uniform", (0.0, 1.0))]


def test_same_seed_reproduces_exactly():
    plan = SimulationPlan(params=GLOGM, n=400, seed=31, recipe=RECIPE)
    a = sample(plan)
    b = sample(plan)
    assert np.array_equal(a.y, b.y)
    for name in a.columns:
        assert np.array_equal(a.columns[name].values, b.columns[name].values)
    c = sample(SimulationPlan(params=GLOGM, n=400, seed=32, recipe=RECIPE))
    assert not np.array_equal(a.y, c.y)


def test_all_samples_positive():
    ds = sample(SimulationPlan(params=GLOGM, n=2000, seed=1, recipe=RECIPE))
    assert np.all(ds.y > 0.0)


def test_head_fraction_matches_mean_weight():
    plan = SimulationPlan(params=GLOGM, n=100_000, seed=8, recipe=RECIPE)
    ds = sample(plan)
    design = encode(ds, ["g", "z"])
    po = per_observation(GLOGM, design)
    frac = float(np.mean(ds.y <= po.y_mo))
    assert abs(frac - float(np.mean(po.r))) <= 0.01


def test_empirical_cdf_matches_composite_cdf():
    # single spec: intercept-only model, KS bound at the 1% level
    n = 10_000
    recipe = [NumericRecipe("z", "uniform", (0.0, 1.0))]
    ds = sample(SimulationPlan(params=ModelParams(family="burr", sigma=1.0, alpha=2.0,
                                                  delta=1.0, gamma=np.array([0.3, 0.0])),
                               n=n, seed=12, recipe=recipe))
    design0 = encode(ds, [])
    single = ModelParams(family="burr", sigma=1.0, alpha=2.0, delta=1.0, gamma=np.array([0.3]))
    comp = build_composite(single, design0)
    d = ks_distance(ds.y, lambda x: np.asarray(comp.cdf(np.asarray(x))))
    assert d <= 1.63 / np.sqrt(n)


def test_pit_uniformity():
    ds = sample(SimulationPlan(params=GLOGM, n=10_000, seed=3, recipe=RECIPE))
    design = encode(ds, ["g", "z"])
    comp = build_composite(GLOGM, design)
    u = np.asarray(comp.cdf(ds.y))
    d = ks_distance(u, lambda x: np.clip(x, 0.0, 1.0))
    assert d <= 1.63 / np.sqrt(10_000)


def test_stoppa_tail_samples_exceed_beta():
    params = ModelParams(family="stoppa", sigma=0.8, alpha=2.0, delta=1.5,
                         gamma=np.array([0.5, 0.4, -0.3]))
    ds = sample(SimulationPlan(params=params, n=5000, seed=21, recipe=RECIPE))
    design = encode(ds, ["g", "z"])
    po = per_observation(params, design)
    tail = ds.y > po.y_mo
    assert np.all(ds.y[tail] > po.beta[tail])
    assert np.all(ds.y > 0.0)


def test_design_based_plan():
    rng = np.random.default_rng(0)
    from sevreg import Dataset, dataset_from_columns

    base = dataset_from_columns(np.ones(50), {"z": rng.uniform(0, 1, 50)})
    design = encode(base, ["z"])
    params = ModelParams(family="glogm", sigma=1.0, alpha=0.5, gamma=np.array([1.0, 0.5]))
    ds = sample(SimulationPlan(params=params, n=50, seed=5, design=design))
    assert ds.n == 50
    assert "z" in ds.columns


def test_plan_validation():
    with pytest.raises(ParameterError):
        SimulationPlan(params=GLOGM, n=0, seed=1, recipe=RECIPE)
    with pytest.raises(ParameterError):
        SimulationPlan(params=GLOGM, n=10, seed=1)  # neither recipe nor design
    with pytest.raises(ParameterError):
        sample(SimulationPlan(params=GLOGM, n=10, seed=1,
                              recipe=[CategoricalRecipe("g", ("a", "b"), (0.5, 0.5))]))  # gamma len 3


def test_recipe_validation():
    with pytest.raises(ParameterError):
        CategoricalRecipe("g", ("a", "b"), (0.7, 0.7))
    with pytest.raises(ParameterError):
        CategoricalRecipe("g", ("a",), (0.5, 0.5))
    with pytest.raises(ParameterError):
        NumericRecipe("z", "triangular", (0.0, 1.0))
    with pytest.raises(DataError):
        sample(SimulationPlan(
            params=ModelParams(family="glogm", sigma=1.0, alpha=0.5, gamma=np.zeros(3)),
            n=10, seed=1,
            recipe=[NumericRecipe("z", "uniform", (0, 1)), NumericRecipe("z", "uniform", (0, 1))],
        ))


def test_motor_portfolio_recipe_shape():
    recipe = motor_portfolio_recipe()
    assert len(recipe) == 4
    params = ModelParams(family="glogm", sigma=1.0, alpha=0.5,
                         gamma=np.array([1.0, 0.1, 0.1, 0.1, 0.2, 0.3, 0.01, 0.005]))
    ds = sample(SimulationPlan(params=params, n=20_000, seed=77, recipe=recipe))
    assert set(ds.columns) == {"cc", "policy_type", "vehicle_age", "mtpl_cost"}
    cc = ds.columns["cc"]
    freq = np.bincount(cc.values, minlength=4) / ds.n
    assert np.max(np.abs(freq - np.array([0.2803, 0.3328, 0.2524, 0.1345]))) <= 0.02
    age = ds.columns["vehicle_age"].values
    assert age.min() >= 0 and age.max() <= 38
    assert np.all(age == np.round(age))
    assert np.all(ds.columns["mtpl_cost"].values > 0)
