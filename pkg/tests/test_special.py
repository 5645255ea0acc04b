import numpy as np
import pytest

from sevreg import DomainError, special

from _oracles import bisect_root, normal_cdf_quad

# frozen from the quadrature/bisection oracles in _oracles.py
PHI_AT_MINUS_ONE = 0.15865525393145707
QUANTILE_0975 = 1.959963984540054
QUANTILE_0158655 = -1.000001049431063  # 0.158655 is a rounded probability
ERF_INV_SQRT2 = 0.6826894921370859  # = 2*Phi(1) - 1


def test_cdf_center_and_tails():
    assert special.norm_cdf(0.0) == 0.5
    assert abs(special.norm_cdf(40.0) - 1.0) <= 1e-15
    assert special.norm_cdf(-40.0) == 0.0


def test_cdf_matches_quadrature_oracle():
    assert abs(special.norm_cdf(-1.0) - PHI_AT_MINUS_ONE) <= 1e-12
    assert abs(normal_cdf_quad(-1.0) - PHI_AT_MINUS_ONE) <= 1e-12
    for z in (-3.0, -0.5, 0.7, 2.2):
        assert abs(special.norm_cdf(z) - normal_cdf_quad(z)) <= 1e-12


def test_quantile_values():
    assert special.norm_quantile(0.5) == 0.0
    assert abs(special.norm_quantile(0.975) - QUANTILE_0975) <= 1e-9
    assert abs(special.norm_quantile(0.158655) - QUANTILE_0158655) <= 1e-9
    assert abs(special.norm_quantile(PHI_AT_MINUS_ONE) + 1.0) <= 1e-9


def test_quantile_matches_bisection_oracle():
    z = bisect_root(lambda t: normal_cdf_quad(t) - 0.975, 0.0, 4.0)
    assert abs(z - QUANTILE_0975) <= 1e-9


@pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5, np.nan])
def test_quantile_domain(p):
    with pytest.raises(DomainError):
        special.norm_quantile(p)


def test_erf_values():
    assert special.erf(0.0) == 0.0
    assert abs(special.erf(1.0 / np.sqrt(2.0)) - ERF_INV_SQRT2) <= 1e-12
    assert abs(special.erf_inv(ERF_INV_SQRT2) - 1.0 / np.sqrt(2.0)) <= 1e-9


@pytest.mark.parametrize("u", [1.0, -1.0, 1.2, np.inf])
def test_erf_inv_domain(u):
    with pytest.raises(DomainError):
        special.erf_inv(u)


def test_erf_is_odd_with_range():
    x = np.linspace(-6.0, 6.0, 241)
    v = special.erf(x)
    assert np.all(np.abs(v + special.erf(-x)) <= 1e-15)
    assert np.all(np.abs(v) < 1.0 + 1e-15)


def test_cdf_symmetry():
    z = np.linspace(-38.0, 38.0, 501)
    assert np.max(np.abs(special.norm_cdf(z) + special.norm_cdf(-z) - 1.0)) <= 1e-12


def test_erf_cdf_cross_consistency():
    x = np.linspace(-8.0, 8.0, 321)
    lhs = special.erf(x)
    rhs = 2.0 * special.norm_cdf(x * np.sqrt(2.0)) - 1.0
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_quantile_cdf_round_trip():
    p = np.concatenate([
        np.geomspace(1e-10, 0.4, 60),
        np.linspace(0.4, 0.6, 21),
        1.0 - np.geomspace(1e-10, 0.4, 60),
    ])
    back = special.norm_cdf(special.norm_quantile(p))
    assert np.max(np.abs(back - p)) <= 1e-9


def test_erf_round_trip():
    u = np.linspace(-0.999999, 0.999999, 201)
    assert np.max(np.abs(special.erf(special.erf_inv(u)) - u)) <= 1e-9


def test_log_space_variants():
    assert abs(special.norm_logcdf(-40.0) + 804.608442013754) <= 1e-9
    assert np.isfinite(special.norm_logcdf(-300.0))
    assert abs(special.log_erfc(5.0) - np.log(special.erfc(5.0))) <= 1e-10
    assert np.isfinite(special.log_erfc(40.0))  # erfc(40) underflows to 0


def test_pdf_logpdf_agree():
    z = np.linspace(-10.0, 10.0, 101)
    assert np.allclose(special.norm_pdf(z), np.exp(special.norm_logpdf(z)), rtol=1e-14)
