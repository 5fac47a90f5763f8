"""Unit tests for the special-function and quadrature helpers."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import minimize_scalar
from scipy.special import dawsn, eval_genlaguerre, gammaln

from spinorbit.errors import ParameterError
from spinorbit.numerics.specfun import (
    RADIAL_CUTOFF,
    dawson,
    laguerre,
    laguerre_table,
    log_gamma,
    radial_quadrature,
    sinc,
)


def _laguerre_series(n_max: int, alpha: int, x: Fraction) -> list:
    powers = [x**k / math.factorial(k) for k in range(n_max + 1)]
    return [
        sum(Fraction((-1) ** k * math.comb(n + alpha, n - k)) * powers[k] for k in range(n + 1))
        for n in range(n_max + 1)
    ]


@pytest.mark.parametrize("alpha", [0, 1, 2, 5])
def test_laguerre_matches_exact_series(alpha: int) -> None:
    grid = np.linspace(0.0, 40.0, 100)
    table = laguerre_table(30, alpha, grid)
    for j, x in enumerate(grid):
        for n, value in enumerate(_laguerre_series(30, alpha, Fraction(float(x)))):
            exact = float(value)
            assert abs(table[n, j] - exact) <= 1e-10 * max(1.0, abs(exact))


def test_laguerre_matches_scipy_for_fractional_alpha() -> None:
    x = np.linspace(0.0, 30.0, 61)
    table = laguerre_table(40, 2.5, x)
    for n in (0, 1, 7, 25, 40):
        reference = eval_genlaguerre(n, 2.5, x)
        scale = np.maximum(1.0, np.abs(reference))
        assert np.max(np.abs(table[n] - reference) / scale) < 1e-9


def test_laguerre_low_orders_and_scalar_return() -> None:
    assert laguerre(0, 3.0, 2.0) == 1.0
    assert laguerre(1, 3.0, 2.0) == pytest.approx(2.0)
    assert isinstance(laguerre(5, 0, 1.5), float)
    assert laguerre(2, 0, np.array([0.0, 1.0])).shape == (2,)


def test_laguerre_rejects_order_above_cap_and_nonfinite_argument() -> None:
    with pytest.raises(ParameterError):
        laguerre(501, 0, 1.0)
    with pytest.raises(ParameterError):
        laguerre(3, 0, float("nan"))


def test_log_gamma_matches_scipy() -> None:
    values = np.array([0.5, 1.0, 7.25, 300.0])
    assert np.allclose(log_gamma(values), gammaln(values), rtol=0, atol=1e-12)


def test_sinc_small_argument_branch() -> None:
    assert sinc(0.0) == 1.0
    assert sinc(1e-6) == pytest.approx(1.0 - 1e-12 / 6.0, abs=1e-15)
    assert sinc(math.pi / 2) == pytest.approx(2.0 / math.pi, rel=1e-15)
    values = sinc(np.array([0.0, math.pi, -math.pi / 2]))
    assert values == pytest.approx([1.0, 0.0, 2.0 / math.pi], abs=1e-15)


@pytest.mark.parametrize("x", np.concatenate([np.linspace(-6.0, 6.0, 121), [3.999, 4.0, 4.001, 12.5, 37.0, 50.0]]))
def test_dawson_matches_scipy(x: float) -> None:
    assert dawson(x) == pytest.approx(dawsn(x), rel=1e-12, abs=1e-300)


def test_dawson_is_odd_and_vanishes_at_origin() -> None:
    assert dawson(0.0) == 0.0
    for x in (0.3, 2.0, 7.5):
        assert dawson(-x) == -dawson(x)


def test_dawson_ode_residual() -> None:
    h = 1e-5
    for x in np.linspace(-5.0, 5.0, 101):
        derivative = (dawson(x + h) - dawson(x - h)) / (2 * h)
        assert abs(derivative - (1.0 - 2.0 * x * dawson(x))) <= 1e-8


def test_dawson_maximum() -> None:
    result = minimize_scalar(lambda x: -dawson(x), bounds=(0.5, 1.5), method="bounded", options={"xatol": 1e-10})
    assert result.x == pytest.approx(0.9241389, abs=1e-6)
    assert dawson(result.x) == pytest.approx(0.5410443, abs=1e-6)


def test_dawson_asymptote_and_cap() -> None:
    assert dawson(40.0) == pytest.approx(1.0 / 80.0, rel=1e-3)
    with pytest.raises(ParameterError):
        dawson(50.5)


@pytest.mark.parametrize("order", [8, 100, 128, 352, 512])
def test_radial_quadrature_node_count_and_span(order: int) -> None:
    rule = radial_quadrature(order)
    assert rule.order == order
    assert sum(rule.weights) == pytest.approx(RADIAL_CUTOFF, rel=1e-13)
    assert 0.0 < min(rule.nodes) and max(rule.nodes) < RADIAL_CUTOFF


def test_radial_quadrature_integrates_gaussian_moments() -> None:
    rule = radial_quadrature()
    xi = rule.xi
    assert rule.integrate(2.0 * xi * np.exp(-xi * xi)) == pytest.approx(1.0, abs=1e-14)
    assert rule.integrate(xi**4 * np.exp(-xi * xi)) == pytest.approx(3.0 * math.sqrt(math.pi) / 8.0, abs=1e-14)


def test_radial_quadrature_is_cached_and_validated() -> None:
    assert radial_quadrature(128) is radial_quadrature(128)
    with pytest.raises(ParameterError):
        radial_quadrature(4)
    with pytest.raises(ParameterError):
        radial_quadrature(1024)


@pytest.mark.parametrize("order, degree", [(8, 15), (24, 23), (128, 31)])
def test_radial_quadrature_polynomial_degree_bound(order: int, degree: int) -> None:
    xi = radial_quadrature(order).xi
    exact = RADIAL_CUTOFF ** (degree + 1) / (degree + 1)
    assert radial_quadrature(order).integrate(xi**degree) == pytest.approx(exact, rel=1e-12)
