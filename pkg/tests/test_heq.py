import math

import numpy as np
import pytest

from algebra.cpoly import Poly
from algebra.parse import parse_expr
from algebra.qcore import HahnParams
from algebra.ratfun import POLE, RatFun, rat_eval
from core.errors import InvalidArgumentError, InvalidParameterError
from operators.hahn import hahn_diff, hahn_iter
from operators.heq import (
    PowerSeries,
    coefficient_decay,
    convergence_radius,
    default_residual_points,
    heq_residual,
    heq_solve,
    series_arith,
    series_eval,
    series_from_ratfun,
    series_hahn,
)
from tests.conftest import random_ratfun


def _w(coeffs, p, trunc=4):
    return PowerSeries(p.z0, coeffs, trunc)


def test_series_arithmetic(params):
    one_plus_w = _w([1, 1], params)
    assert np.allclose(series_arith("add", one_plus_w, _w([0, -1], params)).coeffs, [1, 0, 0, 0, 0])
    product = series_arith("mul", one_plus_w, _w([1, -1], params))
    assert np.allclose(product.coeffs, [1, 0, -1, 0, 0])
    assert np.allclose(series_arith("scale", _w([0, 0, 1], params), 3).coeffs, [0, 0, 3, 0, 0])
    with pytest.raises(InvalidArgumentError):
        series_arith("add", one_plus_w, PowerSeries(0, [1], 4))


def test_truncation_follows_smaller_operand(params):
    result = series_arith("add", _w([1, 2, 3], params, 2), _w([1], params, 6))
    assert result.trunc == 2


def test_series_hahn_diagonal(params):
    assert np.allclose(series_hahn(PowerSeries.constant(3, params.z0, 3), params).coeffs, 0)
    assert np.allclose(series_hahn(_w([0, 1], params, 2), params).coeffs, [1, 0])
    assert np.allclose(series_hahn(_w([0, 0, 1], params, 2), params).coeffs, [0, 1.5])
    with pytest.raises(InvalidArgumentError):
        series_hahn(PowerSeries(0, [0, 1], 2), params)


def test_series_hahn_agrees_with_rational_operator(params):
    rng = np.random.default_rng(8)
    for degree in range(1, 7):
        coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        g = RatFun.from_poly(Poly(coeffs))
        series = series_hahn(series_from_ratfun(g, params, degree), params)
        exact = hahn_diff(g, params)
        for z in params.z0 + 0.8 * np.exp(2j * np.pi * np.arange(20) / 20):
            expected = rat_eval(exact, z)
            assert abs(series_eval(series, z) - expected) <= 1e-9 * max(1.0, abs(expected))


def test_q_exponential(params):
    solution = heq_solve([-1], [1], 6, params)
    assert solution.center == pytest.approx(2)
    assert solution.coeffs[1] == pytest.approx(1)
    assert solution.coeffs[2] == pytest.approx(2 / 3)
    assert solution.coeffs[3] == pytest.approx(8 / 21)
    residual = heq_residual([-1], solution, [params.z0 + 0.1], params)
    assert abs(residual[0]) < 1e-8


def test_trivial_equations(params):
    constant = heq_solve([0], [5], 5, params)
    assert np.allclose(constant.coeffs, [5, 0, 0, 0, 0, 0])
    linear = heq_solve([PowerSeries.constant(0, params.z0, 8), 0], [2, -1], 8, params)
    assert np.allclose(linear.coeffs, [2, -1] + [0] * 7)


def test_rational_coefficients(params):
    # A_0 = -1/(1 - w) with w = z - z0
    coefficient = parse_expr("-1/(3 - z)")
    solution = heq_solve([coefficient], [1], 10, params)
    residuals = heq_residual([coefficient], solution, [params.z0 + 0.05, params.z0 - 0.05j], params)
    assert max(abs(r) for r in residuals) < 1e-8


def test_truncation_limited_by_coefficients(params):
    short = PowerSeries.constant(-1, params.z0, 3)
    solution = heq_solve([short], [1], 10, params)
    assert solution.trunc == 4


def test_residual_with_rational_solution(params):
    values = heq_residual([-1], RatFun.constant(1), [params.z0 + 0.5], params)
    assert values[0] == pytest.approx(-1)
    assert heq_residual([0], RatFun.constant(1), [0.3], params)[0] == 0
    poles = heq_residual([parse_expr("1/z")], parse_expr("z"), [0], params)
    assert poles[0] is POLE


def test_preconditions(params):
    with pytest.raises(InvalidArgumentError):
        heq_solve([-1], [1, 2], 5, params)
    with pytest.raises(InvalidArgumentError):
        heq_solve([-1, 0], [1, 0], 1, params)
    with pytest.raises(InvalidParameterError):
        heq_solve([-1], [1], 5, HahnParams(2, 1))
    with pytest.raises(InvalidArgumentError):
        PowerSeries(0, [1], -1)
    with pytest.raises(InvalidArgumentError):
        series_from_ratfun(parse_expr("1/(z-2)"), params, 4)


def test_series_hahn_twice_matches_second_iterate(params):
    rng = np.random.default_rng(9)
    checked = 0
    while checked < 10:
        g = random_ratfun(rng, 3, 3)
        if any(abs(pole.location - params.z0) < 0.5 for pole in g.poles):
            continue
        twice = series_hahn(series_hahn(series_from_ratfun(g, params, 12), params), params)
        direct = series_from_ratfun(hahn_iter(g, 2, params), params, 10)
        scale = max(1.0, float(np.max(np.abs(direct.coeffs))))
        assert twice.trunc == direct.trunc == 10
        assert np.max(np.abs(twice.coeffs - direct.coeffs)) <= 1e-10 * scale
        checked += 1


def test_series_from_ratfun(params):
    series = series_from_ratfun(parse_expr("1/(3 - z)"), params, 5)
    # 1/(1 - w) around z0 = 2
    assert np.allclose(series.coeffs, [1] * 6)
    assert convergence_radius(series) == pytest.approx(1)


def test_growth_diagnostics(params):
    solution = heq_solve([-1], [1], 40, params)
    assert convergence_radius(solution) == pytest.approx(2, rel=1e-3)
    rows = coefficient_decay(solution)
    assert len(rows) == 41 and math.isnan(rows[-1][2])
    points = default_residual_points(solution, params)
    assert len(points) == 3 and points[0] == pytest.approx(params.z0 + 0.05 * convergence_radius(solution))
    polynomial = PowerSeries(params.z0, [1, 2], 3)
    assert convergence_radius(polynomial) == pytest.approx(0.5)
    assert convergence_radius(PowerSeries(params.z0, [1], 3)) == math.inf
