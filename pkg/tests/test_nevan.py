import math

import numpy as np
import pytest

from algebra.cpoly import PointMult
from algebra.parse import parse_expr
from algebra.qcore import HahnParams, qpochhammer_zeros
from algebra.ratfun import INF, RatFun
from core.errors import DegenerateInputError, InvalidArgumentError
from processing.nevan import (
    NevanlinnaProfile,
    characteristic_T,
    count_points,
    counting_n,
    defect_indices,
    first_main_bound,
    format_target,
    hahn_reduced_points,
    integrate_points,
    integrated_N,
    jensen_mean,
    nhat_counting,
    nhat_integrated,
    nqc_integrated,
    nudge_radius,
    order_estimators,
    proximity_m,
)


def test_counting_examples():
    assert counting_n(parse_expr("1/(z-1)"), 2) == 1
    assert counting_n(parse_expr("z^2"), 1, 0) == 2
    assert counting_n(parse_expr("z + 1/z"), 0.5, 2) == 0


def test_integrated_counting_examples():
    assert integrated_N(parse_expr("1/(z-1)"), math.e) == pytest.approx(1)
    assert integrated_N(parse_expr("1/((z-1)*(z+2)^2)"), 4) == pytest.approx(4 * math.log(2))
    assert integrated_N(parse_expr("z^2"), 5, 1) == pytest.approx(2 * math.log(5))
    assert integrated_N(parse_expr("1/z"), math.e) == pytest.approx(1)


def test_closed_form_point_sets():
    points = [PointMult(0, 2), PointMult(1, 1), PointMult(3j, 1)]
    assert count_points(points, 2) == 3
    assert integrate_points(points, 2) == pytest.approx(3 * math.log(2))
    assert integrate_points([PointMult(1e-15, 1)], math.e) == pytest.approx(1)
    with pytest.raises(InvalidArgumentError):
        integrate_points(points, 0)


def test_nudge_off_singular_circle():
    r, nudged = nudge_radius(1.0, [PointMult(1, 1)])
    assert nudged and r == pytest.approx(1 + 1e-8)
    assert nudge_radius(2.0, [PointMult(1, 1)]) == (2.0, False)


def test_proximity_examples():
    assert proximity_m(parse_expr("z"), 10) == pytest.approx(math.log(10), abs=1e-8)
    assert proximity_m(RatFun.constant(0.5), 7) == 0
    assert proximity_m(parse_expr("z + 1/z"), 100) == pytest.approx(math.log(100), abs=0.05)
    with pytest.raises(InvalidArgumentError):
        proximity_m(parse_expr("z"), -1)


def test_characteristic_examples():
    assert characteristic_T(parse_expr("z"), 10) == pytest.approx(math.log(10), abs=1e-8)
    assert characteristic_T(parse_expr("1/(z-1)"), math.e ** 2) == pytest.approx(2, abs=1e-9)
    assert abs(characteristic_T(parse_expr("z + 1/z"), 1000) - 2 * math.log(1000)) <= 1.0


def test_quadrature_stable_under_doubled_sampling(suite_grid):
    for text in ("(z^2+1)/(z-2)", "z + 1/z", "(z^3 - 1i)/(z^2 + 0.5*z - 3)"):
        g = parse_expr(text)
        coarse = NevanlinnaProfile(g, None, 256)
        fine = NevanlinnaProfile(g, None, 512)
        for r in suite_grid[::4]:
            assert coarse.m(r) == pytest.approx(fine.m(r), abs=1e-9)
            assert coarse.m(r, 0) == pytest.approx(fine.m(r, 0), abs=1e-9)
            assert coarse.T(r) == pytest.approx(fine.T(r), abs=1e-9)


def test_jensen_cross_check():
    g = parse_expr("(z^2+1)/(z-2)")
    for r in (0.5, 1.7, 3.0, 12.0):
        quadrature = proximity_m(g, r) - proximity_m(g, r, 0)
        assert quadrature == pytest.approx(jensen_mean(g, r), abs=1e-8)
    shifted = proximity_m(g, 3.0, 1) - proximity_m(parse_expr("(z^2+1)/(z-2) - 1"), 3.0)
    assert -shifted == pytest.approx(jensen_mean(g, 3.0, 1), abs=1e-8)


def test_hahn_counting_examples(jackson, params):
    square = parse_expr("z^2")
    assert nhat_counting(square, 1, 0, jackson) == 1
    assert nhat_counting(square, 1, 0, params) == 2
    assert nhat_counting(parse_expr("z"), 1, 0, params) == 1
    assert nhat_integrated(square, math.e, 0, jackson) == pytest.approx(1)
    assert nhat_integrated(parse_expr("z"), math.e, 0, params) == pytest.approx(1)


def test_hahn_counting_cubic(jackson):
    cube = parse_expr("(z-2)^3")
    # D_{0.5,0}(z-2)^3 equals 1 at z = 2, so no multiplicity is removed
    assert nhat_integrated(cube, 4, 0, jackson) == pytest.approx(3 * math.log(2), abs=1e-6)
    assert sum(p.mult for p in hahn_reduced_points(cube, 0, jackson)) == 3


def test_fixed_point_multiplicity_is_reduced(params):
    # z0 = 2 is a double zero of g and a simple zero of D g
    g = parse_expr("(z-2)^2")
    assert nhat_counting(g, 3, 0, params) == 1
    assert counting_n(g, 3, 0) == 2


def test_pole_reduction_uses_reciprocal(jackson):
    g = parse_expr("1/z^2")
    # D(z^2) = 1.5 z vanishes once at the origin
    assert nhat_counting(g, 1, INF, jackson) == 1


def test_nqc(params):
    assert nqc_integrated(parse_expr("z"), 5, params) == 0
    assert nqc_integrated(parse_expr("z^2"), 5, params) == pytest.approx(math.log(5 / (2 / 3)))
    profile = NevanlinnaProfile(RatFun.constant(2), params)
    with pytest.raises(DegenerateInputError):
        profile.Nqc(2)


def test_first_main_bound():
    assert first_main_bound(parse_expr("z"), 1) == pytest.approx(math.log(2))
    assert first_main_bound(parse_expr("z^2 + 3"), 0) == pytest.approx(math.log(3) + math.log(2))
    with pytest.raises(InvalidArgumentError):
        first_main_bound(parse_expr("z"), INF)


def test_defect_indices_examples(params, jackson, suite_grid):
    entire = defect_indices(parse_expr("z"), INF, params, suite_grid)
    assert entire.delta == pytest.approx(1) and entire.big_theta_qc == pytest.approx(1)
    square = defect_indices(parse_expr("z^2"), 0, jackson, suite_grid)
    assert square.delta == pytest.approx(0, abs=1e-9)
    assert square.theta_qc == pytest.approx(0.5, abs=1e-9)
    assert square.big_theta_qc == pytest.approx(0.5, abs=1e-9)
    double = defect_indices(parse_expr("z + 1/z"), 2, params, suite_grid)
    assert abs(double.delta) < 1e-6


def test_defect_indices_preconditions(params, suite_grid):
    with pytest.raises(InvalidArgumentError):
        defect_indices(parse_expr("z"), 0, params, suite_grid[:5])
    with pytest.raises(DegenerateInputError):
        defect_indices(RatFun.constant(1), 0, params, suite_grid)


def test_order_of_rational_function():
    grid = np.geomspace(1, 2.0 ** 40, 41)
    samples = [(r, characteristic_T(parse_expr("z^2"), r)) for r in grid]
    estimate = order_estimators(samples)
    assert estimate.rho <= 0.1
    assert 0.8 <= estimate.rho_log <= 1.2


def test_logarithmic_order_oracles():
    radii = 2.0 ** np.arange(1, 41)
    squared = order_estimators([(r, math.log(r) ** 2) for r in radii])
    assert 1.9 <= squared.rho_log <= 2.1
    zeros = qpochhammer_zeros(0.5, radii[-1])
    pochhammer = order_estimators([(r, integrate_points(zeros, r)) for r in radii])
    assert 1.8 <= pochhammer.rho_log <= 2.2


def test_order_estimator_preconditions():
    with pytest.raises(InvalidArgumentError):
        order_estimators([(r, 1.0) for r in range(1, 6)])
    with pytest.raises(InvalidArgumentError):
        order_estimators([(1 + 0.1 * k, 1.0) for k in range(20)])


def test_target_labels():
    assert format_target(INF) == "inf"
    assert format_target(2) == "2"
    assert format_target(-0.5) == "-0.5"
    assert format_target(1 + 2j) == "1+2i"
    assert format_target(3j) == "3i"
