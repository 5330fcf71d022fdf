import numpy as np
import pytest

from algebra.parse import format_expr, parse_expr
from algebra.qcore import HahnParams
from algebra.ratfun import RatFun, rat_allclose, rat_arith, rat_compose_affine, rat_eval
from core.errors import InvalidArgumentError, InvalidParameterError
from operators.hahn import (
    forward_diff,
    hahn_diff,
    hahn_expand,
    hahn_iter,
    hahn_normalizer,
    hahn_reciprocal,
    jackson_diff,
)
from tests.conftest import SAMPLE_POINTS, random_params, random_ratfun, values_close


def test_constant_and_identity(params):
    assert hahn_diff(RatFun.constant(4 - 1j), params).is_zero
    identity = hahn_diff(parse_expr("z"), params)
    assert identity.is_constant and identity.constant_value() == pytest.approx(1)


def test_square(params):
    result = hahn_diff(parse_expr("z^2"), params)
    assert result.den.degree == 0
    assert np.allclose(result.num.coeffs, [1, 1.5], atol=1e-15)
    assert format_expr(result) == "(1.5*z + 1)"


def test_square_for_random_parameters():
    rng = np.random.default_rng(1)
    g = parse_expr("z^2")
    for _ in range(20):
        p = random_params(rng)
        result = hahn_diff(g, p)
        assert result.den.degree == 0
        assert np.max(np.abs(result.num.coeffs - [p.c, 1 + p.q])) <= 1e-12


def test_no_spurious_pole_at_fixed_point(params):
    g = parse_expr("(z^3 + 1)/(z - 0.5)")
    result = hahn_diff(g, params)
    assert all(abs(pole.location - params.z0) > 1e-6 for pole in result.poles)


def test_operator_parameters_validated():
    with pytest.raises(InvalidParameterError):
        hahn_diff(parse_expr("z"), HahnParams(1, 1))
    with pytest.raises(InvalidArgumentError):
        hahn_iter(parse_expr("z"), 0, HahnParams(0.5, 1))


def test_iterates(params):
    second = hahn_iter(parse_expr("z^2"), 2, params)
    assert second.is_constant and second.constant_value() == pytest.approx(1.5)
    assert rat_allclose(hahn_iter(parse_expr("z^3"), 1, params), hahn_diff(parse_expr("z^3"), params))
    assert hahn_iter(RatFun.constant(2), 3, params).is_zero


def test_expansion_matches_recursion_examples(params):
    expanded = hahn_expand(parse_expr("z^2"), 2, params)
    assert expanded.is_constant and expanded.constant_value() == pytest.approx(1.5, abs=1e-12)
    first = hahn_expand(parse_expr("z"), 1, params)
    assert first.constant_value() == pytest.approx(1)
    g = parse_expr("1/z")
    assert values_close(hahn_expand(g, 2, params), hahn_iter(g, 2, params), SAMPLE_POINTS, rtol=1e-9)


def test_normalizer_regression():
    assert hahn_normalizer(1, 0.5) == 1
    assert hahn_normalizer(2, 0.5) == pytest.approx(0.5)
    assert hahn_normalizer(3, 0.5) == pytest.approx(0.125)


def test_expansion_matches_recursion_on_random_functions():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        g = random_ratfun(rng, 5, 5)
        p = random_params(rng)
        for k in (2, 3, 4):
            assert rat_allclose(hahn_expand(g, k, p), hahn_iter(g, k, p), 1e-10)


def test_expansion_with_far_shifted_poles():
    # |q| < 1 pushes the poles of g(σ⁴z) out by |q|^-4; the numerator spans ~20 decades
    p = HahnParams(0.0882 - 0.4567j, 1.557 - 1.065j)
    g = parse_expr("(z^3 - 2*z + 1i)/(z^5 + (1-1i)*z^3 - 0.5*z + 1.7)")
    expanded = hahn_expand(g, 4, p)
    assert np.all(np.isfinite(expanded.num.coeffs))
    assert expanded.num.degree == expanded.den.degree - 6
    assert rat_allclose(expanded, hahn_iter(g, 4, p), 1e-10)


def test_linearity_and_product_rule():
    rng = np.random.default_rng(5)
    for _ in range(100):
        f, g = random_ratfun(rng, 3, 2), random_ratfun(rng, 3, 2)
        p = random_params(rng)
        alpha, beta = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
        combined = hahn_diff(f * alpha + g * beta, p)
        assert rat_allclose(combined, hahn_diff(f, p) * alpha + hahn_diff(g, p) * beta, 1e-10)
        # D(fg) = Df·g + f(qz + c)·Dg
        product = hahn_diff(f * g, p)
        shifted = rat_compose_affine(f, p.q, p.c)
        assert rat_allclose(product, hahn_diff(f, p) * g + shifted * hahn_diff(g, p), 1e-10)


def test_reciprocal(params):
    result = hahn_reciprocal(parse_expr("z"), params)
    assert values_close(result, parse_expr("-1/(z*(0.5*z+1))"), SAMPLE_POINTS, rtol=1e-10)
    assert hahn_reciprocal(RatFun.constant(3), params).is_zero
    via_definition = hahn_diff(parse_expr("1/z^2"), params)
    assert values_close(hahn_reciprocal(parse_expr("z^2"), params), via_definition, SAMPLE_POINTS, rtol=1e-10)
    with pytest.raises(InvalidArgumentError):
        hahn_reciprocal(RatFun.constant(0), params)


def test_limiting_operators():
    assert np.allclose(jackson_diff(parse_expr("z^2"), 0.5).num.coeffs, [0, 1.5])
    assert np.allclose(forward_diff(parse_expr("z^2"), 1).num.coeffs, [1, 2])
    with pytest.raises(InvalidParameterError):
        forward_diff(parse_expr("z"), 0)


def test_continuity_towards_forward_difference():
    g = parse_expr("z^2")
    near = hahn_diff(g, HahnParams(1 + 1e-8, 1))
    limit = forward_diff(g, 1)
    for z in (3, -2 + 1j, 7j):
        assert abs(rat_eval(near, z) - rat_eval(limit, z)) <= 1e-6 * (1 + abs(z))


def test_continuity_towards_jackson():
    g = parse_expr("(z^2 + 1)/(z - 3)")
    near = hahn_diff(g, HahnParams(0.5, 1e-9))
    limit = jackson_diff(g, 0.5)
    assert values_close(near, limit, SAMPLE_POINTS, rtol=1e-6)


def test_constant_multiple_commutes(params):
    g = parse_expr("(z - 1)/(z + 1)^2")
    scaled = hahn_diff(rat_arith("mul", g, RatFun.constant(3j)), params)
    assert values_close(scaled, hahn_diff(g, params) * 3j, SAMPLE_POINTS, rtol=1e-10)
