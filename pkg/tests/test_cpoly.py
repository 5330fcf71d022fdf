import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algebra.cpoly import (
    PointMult,
    Poly,
    cluster_tolerance,
    current_cluster_tol,
    merge_points,
    points_scale,
    poly_arith,
    poly_combine,
    poly_compose_affine,
    poly_deflate,
    poly_eval,
    poly_from_points,
    poly_order_at,
    poly_roots,
    remove_points,
)
from core.errors import InvalidArgumentError


def test_normal_form_strips_leading_zeros():
    assert Poly([1, 2, 0, 0]).degree == 1
    assert Poly([0, 0]).is_zero
    assert Poly([]).degree == -math.inf


def test_cancellation_residue_is_trimmed():
    result = poly_arith("add", Poly([1, 0, 1]), Poly([0, 0, -1]))
    assert result.degree == 0
    residue = poly_arith("sub", Poly([1, 0.1 + 0.2]), Poly([0, 0.3]))
    assert residue.degree == 0


def test_ring_operations():
    assert poly_arith("mul", Poly.linear(1), Poly.linear(-1)) == Poly([-1, 0, 1])
    quotient, remainder = poly_arith("divrem", Poly.monomial(3), Poly.linear(1))
    assert np.allclose(quotient.coeffs, [1, 1, 1])
    assert np.allclose(remainder.coeffs, [1])
    with pytest.raises(InvalidArgumentError):
        poly_arith("divrem", Poly.one(), Poly.zero())


def test_evaluation():
    assert poly_eval(Poly([-1, 0, 1]), 2) == 3
    assert poly_eval(Poly.zero(), 5 + 1j) == 0
    assert poly_eval(Poly([1, -2, 0, 1]), 1) == 0
    values = poly_eval(Poly([0, 1]), np.array([1, 2, 3]))
    assert np.allclose(values, [1, 2, 3])


def test_compose_affine():
    z = Poly([0, 1])
    assert np.allclose(poly_compose_affine(z, 0.5, 1).coeffs, [1, 0.5])
    assert np.allclose(poly_compose_affine(Poly.monomial(2), 1, 0).coeffs, [0, 0, 1])
    assert np.allclose(poly_compose_affine(Poly.monomial(2), 0.5, 1).coeffs, [1, 1, 0.25])


def test_deflate():
    cubic = poly_from_points([PointMult(1, 1), PointMult(2, 1), PointMult(3, 1)])
    assert np.allclose(poly_deflate(cubic, 3).coeffs, [2, -3, 1])
    assert np.allclose(poly_deflate(cubic, 1).coeffs, [6, -5, 1])


def _sorted_locations(points):
    return sorted((p.location for p in points), key=lambda z: (round(z.real, 6), round(z.imag, 6)))


def test_roots_simple():
    roots = poly_roots(Poly([1, 0, 1]))
    assert [p.mult for p in roots] == [1, 1]
    locations = _sorted_locations(roots)
    assert abs(locations[0] + 1j) < 1e-12 and abs(locations[1] - 1j) < 1e-12
    roots = poly_roots(Poly([2, -3, 1]))
    assert np.allclose(_sorted_locations(roots), [1, 2])


def test_roots_cluster_multiplicity():
    roots = poly_roots(Poly([-1, 3, -3, 1]))
    assert len(roots) == 1
    assert roots[0].mult == 3
    assert abs(roots[0].location - 1) < 1e-8


def test_roots_at_origin_are_exact():
    roots = poly_roots(Poly([0, 0, -1, 1]))
    assert PointMult(0, 2) in roots
    assert sum(p.mult for p in roots) == 3


def test_roots_reexpand():
    rng = np.random.default_rng(11)
    for degree in (3, 7, 12):
        angles = 2 * np.pi * np.arange(degree) / degree + rng.uniform(0, 0.2, degree)
        radii = rng.uniform(0.5, 2.0, degree)
        original = poly_from_points([PointMult(r * np.exp(1j * t), 1) for r, t in zip(radii, angles)], 2 - 1j)
        rebuilt = poly_from_points(poly_roots(original), original.lead)
        scale = original.norm()
        assert np.max(np.abs(rebuilt.coeffs - original.coeffs)) <= 1e-8 * scale


def test_order_at():
    assert poly_order_at(Poly.monomial(2), 0) == 2
    assert poly_order_at(Poly([1, 0, 1]), 0) == 0
    assert poly_order_at(Poly([2, -3, 0, 1]), 1) == 2
    with pytest.raises(InvalidArgumentError):
        poly_order_at(Poly.zero(), 1)


def test_cluster_tolerance_context():
    default = current_cluster_tol()
    with cluster_tolerance(1e-5):
        assert current_cluster_tol() == 1e-5
    assert current_cluster_tol() == default
    with pytest.raises(InvalidArgumentError):
        with cluster_tolerance(0):
            pass


def test_point_multisets():
    a = [PointMult(1, 2), PointMult(-1, 1)]
    b = [PointMult(1 + 1e-12, 1), PointMult(3, 1)]
    summed = merge_points(a, b, "sum")
    assert sorted(p.mult for p in summed) == [1, 1, 3]
    maxed = merge_points(a, b, "max")
    assert sorted(p.mult for p in maxed) == [1, 1, 2]
    assert remove_points(a, [PointMult(1, 1)]) == [PointMult(1, 1), PointMult(-1, 1)]
    with pytest.raises(InvalidArgumentError):
        remove_points(a, [PointMult(3, 1)])
    with pytest.raises(InvalidArgumentError):
        PointMult(0, 0)


@settings(deadline=None, max_examples=60)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2 ** 32 - 1))
def test_order_at_is_additive_under_products(left_order, right_order, seed):
    z0 = 0.5 + 0.25j
    rng = np.random.default_rng(seed)

    def factor(order):
        count = int(rng.integers(1, 4))
        others = []
        while len(others) < count:
            root = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if abs(root - z0) > 0.3:
                others.append(PointMult(root, 1))
        points = others + ([PointMult(z0, order)] if order else [])
        return poly_from_points(points, complex(rng.uniform(0.5, 2), rng.uniform(-1, 1)))

    a, b = factor(left_order), factor(right_order)
    assert poly_order_at(a, z0) == left_order
    assert poly_order_at(b, z0) == right_order
    assert poly_order_at(a * b, z0) == left_order + right_order


def test_poly_combine_trims_against_product_scale():
    # the leading entries agree only to the rounding of a 1e15-sized product
    left = (Poly([2, 1.0]), np.array([2, 1e15]))
    right = (Poly([0, -1.0 + 1e-9]), np.array([0, 1e15]))
    assert poly_combine([left, right]) == Poly([2])
    assert poly_arith("add", left[0], right[0]).degree == 1
    genuine = poly_combine([(Poly([1e15]), np.array([1e15])), (Poly([0, 1]), np.array([0, 1]))])
    assert genuine.degree == 1


def test_points_scale():
    assert np.allclose(points_scale([PointMult(-2j, 1), PointMult(1, 2)]), [2, 5, 4, 1])
    assert np.allclose(points_scale([]), [1])
