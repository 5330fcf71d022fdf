import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from algebra.qcore import (
    HahnParams,
    gauss_binomial,
    pochhammer_inf,
    pochhammer_n,
    q_integer,
    qpochhammer_zeros,
    sigma_k,
)
from core.errors import DegenerateParameterError, InvalidParameterError
from processing.nevan import integrate_points


def contractions(low, high):
    return st.builds(lambda r, t: r * cmath.exp(1j * t),
                     st.floats(low, high), st.floats(0, 2 * math.pi))


bounded_complex = st.builds(complex, st.floats(-1.4, 1.4), st.floats(-1.4, 1.4))


@pytest.mark.parametrize("n, expected", [(0, 0), (1, 1), (3, 1.75)])
def test_q_integer_values(n, expected):
    assert q_integer(n, 0.5) == pytest.approx(expected, abs=1e-15)


def test_q_integer_long_sum_matches_closed_form():
    assert q_integer(100, 0.5) == pytest.approx((1 - 0.5 ** 100) / 0.5, rel=1e-14)


def test_q_integer_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        q_integer(-1, 0.5)
    with pytest.raises(InvalidParameterError):
        q_integer(3, 1)


def test_pochhammer_finite():
    assert pochhammer_n(3 + 1j, 0.5, 0) == 1
    assert pochhammer_n(2, 0.5, 2) == 0
    assert pochhammer_n(0.5, 0.5, 2) == pytest.approx(0.375, abs=1e-15)


def test_pochhammer_infinite():
    assert pochhammer_inf(0, 0.5) == 1
    assert pochhammer_inf(1, 0.5) == 0
    brute = np.prod([1 - 0.5 * 0.5 ** k for k in range(60)])
    assert abs(pochhammer_inf(0.5, 0.5, 1e-12) - brute) <= 1e-12


def test_pochhammer_infinite_requires_contraction():
    with pytest.raises(InvalidParameterError):
        pochhammer_inf(0.5, 1.5)


def test_gauss_binomial_values():
    assert gauss_binomial(5, 0, 0.3) == 1
    assert gauss_binomial(2, 1, 0.5) == pytest.approx(1.5)
    assert gauss_binomial(3, 1, 0.5) == pytest.approx(1.75)
    q = 0.5
    assert gauss_binomial(4, 2, q) == pytest.approx(1 + q + 2 * q ** 2 + q ** 3 + q ** 4)


def test_gauss_binomial_symmetry_and_classical_limit():
    q = 0.4 + 0.3j
    for j in range(7):
        assert gauss_binomial(6, j, q) == pytest.approx(gauss_binomial(6, 6 - j, q), rel=1e-13)
    assert gauss_binomial(6, 3, 1) == math.comb(6, 3)


def test_gauss_binomial_root_of_unity():
    with pytest.raises(DegenerateParameterError):
        gauss_binomial(4, 2, -1 + 0j)
    with pytest.raises(InvalidParameterError):
        gauss_binomial(3, 4, 0.5)


def test_sigma_k_examples(params):
    z = 0.3 - 1.2j
    assert sigma_k(z, 0, params) == z
    assert sigma_k(0, 2, params) == pytest.approx(1.5)
    assert sigma_k(params.z0, 5, params) == pytest.approx(2)


def test_sigma_k_composes():
    rng = np.random.default_rng(7)
    p = HahnParams(0.6 - 0.2j, 0.7 + 1.1j)
    for _ in range(20):
        z = complex(rng.normal(), rng.normal())
        j, k = int(rng.integers(0, 9)), int(rng.integers(0, 9))
        lhs = sigma_k(z, j + k, p)
        rhs = sigma_k(sigma_k(z, j, p), k, p)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(z))


def test_hahn_params_validity(params):
    assert params.z0 == pytest.approx(2)
    assert params.operator_valid and params.theorem_valid
    assert params.fixed_point_ok()
    assert not HahnParams(1, 1).operator_valid
    assert HahnParams(2, 1).operator_valid
    assert not HahnParams(2, 1).theorem_valid
    with pytest.raises(InvalidParameterError):
        HahnParams(2, 1).require_theorem("test")
    with pytest.raises(InvalidParameterError):
        HahnParams(0, 1).require_operator("test")


def test_qpochhammer_zero_set_counting():
    zeros = qpochhammer_zeros(0.5, 2.0 ** 20)
    assert len(zeros) == 21
    assert integrate_points(zeros, 2.0 ** 20) == pytest.approx(210 * math.log(2), rel=1e-12)


@settings(deadline=None)
@given(bounded_complex, contractions(0.1, 0.7))
def test_pochhammer_infinite_matches_long_product(a, q):
    long_product = pochhammer_n(a, q, 200)
    assert abs(pochhammer_inf(a, q, 1e-12) - long_product) <= 1e-11 * max(1.0, abs(long_product))


@settings(deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), contractions(0.2, 0.9))
def test_gauss_binomial_pascal_identity(n, j, q):
    assume(j <= n)
    shifted = q ** j * gauss_binomial(n, j, q)
    lower = gauss_binomial(n, j - 1, q)
    scale = max(1.0, abs(shifted), abs(lower))
    assert abs(gauss_binomial(n + 1, j, q) - shifted - lower) <= 1e-12 * scale
