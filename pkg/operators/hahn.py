"""
Hahn Difference Operator
D_{q,c} g(z) = (g(qz + c) − g(z)) / ((q − 1)z + c) on rational functions
"""
import logging

from algebra.cpoly import PointMult, merge_points, poly_deflate, poly_from_points, poly_order_at
from algebra.qcore import HahnParams, gauss_binomial, sigma_k
from algebra.ratfun import RatFun, rat_arith, rat_compose_affine, rat_sum
from core.errors import InvalidArgumentError, InvalidParameterError

logger = logging.getLogger(__name__)


def hahn_normalizer(k: int, q: complex) -> complex:
    """
    Constant q^{k(k−1)/2} dividing the explicit k-th iterate expansion.

    With L(z) = (q − 1)z + c one has L(σz) = q·L(z), so the recursion for
    D² produces g(σ²z) − (1 + q)g(σz) + q·g(z) over q·L(z)², and each further
    step adds one more power of q per level.
    """
    return q ** (k * (k - 1) // 2)


def _divide_by_orbit_factor(total: RatFun, p: HahnParams, k: int, scale: complex) -> RatFun:
    """total / (scale · ((q − 1)z + c)^k), cancelling up to k factors (z − z0)"""
    if total.is_zero:
        return RatFun.constant(0)
    z0 = p.z0
    num = total.num
    take = min(poly_order_at(num, z0), k) if num.degree >= 1 else 0
    for _ in range(take):
        num = poly_deflate(num, z0)
    num = num.scaled(1 / (scale * (p.q - 1) ** k))
    poles = list(total.poles)
    if take < k:
        poles = merge_points(poles, [PointMult(z0, k - take)], "sum")
    return RatFun(num, poly_from_points(poles), poles=poles)


def hahn_diff(g: RatFun, p: HahnParams) -> RatFun:
    """
    Hahn difference of g.

    When g is finite at z0 = c/(1 − q) the numerator vanishes there and the
    factor (z − z0) is removed, so no spurious pole appears at z0.

    Args:
        g: Rational function
        p: Operator parameters, q ∉ {0, 1}

    Returns:
        Normalized D_{q,c} g
    """
    p.require_operator("hahn_diff")
    if g.is_constant:
        return RatFun.constant(0)
    shifted = rat_compose_affine(g, p.q, p.c)
    return _divide_by_orbit_factor(rat_arith("sub", shifted, g), p, 1, 1)


def hahn_iter(g: RatFun, k: int, p: HahnParams) -> RatFun:
    """k-fold application of hahn_diff"""
    if k < 1:
        raise InvalidArgumentError("hahn_iter", f"k must be >= 1, got {k}")
    p.require_operator("hahn_iter")
    result = g
    for step in range(k):
        result = hahn_diff(result, p)
        if result.is_zero:
            logger.debug(f"Iterate vanished after {step + 1} step(s)")
            break
    return result


def hahn_expand(g: RatFun, k: int, p: HahnParams) -> RatFun:
    """
    k-th iterate from the closed-form sum

        Σ_i (−1)^i [k i]_q q^{i(i−1)/2} g(σ^{k−i} z) / (q^{k(k−1)/2} ((q − 1)z + c)^k)

    with σ^m z = q^m z + c(q^m − 1)/(q − 1). Agrees with hahn_iter.
    """
    if k < 1:
        raise InvalidArgumentError("hahn_expand", f"k must be >= 1, got {k}")
    p.require_operator("hahn_expand")
    if g.is_constant:
        return RatFun.constant(0)
    q = p.q
    terms = []
    for i in range(k + 1):
        weight = (-1) ** i * gauss_binomial(k, i, q) * q ** (i * (i - 1) // 2)
        shift = k - i
        term = g if shift == 0 else rat_compose_affine(g, q ** shift, sigma_k(0, shift, p))
        terms.append(rat_arith("mul", term, RatFun.constant(weight)))
    total = rat_sum(terms)
    return _divide_by_orbit_factor(total, p, k, hahn_normalizer(k, q))


def hahn_reciprocal(g: RatFun, p: HahnParams) -> RatFun:
    """D_{q,c}(1/g) computed as −D_{q,c}g / (g(qz + c)·g(z))"""
    if g.is_zero:
        raise InvalidArgumentError("hahn_reciprocal", "g is identically zero")
    derivative = hahn_diff(g, p)
    if derivative.is_zero:
        return RatFun.constant(0)
    shifted = rat_compose_affine(g, p.q, p.c)
    return rat_arith("div", -derivative, rat_arith("mul", shifted, g))


def jackson_diff(g: RatFun, q: complex) -> RatFun:
    """Jackson q-difference (g(qz) − g(z))/((q − 1)z), the c = 0 case"""
    return hahn_diff(g, HahnParams(q, 0))


def forward_diff(g: RatFun, c: complex) -> RatFun:
    """Forward difference quotient (g(z + c) − g(z))/c, the q → 1 limit"""
    if c == 0:
        raise InvalidParameterError("forward_diff", "step c must be nonzero")
    if g.is_constant:
        return RatFun.constant(0)
    difference = rat_arith("sub", rat_compose_affine(g, 1, c), g)
    return rat_arith("mul", difference, RatFun.constant(1 / c))
