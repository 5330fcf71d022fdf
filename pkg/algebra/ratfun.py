"""
Rational Functions
Normalized quotients num/den with monic denominators and cached zero/pole data
"""
import logging
import math
import numbers
from typing import List, Optional, Sequence, Union

import numpy as np

from algebra.cpoly import (
    PointMult,
    Poly,
    current_cluster_tol,
    match_point,
    merge_points,
    poly_arith,
    poly_combine,
    poly_compose_affine,
    poly_deflate,
    poly_eval,
    poly_from_points,
    poly_order_at,
    poly_roots,
    points_scale,
    remove_points,
)
from core.errors import DegenerateInputError, InvalidArgumentError

logger = logging.getLogger(__name__)

INF = math.inf

Target = Union[complex, float]


def is_infinity(a) -> bool:
    """True for the point at infinity (math.inf as a target value)"""
    if isinstance(a, numbers.Real):
        return math.isinf(a)
    if isinstance(a, numbers.Complex):
        return math.isinf(a.real) or math.isinf(a.imag)
    return False


class _PoleMarker:
    """Value returned by evaluation at a pole"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "POLE"

    def __reduce__(self):
        return (_PoleMarker, ())


POLE = _PoleMarker()


class RatFun:
    """
    Rational function num/den.

    Instances are produced by rat_normalize (or by operations that preserve
    coprimality); the denominator is monic and zero/pole lists are cached.
    """

    __slots__ = ("num", "den", "_zeros", "_poles")

    def __init__(self, num: Poly, den: Poly, zeros: Optional[List[PointMult]] = None,
                 poles: Optional[List[PointMult]] = None):
        self.num = num
        self.den = den
        self._zeros = zeros
        self._poles = poles

    @classmethod
    def constant(cls, value: complex) -> "RatFun":
        return cls(Poly([value]), Poly.one(), zeros=[], poles=[])

    @classmethod
    def identity(cls) -> "RatFun":
        """g(z) = z"""
        return cls(Poly([0, 1]), Poly.one(), zeros=[PointMult(0, 1)], poles=[])

    @classmethod
    def from_poly(cls, poly: Poly) -> "RatFun":
        return cls(poly, Poly.one(), poles=[])

    @classmethod
    def coerce(cls, value) -> "RatFun":
        if isinstance(value, RatFun):
            return value
        if isinstance(value, Poly):
            return cls.from_poly(value)
        if isinstance(value, numbers.Number):
            return cls.constant(complex(value))
        raise InvalidArgumentError("RatFun.coerce", f"cannot convert {type(value).__name__}")

    @property
    def degree(self) -> int:
        """max(deg num, deg den); 0 for constants"""
        return int(max(self.num.degree, self.den.degree, 0))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    @property
    def lead(self) -> complex:
        return self.num.lead

    @property
    def zeros(self) -> List[PointMult]:
        if self._zeros is None:
            self._zeros = poly_roots(self.num) if self.num.degree >= 1 else []
        return self._zeros

    @property
    def poles(self) -> List[PointMult]:
        if self._poles is None:
            self._poles = poly_roots(self.den) if self.den.degree >= 1 else []
        return self._poles

    def constant_value(self) -> complex:
        if not self.is_constant:
            raise InvalidArgumentError("RatFun.constant_value", "function is not constant")
        return complex(self.num.coeffs[0])

    def __call__(self, z):
        return rat_eval(self, z)

    def __add__(self, other):
        return rat_arith("add", self, RatFun.coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return rat_arith("sub", self, RatFun.coerce(other))

    def __rsub__(self, other):
        return rat_arith("sub", RatFun.coerce(other), self)

    def __mul__(self, other):
        return rat_arith("mul", self, RatFun.coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return rat_arith("div", self, RatFun.coerce(other))

    def __rtruediv__(self, other):
        return rat_arith("div", RatFun.coerce(other), self)

    def __pow__(self, exponent: int):
        return rat_arith("ipow", self, exponent)

    def __neg__(self):
        return RatFun(-self.num, self.den, self._zeros, self._poles)

    def __repr__(self):
        return f"RatFun(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"


def _scale_points(points: Sequence[PointMult], factor: int) -> List[PointMult]:
    return [PointMult(p.location, p.mult * factor) for p in points]


def rat_normalize(num: Poly, den: Poly, tol: float = None, *,
                  zeros: Optional[List[PointMult]] = None,
                  poles: Optional[List[PointMult]] = None) -> RatFun:
    """
    Cancel common roots of num and den and make den monic.

    This is the only place numerator roots are matched against denominator
    roots. Callers that already know the root data pass it as hints.

    Args:
        num: Numerator
        den: Denominator, nonzero
        tol: Cluster tolerance (defaults to the context value)
        zeros: Known roots of num
        poles: Known roots of den

    Returns:
        Normalized RatFun
    """
    tol = current_cluster_tol() if tol is None else tol
    if den.is_zero:
        raise InvalidArgumentError("rat_normalize", "zero denominator")
    if num.is_zero:
        return RatFun(Poly.zero(), Poly.one(), zeros=[], poles=[])
    if den.degree == 0:
        return RatFun(num.scaled(1 / den.lead), Poly.one(), zeros=zeros, poles=[])

    pole_list = list(poles) if poles is not None else poly_roots(den, tol)
    if num.degree == 0:
        return RatFun(num.scaled(1 / den.lead), den.scaled(1 / den.lead), zeros=[], poles=pole_list)

    zero_list = list(zeros) if zeros is not None else poly_roots(num, tol)
    common: List[PointMult] = []
    for pole in pole_list:
        index = match_point(zero_list, pole.location, tol)
        if index >= 0:
            common.append(PointMult(pole.location, min(pole.mult, zero_list[index].mult)))

    lead = num.lead / den.lead
    if not common:
        return RatFun(num.scaled(1 / den.lead), den.scaled(1 / den.lead), zeros=zero_list, poles=pole_list)

    logger.debug(f"Cancelled {sum(p.mult for p in common)} common root(s)")
    zero_list = remove_points(zero_list, common, tol)
    pole_list = remove_points(pole_list, common, tol)
    return RatFun(poly_from_points(zero_list, lead), poly_from_points(pole_list),
                  zeros=zero_list, poles=pole_list)


def _reciprocal(b: RatFun) -> RatFun:
    if b.is_zero:
        raise InvalidArgumentError("rat_arith", "division by the zero function")
    lead = b.num.lead
    return RatFun(b.den.scaled(1 / lead), b.num.scaled(1 / lead), zeros=b.poles, poles=b.zeros)


def rat_sum(terms: Sequence[RatFun], tol: float = None) -> RatFun:
    """
    Sum of several rational functions over one common denominator.

    The numerator is assembled in a single pass and normalized once, so
    cancellation between any of the terms is judged against all of them.
    Each contribution num·cofactor carries its absolute convolution as the
    rounding scale of its coefficients.

    Args:
        terms: Summands
        tol: Cluster tolerance (defaults to the context value)

    Returns:
        Normalized sum
    """
    tol = current_cluster_tol() if tol is None else tol
    terms = [t for t in terms if not t.is_zero]
    if not terms:
        return RatFun.constant(0)
    if len(terms) == 1:
        return terms[0]
    if all(t.den.degree == 0 for t in terms):
        return RatFun(poly_combine([(t.num, np.abs(t.num.coeffs)) for t in terms]), Poly.one(), poles=[])
    common: List[PointMult] = []
    for term in terms:
        common = merge_points(common, term.poles, "max", tol)
    parts = []
    for term in terms:
        missing = remove_points(common, term.poles, tol)
        parts.append((term.num * poly_from_points(missing),
                      np.convolve(np.abs(term.num.coeffs), points_scale(missing))))
    return rat_normalize(poly_combine(parts), poly_from_points(common), tol, poles=common)


def _add(a: RatFun, b: RatFun, sign: int, tol: float) -> RatFun:
    return rat_sum([a, b if sign > 0 else -b], tol)


def rat_arith(op: str, a: RatFun, b: Union[RatFun, int], tol: float = None) -> RatFun:
    """
    Field operations on rational functions.

    Denominators are combined from cached pole data (least common multiple
    for sums, multiset union for products) rather than re-solved.

    Args:
        op: One of 'add', 'sub', 'mul', 'div', 'ipow'
        a: Left operand
        b: Right operand (an integer exponent for 'ipow')
        tol: Cluster tolerance

    Returns:
        Normalized result
    """
    tol = current_cluster_tol() if tol is None else tol
    if op == "ipow":
        if not isinstance(b, numbers.Integral):
            raise InvalidArgumentError("rat_arith", f"integer exponent required, got {b!r}")
        n = int(b)
        if n == 0:
            return RatFun.constant(1)
        base = a if n > 0 else _reciprocal(a)
        n = abs(n)
        num = Poly([base.num.lead ** n]) if base.num.degree == 0 else Poly(
            np.polynomial.polynomial.polypow(base.num.coeffs, n))
        den = Poly(np.polynomial.polynomial.polypow(base.den.coeffs, n))
        zeros = _scale_points(base._zeros, n) if base._zeros is not None else None
        return RatFun(num, den, zeros=zeros, poles=_scale_points(base.poles, n))

    if not isinstance(b, RatFun):
        b = RatFun.coerce(b)
    if op == "add":
        return _add(a, b, 1, tol)
    if op == "sub":
        return _add(a, b, -1, tol)
    if op == "div":
        return rat_arith("mul", a, _reciprocal(b), tol)
    if op == "mul":
        if a.is_zero or b.is_zero:
            return RatFun.constant(0)
        if b.is_constant or a.is_constant:
            scalar, other = (b, a) if b.is_constant else (a, b)
            value = scalar.constant_value()
            return RatFun(other.num.scaled(value), other.den, zeros=other._zeros, poles=other._poles)
        num = a.num * b.num
        poles = merge_points(a.poles, b.poles, "sum", tol)
        zeros = None
        if a._zeros is not None and b._zeros is not None:
            zeros = merge_points(a._zeros, b._zeros, "sum", tol)
        if not poles:
            return RatFun(num, Poly.one(), zeros=zeros, poles=[])
        if (zeros is not None and not zeros) or num.degree == 0:
            return RatFun(num, a.den * b.den, zeros=[], poles=poles)
        return rat_normalize(num, a.den * b.den, tol, zeros=zeros, poles=poles)
    raise InvalidArgumentError("rat_arith", f"unknown operation {op!r}")


def _deflated_eval(g: RatFun, z: complex, tol: float):
    num_order = poly_order_at(g.num, z, tol)
    den_order = poly_order_at(g.den, z, tol)
    num, den = g.num, g.den
    for _ in range(min(num_order, den_order)):
        num = poly_deflate(num, z)
        den = poly_deflate(den, z)
    den_value = poly_eval(den, z)
    if den_order > num_order or den_value == 0:
        return POLE
    return poly_eval(num, z) / den_value


def rat_eval(g: RatFun, z: complex, tol: float = None):
    """
    Evaluate g at z.

    Returns POLE when the denominator vanishes (relative to its coefficient
    scale) and the numerator does not; a common near-zero is resolved by
    deflating both polynomials.
    """
    tol = current_cluster_tol() if tol is None else tol
    z = complex(z)
    den_value = poly_eval(g.den, z)
    num_value = poly_eval(g.num, z)
    radius = abs(z)
    den_small = abs(den_value) <= tol * g.den.abs_eval(radius)
    if not den_small:
        return num_value / den_value
    if g.num.is_zero:
        return 0j
    if abs(num_value) > tol * g.num.abs_eval(radius):
        return POLE
    return _deflated_eval(g, z, tol)


def rat_compose_affine(g: RatFun, alpha: complex, beta: complex) -> RatFun:
    """g(αz + β); zeros and poles map to (r − β)/α"""
    if alpha == 0:
        raise InvalidArgumentError("rat_compose_affine", "alpha must be nonzero")
    num = poly_compose_affine(g.num, alpha, beta)
    den = poly_compose_affine(g.den, alpha, beta)
    scale = 1 / den.lead
    poles = [PointMult((p.location - beta) / alpha, p.mult) for p in g.poles]
    zeros = None
    if g._zeros is not None:
        zeros = [PointMult((p.location - beta) / alpha, p.mult) for p in g._zeros]
    return RatFun(num.scaled(scale), den.scaled(scale), zeros=zeros, poles=poles)


def rat_zeros_poles(g: RatFun, a: Target, tol: float = None) -> List[PointMult]:
    """
    Solutions of g = a with multiplicities; the poles of g when a = ∞.

    Raises:
        DegenerateInputError: g ≡ a
    """
    if is_infinity(a):
        return list(g.poles)
    a = complex(a)
    if a == 0:
        if g.is_zero:
            raise DegenerateInputError("rat_zeros_poles", "g is identically 0")
        return list(g.zeros)
    shifted = poly_arith("sub", g.num, g.den.scaled(a))
    if shifted.is_zero:
        raise DegenerateInputError("rat_zeros_poles", f"g is identically {a}")
    if shifted.degree == 0:
        return []
    return poly_roots(shifted, tol)


def rat_order_at(g: RatFun, z0: complex, tol: float = None) -> float:
    """Zero order (positive) or pole order (negative) at z0; inf for g ≡ 0"""
    if g.is_zero:
        return math.inf
    return poly_order_at(g.num, z0, tol) - poly_order_at(g.den, z0, tol)


def rat_allclose(a: RatFun, b: RatFun, tol: float = 1e-10) -> bool:
    """Coefficient-wise comparison of normalized forms, relative to the coefficient scale"""
    if len(a.num.coeffs) != len(b.num.coeffs) or len(a.den.coeffs) != len(b.den.coeffs):
        return False
    scale = max(1.0, a.num.norm(), b.num.norm())
    if np.max(np.abs(a.num.coeffs - b.num.coeffs)) > tol * scale:
        return False
    scale = max(1.0, a.den.norm(), b.den.norm())
    return bool(np.max(np.abs(a.den.coeffs - b.den.coeffs)) <= tol * scale)


def rat_max_coeff_diff(a: RatFun, b: RatFun) -> float:
    """Largest coefficient deviation between two normalized forms (inf on shape mismatch)"""
    if len(a.num.coeffs) != len(b.num.coeffs) or len(a.den.coeffs) != len(b.den.coeffs):
        return math.inf
    return float(max(np.max(np.abs(a.num.coeffs - b.num.coeffs)),
                     np.max(np.abs(a.den.coeffs - b.den.coeffs))))
