"""
Linear Hahn Difference Equations
Truncated power series at the fixed point z0, where D_{q,c} acts diagonally
"""
import logging
import math
import numbers
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from algebra.qcore import HahnParams, q_integer
from algebra.ratfun import POLE, RatFun, rat_compose_affine, rat_eval
from core.errors import DegenerateParameterError, InvalidArgumentError
from operators.hahn import hahn_iter

logger = logging.getLogger(__name__)

_CENTER_RTOL = 1e-12


@dataclass(frozen=True)
class PowerSeries:
    """Σ_{n≤trunc} a_n (z − center)^n"""
    center: complex
    coeffs: np.ndarray
    trunc: int

    def __post_init__(self):
        if self.trunc < 0:
            raise InvalidArgumentError("PowerSeries", f"truncation must be >= 0, got {self.trunc}")
        padded = np.zeros(self.trunc + 1, dtype=np.complex128)
        given = np.asarray(self.coeffs, dtype=np.complex128)[: self.trunc + 1]
        padded[: len(given)] = given
        padded.setflags(write=False)
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "coeffs", padded)

    @classmethod
    def constant(cls, value: complex, center: complex, trunc: int) -> "PowerSeries":
        return cls(center, [value], trunc)

    def __call__(self, z):
        return series_eval(self, z)


CoefficientLike = Union[PowerSeries, RatFun, complex]


def _check_centers(operation: str, a: PowerSeries, b: PowerSeries):
    if abs(a.center - b.center) > _CENTER_RTOL * (1 + abs(a.center)):
        raise InvalidArgumentError(operation, f"center mismatch: {a.center} vs {b.center}")


def series_arith(op: str, a: PowerSeries, b) -> PowerSeries:
    """
    Series arithmetic truncated to the smaller operand order.

    Args:
        op: 'add', 'sub', 'mul' (Cauchy product) or 'scale'
        a: Left operand
        b: PowerSeries, or a complex factor for 'scale'
    """
    if op == "scale":
        return PowerSeries(a.center, a.coeffs * complex(b), a.trunc)
    if not isinstance(b, PowerSeries):
        raise InvalidArgumentError("series_arith", f"{op} needs a PowerSeries operand")
    _check_centers("series_arith", a, b)
    trunc = min(a.trunc, b.trunc)
    left, right = a.coeffs[: trunc + 1], b.coeffs[: trunc + 1]
    if op == "add":
        return PowerSeries(a.center, left + right, trunc)
    if op == "sub":
        return PowerSeries(a.center, left - right, trunc)
    if op == "mul":
        return PowerSeries(a.center, np.convolve(left, right)[: trunc + 1], trunc)
    raise InvalidArgumentError("series_arith", f"unknown operation {op!r}")


def series_eval(s: PowerSeries, z):
    value = npoly.polyval(np.asarray(z) - s.center, s.coeffs)
    return complex(value) if np.ndim(value) == 0 else value


def _require_center(operation: str, s: PowerSeries, p: HahnParams):
    if abs(s.center - p.z0) > _CENTER_RTOL * (1 + abs(p.z0)):
        raise InvalidArgumentError(operation, f"series must be centered at z0 = {p.z0}, got {s.center}")


def series_hahn(a: PowerSeries, p: HahnParams) -> PowerSeries:
    """b_n = [n+1]_q a_{n+1}; truncation drops by one"""
    p.require_operator("series_hahn")
    _require_center("series_hahn", a, p)
    if a.trunc == 0:
        raise InvalidArgumentError("series_hahn", "a series truncated at order 0 has no difference")
    weights = np.array([q_integer(n + 1, p.q) for n in range(a.trunc)], dtype=np.complex128)
    return PowerSeries(a.center, weights * a.coeffs[1:], a.trunc - 1)


def _iterate_weight(m: int, i: int, q: complex) -> complex:
    """∏_{j=1}^{i} [m+j]_q, the factor mapping a_{m+i} to the w^m coefficient of D^i g"""
    weight = 1 + 0j
    for j in range(1, i + 1):
        weight *= q_integer(m + j, q)
    return weight


def _as_series(coefficient: CoefficientLike, p: HahnParams, trunc: int) -> PowerSeries:
    if isinstance(coefficient, PowerSeries):
        _require_center("heq_solve", coefficient, p)
        return coefficient
    if isinstance(coefficient, RatFun):
        return series_from_ratfun(coefficient, p, trunc)
    if isinstance(coefficient, numbers.Number):
        return PowerSeries.constant(complex(coefficient), p.z0, trunc)
    raise InvalidArgumentError("heq_solve", f"unsupported coefficient type {type(coefficient).__name__}")


def heq_solve(A: Sequence[CoefficientLike], init: Sequence[complex], N: int, p: HahnParams) -> PowerSeries:
    """
    Formal solution of D^k g + A_{k−1} D^{k−1} g + … + A_0 g = 0 at z0.

    The w^n coefficient of D^i g is a_{n+i}·∏_{j=1}^{i}[n+j]_q, so a_{n+k}
    follows from already known coefficients, ascending in n.

    Args:
        A: Coefficients A_0..A_{k−1} (series at z0, RatFuns or constants)
        init: Prescribed a_0..a_{k−1}
        N: Truncation order of the result
        p: Parameters with 0 < |q| < 1

    Returns:
        Solution truncated at min(N, min_i trunc(A_i) + k)
    """
    k = len(A)
    if k < 1:
        raise InvalidArgumentError("heq_solve", "at least one coefficient A_0 is required")
    if len(init) != k:
        raise InvalidArgumentError("heq_solve", f"{k} initial values required, got {len(init)}")
    if N < k:
        raise InvalidArgumentError("heq_solve", f"truncation N = {N} below the equation order {k}")
    p.require_theorem("heq_solve")
    series = [_as_series(coefficient, p, N) for coefficient in A]
    trunc = min(N, min(s.trunc for s in series) + k)
    if trunc < N:
        logger.info(f"Solution truncated at {trunc} by the coefficient series orders")

    q = p.q
    a = np.zeros(trunc + 1, dtype=np.complex128)
    a[:k] = np.asarray(init, dtype=np.complex128)
    for n in range(trunc - k + 1):
        total = 0j
        for i, coefficient in enumerate(series):
            for m in range(n + 1):
                total += coefficient.coeffs[n - m] * _iterate_weight(m, i, q) * a[m + i]
        leading = _iterate_weight(n, k, q)
        if leading == 0:
            raise DegenerateParameterError("heq_solve", f"[m]_q vanishes for some m <= {n + k}")
        a[n + k] = -total / leading
    return PowerSeries(p.z0, a, trunc)


def _coefficient_value(coefficient: CoefficientLike, z: complex):
    if isinstance(coefficient, PowerSeries):
        return series_eval(coefficient, z)
    if isinstance(coefficient, RatFun):
        return rat_eval(coefficient, z)
    return complex(coefficient)


def heq_residual(A: Sequence[CoefficientLike], g: Union[PowerSeries, RatFun],
                 points: Sequence[complex], p: HahnParams) -> List:
    """
    Left side of the equation evaluated at each point.

    Series inputs are combined as series first (truncation shrinks by one per
    difference); RatFun inputs use exact iterates. Entries are POLE where a
    term has a pole.
    """
    k = len(A)
    if k < 1:
        raise InvalidArgumentError("heq_residual", "at least one coefficient A_0 is required")
    if isinstance(g, PowerSeries):
        if g.trunc < k:
            raise InvalidArgumentError("heq_residual", f"series order {g.trunc} below equation order {k}")
        iterates = [g]
        for _ in range(k):
            iterates.append(series_hahn(iterates[-1], p))
        residual = iterates[k]
        for i, coefficient in enumerate(A):
            term = series_arith("mul", _as_series(coefficient, p, g.trunc), iterates[i])
            residual = series_arith("add", residual, term)
        return [series_eval(residual, z) for z in points]

    iterates = [g] + [hahn_iter(g, i, p) for i in range(1, k + 1)]
    values = []
    for z in points:
        total = rat_eval(iterates[k], z)
        for i, coefficient in enumerate(A):
            if total is POLE:
                break
            factor = _coefficient_value(coefficient, z)
            term = rat_eval(iterates[i], z)
            if factor is POLE or term is POLE:
                total = POLE
                break
            total += factor * term
        values.append(total)
    return values


def series_from_ratfun(g: RatFun, p: HahnParams, N: int) -> PowerSeries:
    """Taylor expansion of g at z0 up to order N"""
    local = rat_compose_affine(g, 1, p.z0)
    den = local.den.coeffs
    if den[0] == 0 or abs(den[0]) <= 1e-14 * np.max(np.abs(den)):
        raise InvalidArgumentError("series_from_ratfun", f"g has a pole at z0 = {p.z0}")
    num = np.zeros(N + 1, dtype=np.complex128)
    size = min(N + 1, len(local.num.coeffs))
    num[:size] = local.num.coeffs[:size]
    out = np.zeros(N + 1, dtype=np.complex128)
    for n in range(N + 1):
        acc = num[n]
        for j in range(1, min(n, len(den) - 1) + 1):
            acc -= den[j] * out[n - j]
        out[n] = acc / den[0]
    return PowerSeries(p.z0, out, N)


def _tail_ratios(series: PowerSeries) -> List[Tuple[int, float]]:
    coeffs = np.abs(series.coeffs)
    ratios = []
    for n in range(len(coeffs) - 1):
        if coeffs[n] > 0 and coeffs[n + 1] > 0:
            ratios.append((n, float(coeffs[n] / coeffs[n + 1])))
    return ratios


def convergence_radius(series: PowerSeries) -> float:
    """Median of |a_n / a_{n+1}| over the upper half of the coefficients; inf for polynomials"""
    ratios = _tail_ratios(series)
    upper = [ratio for n, ratio in ratios if n >= series.trunc // 2]
    if not upper:
        upper = [ratio for _, ratio in ratios]
    if not upper:
        return math.inf
    radius = float(np.median(upper))
    logger.debug(f"Empirical convergence radius {radius:.6g} from {len(upper)} ratio(s)")
    return radius


def coefficient_decay(series: PowerSeries) -> List[Tuple[int, float, float]]:
    """Rows (n, |a_n|, |a_{n+1}/a_n|) for inspecting growth; NaN where undefined"""
    coeffs = np.abs(series.coeffs)
    rows = []
    for n in range(len(coeffs)):
        ratio = math.nan
        if n + 1 < len(coeffs) and coeffs[n] > 0:
            ratio = float(coeffs[n + 1] / coeffs[n])
        rows.append((n, float(coeffs[n]), ratio))
    return rows


def default_residual_points(series: PowerSeries, p: HahnParams) -> List[complex]:
    """z0 + ρ·{0.05, 0.1, 0.2} with ρ the empirical radius (1 when infinite)"""
    radius = convergence_radius(series)
    if not math.isfinite(radius):
        radius = 1.0
    return [p.z0 + radius * fraction for fraction in (0.05, 0.1, 0.2)]
