"""
Nevanlinna Functionals
Proximity, counting and characteristic functions, Hahn-type counting and growth estimators
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.stats import linregress

from algebra.cpoly import PointMult, poly_arith, poly_order_at
from algebra.qcore import HahnParams
from algebra.ratfun import INF, RatFun, is_infinity, rat_order_at, rat_zeros_poles
from core.errors import DegenerateInputError, InvalidArgumentError
from operators.hahn import hahn_diff, hahn_reciprocal

logger = logging.getLogger(__name__)

GAUSS_ORDER = 8
DEFAULT_THETA_SAMPLES = 256
DEFAULT_QUAD_TOL = 1e-12
# points closer to 0 than this count as the origin in N(r)
ORIGIN_RADIUS = 1e-14
NUDGE_BAND = 1e-9
NUDGE_STEP = 1e-8
TOP_FRACTION = 0.2
MIN_GRID_FOR_INDICES = 20

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)


def target_key(a):
    """Hashable key of a target value (None for ∞)"""
    return None if is_infinity(a) else complex(a)


def format_target(a) -> str:
    """Compact label: 'inf', '2', '-0.5', '1+2i'"""
    if is_infinity(a):
        return "inf"
    a = complex(a)
    if a.imag == 0:
        return format(a.real, "g")
    if a.real == 0:
        return f"{a.imag:g}i"
    return f"{a.real:g}{a.imag:+g}i"


@dataclass(frozen=True)
class Factored:
    """lead · ∏(z − ζ)^m / ∏(z − p)^m, the form log-moduli are evaluated in"""
    lead: complex
    zeros: Tuple[PointMult, ...]
    poles: Tuple[PointMult, ...]

    @property
    def points(self) -> Tuple[PointMult, ...]:
        return self.zeros + self.poles

    def log_abs(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        with np.errstate(divide="ignore"):
            out = np.full(z.shape, np.log(abs(self.lead)) if self.lead != 0 else -np.inf)
            for point in self.zeros:
                out = out + point.mult * np.log(np.abs(z - point.location))
            for point in self.poles:
                out = out - point.mult * np.log(np.abs(z - point.location))
        return out


def target_factors(g: RatFun, a) -> Factored:
    """Factored form of g (a = ∞) or of 1/(g − a) (finite a)"""
    if is_infinity(a):
        if g.is_zero:
            return Factored(0j, (), ())
        return Factored(g.lead, tuple(g.zeros), tuple(g.poles))
    a = complex(a)
    if g.is_constant:
        value = g.constant_value()
        if value == a:
            raise DegenerateInputError("target_factors", f"g is identically {a}")
        return Factored(1 / (value - a), (), ())
    shifted = poly_arith("sub", g.num, g.den.scaled(a))
    a_points = tuple(rat_zeros_poles(g, a))
    return Factored(1 / shifted.lead, tuple(g.poles), a_points)


def count_points(points: Iterable[PointMult], r: float) -> int:
    """n(r): multiplicities inside the closed disk |z| ≤ r"""
    return sum(point.mult for point in points if abs(point.location) <= r)


def integrate_points(points: Iterable[PointMult], r: float) -> float:
    """
    N(r) in closed form.

    Σ_{0<|z|≤r} m·log(r/|z|) + n(0)·log r; points within ORIGIN_RADIUS of 0
    are treated as the origin.
    """
    if r <= 0:
        raise InvalidArgumentError("integrate_points", f"r must be positive, got {r}")
    total = 0.0
    log_r = math.log(r)
    for point in points:
        modulus = abs(point.location)
        if modulus <= ORIGIN_RADIUS:
            total += point.mult * log_r
        elif modulus <= r:
            total += point.mult * (log_r - math.log(modulus))
    return total


def nudge_radius(r: float, points: Iterable[PointMult]) -> Tuple[float, bool]:
    """Move r outward while it sits within NUDGE_BAND·r of a point modulus"""
    moduli = [abs(point.location) for point in points if abs(point.location) > ORIGIN_RADIUS]
    nudged = False
    for _ in range(64):
        if not any(abs(modulus - r) <= NUDGE_BAND * r for modulus in moduli):
            break
        r += NUDGE_STEP * r
        nudged = True
    if nudged:
        logger.debug(f"Radius nudged outward to {r!r}")
    return r, nudged


def _panel_edges(factored: Factored, r: float, n_theta: int, tol: float) -> np.ndarray:
    two_pi = 2 * np.pi
    width = two_pi / n_theta
    edges = [two_pi * np.arange(n_theta + 1) / n_theta]

    # geometric refinement towards singularities close to the circle
    for point in factored.points:
        modulus = abs(point.location)
        if modulus <= ORIGIN_RADIUS:
            continue
        distance = abs(modulus - r) / r
        if distance > 4 * width:
            continue
        phi = np.angle(point.location) % two_pi
        floor = max(distance, 1e-14)
        steps = [phi]
        h = width
        while h > floor:
            steps.extend((phi - h, phi + h))
            h /= 2
        edges.append(np.mod(np.asarray(steps), two_pi))

    grid = np.unique(np.concatenate(edges))
    grid = grid[(grid >= 0) & (grid <= two_pi)]

    # kinks of log⁺ where |h| = 1
    samples = np.unique(np.concatenate([grid, (grid[:-1] + grid[1:]) / 2]))
    values = factored.log_abs(r * np.exp(1j * samples))
    crossings = []

    def level(theta: float) -> float:
        return float(factored.log_abs(np.array([r * np.exp(1j * theta)]))[0])

    for lo, hi, f_lo, f_hi in zip(samples[:-1], samples[1:], values[:-1], values[1:]):
        if not (np.isfinite(f_lo) and np.isfinite(f_hi)):
            continue
        if f_lo == 0 or f_lo * f_hi >= 0:
            continue
        crossings.append(brentq(level, lo, hi, xtol=tol))
    if crossings:
        grid = np.unique(np.concatenate([grid, crossings]))
    keep = np.concatenate([[True], np.diff(grid) > 1e-15])
    return grid[keep]


def circle_mean_logplus(factored: Factored, r: float, n_theta: int = DEFAULT_THETA_SAMPLES,
                        tol: float = DEFAULT_QUAD_TOL) -> float:
    """(1/2π)∫ log⁺|h(re^{iθ})| dθ by panel Gauss–Legendre quadrature"""
    if not factored.points:
        return max(0.0, math.log(abs(factored.lead))) if factored.lead != 0 else 0.0
    edges = _panel_edges(factored, r, n_theta, tol)
    lo, hi = edges[:-1], edges[1:]
    half = (hi - lo) / 2
    theta = (lo + half)[:, None] + half[:, None] * _NODES[None, :]
    values = np.maximum(factored.log_abs(r * np.exp(1j * theta)), 0.0)
    return float(np.sum(half[:, None] * _WEIGHTS[None, :] * values) / (2 * np.pi))


class NevanlinnaProfile:
    """
    Cached zero/pole data of one rational function.

    Per-target point sets, factored integrands and Hahn-reduced point sets
    are computed once and reused across the radius grid.
    """

    def __init__(self, g: RatFun, p: Optional[HahnParams] = None,
                 n_theta: int = DEFAULT_THETA_SAMPLES, quad_tol: float = DEFAULT_QUAD_TOL):
        self.g = g
        self.params = p
        self.n_theta = n_theta
        self.quad_tol = quad_tol
        self._factors: Dict = {}
        self._points: Dict = {}
        self._reduced: Dict = {}
        self._derivative: Optional[RatFun] = None
        self._reciprocal: Optional[RatFun] = None

    def _require_params(self, operation: str) -> HahnParams:
        if self.params is None:
            raise InvalidArgumentError(operation, "Hahn parameters are required")
        self.params.require_operator(operation)
        return self.params

    @property
    def derivative(self) -> RatFun:
        if self._derivative is None:
            self._derivative = hahn_diff(self.g, self._require_params("hahn_diff"))
        return self._derivative

    @property
    def reciprocal_derivative(self) -> RatFun:
        if self._reciprocal is None:
            self._reciprocal = hahn_reciprocal(self.g, self._require_params("hahn_reciprocal"))
        return self._reciprocal

    def factors(self, a) -> Factored:
        key = target_key(a)
        if key not in self._factors:
            self._factors[key] = target_factors(self.g, a)
        return self._factors[key]

    def points(self, a) -> List[PointMult]:
        """Solutions of g = a (poles for a = ∞)"""
        key = target_key(a)
        if key not in self._points:
            if not is_infinity(a) and self.g.is_constant:
                self.factors(a)
                self._points[key] = []
            else:
                self._points[key] = rat_zeros_poles(self.g, a)
        return self._points[key]

    def reduced_points(self, a) -> List[PointMult]:
        """a-points weighted by n − min(n, m′)"""
        key = target_key(a)
        if key not in self._reduced:
            reference = self.reciprocal_derivative if is_infinity(a) else self.derivative
            self._reduced[key] = _reduce(self.points(a), reference)
        return self._reduced[key]

    def nudge(self, r: float, targets: Sequence = (INF,)) -> Tuple[float, bool]:
        points: List[PointMult] = []
        for a in list(targets) + [INF]:
            points.extend(self.factors(a).points)
        return nudge_radius(r, points)

    def m(self, r: float, a=INF) -> float:
        factored = self.factors(a)
        r, _ = nudge_radius(r, factored.points)
        return circle_mean_logplus(factored, r, self.n_theta, self.quad_tol)

    def n(self, r: float, a=INF) -> int:
        return count_points(self.points(a), r)

    def N(self, r: float, a=INF) -> float:
        return integrate_points(self.points(a), r)

    def T(self, r: float) -> float:
        return self.m(r, INF) + self.N(r, INF)

    def nhat(self, r: float, a) -> int:
        return count_points(self.reduced_points(a), r)

    def Nhat(self, r: float, a) -> float:
        return integrate_points(self.reduced_points(a), r)

    def Nqc(self, r: float) -> float:
        """2N(r,g) − N(r,Dg) + N(r,1/Dg)"""
        derivative = self.derivative
        if derivative.is_zero:
            raise DegenerateInputError("Nqc", "D g vanishes identically")
        return (2 * self.N(r, INF) - integrate_points(derivative.poles, r)
                + integrate_points(derivative.zeros, r))


def _reduce(points: Sequence[PointMult], reference: RatFun) -> List[PointMult]:
    reduced = []
    for point in points:
        m_prime = max(0, rat_order_at(reference, point.location))
        weight = point.mult - min(point.mult, m_prime)
        if weight > 0:
            reduced.append(PointMult(point.location, int(weight)))
    return reduced


def counting_n(g: RatFun, r: float, a=INF) -> int:
    """Number of solutions of g = a in |z| ≤ r, with multiplicity"""
    return NevanlinnaProfile(g).n(r, a)


def integrated_N(g: RatFun, r: float, a=INF) -> float:
    """Integrated counting function N(r, g = a)"""
    return NevanlinnaProfile(g).N(r, a)


def proximity_m(g: RatFun, r: float, a=INF, n_theta: int = DEFAULT_THETA_SAMPLES,
                tol: float = DEFAULT_QUAD_TOL) -> float:
    """
    Proximity function m(r, g) for a = ∞, m(r, 1/(g − a)) otherwise.

    Args:
        g: Rational function
        r: Radius, nudged outward by NUDGE_STEP·r when within NUDGE_BAND·r of a zero/pole modulus
        a: Target value
        n_theta: Base panel count on the circle
        tol: Root-bracketing tolerance for |h| = 1 crossings

    Returns:
        Circle mean of log⁺
    """
    if r <= 0:
        raise InvalidArgumentError("proximity_m", f"r must be positive, got {r}")
    return NevanlinnaProfile(g, n_theta=n_theta, quad_tol=tol).m(r, a)


def characteristic_T(g: RatFun, r: float, n_theta: int = DEFAULT_THETA_SAMPLES,
                     tol: float = DEFAULT_QUAD_TOL) -> float:
    """T(r, g) = m(r, g) + N(r, g)"""
    if r <= 0:
        raise InvalidArgumentError("characteristic_T", f"r must be positive, got {r}")
    profile = NevanlinnaProfile(g, n_theta=n_theta, quad_tol=tol)
    r, _ = profile.nudge(r)
    return profile.T(r)


def hahn_reduced_points(g: RatFun, a, p: HahnParams) -> List[PointMult]:
    """Point set underlying n̂_{q,c}(r, g = a)"""
    return NevanlinnaProfile(g, p).reduced_points(a)


def nhat_counting(g: RatFun, r: float, a, p: HahnParams) -> int:
    """Hahn-type counting function n̂_{q,c}(r, g = a)"""
    return NevanlinnaProfile(g, p).nhat(r, a)


def nhat_integrated(g: RatFun, r: float, a, p: HahnParams) -> float:
    """Integrated Hahn-type counting function N̂_{q,c}(r, g = a)"""
    return NevanlinnaProfile(g, p).Nhat(r, a)


def nqc_integrated(g: RatFun, r: float, p: HahnParams) -> float:
    return NevanlinnaProfile(g, p).Nqc(r)


def jensen_mean(g: RatFun, r: float, a=INF) -> float:
    """
    Circle mean of log|g − a| (log|g| for a = ∞) by Jensen's formula.

    Equals m(r, g − a) − m(r, 1/(g − a)), which makes it a check on the
    quadrature.
    """
    if is_infinity(a):
        lead, zeros, poles = g.lead, g.zeros, g.poles
    else:
        factored = target_factors(g, a)
        lead, zeros, poles = 1 / factored.lead, factored.poles, factored.zeros
    total = math.log(abs(lead))
    for point in zeros:
        total += point.mult * math.log(max(r, abs(point.location)))
    for point in poles:
        total -= point.mult * math.log(max(r, abs(point.location)))
    return total


def first_main_bound(g: RatFun, a: complex) -> float:
    """
    Explicit constant of the first fundamental theorem.

    |T(r, 1/(g − a)) − T(r, g)| ≤ |log|c_a|| + log⁺|a| + log 2 for all r,
    where c_a is the leading Laurent coefficient of g − a at the origin.
    """
    if is_infinity(a):
        raise InvalidArgumentError("first_main_bound", "finite target required")
    a = complex(a)
    shifted = poly_arith("sub", g.num, g.den.scaled(a))
    if shifted.is_zero:
        raise DegenerateInputError("first_main_bound", f"g is identically {a}")
    c_a = shifted.coeffs[poly_order_at(shifted, 0)] / g.den.coeffs[poly_order_at(g.den, 0)]
    log_plus_a = math.log(abs(a)) if abs(a) > 1 else 0.0
    return abs(math.log(abs(c_a))) + log_plus_a + math.log(2)


@dataclass(frozen=True)
class DefectIndices:
    """One-sided finite-radius estimates of δ(a,g), θ_{q,c}(a,g) and Θ_{q,c}(a,g)"""
    delta: float
    theta_qc: float
    big_theta_qc: float


def top_rows(count: int, fraction: float = TOP_FRACTION) -> int:
    """Number of grid rows in the upper `fraction` of a grid"""
    return max(1, math.ceil(fraction * count))


def defect_indices(g: RatFun, a, p: HahnParams, grid: Sequence[float],
                   n_theta: int = DEFAULT_THETA_SAMPLES, tol: float = DEFAULT_QUAD_TOL,
                   profile: Optional[NevanlinnaProfile] = None) -> DefectIndices:
    """
    Proxies over the top 20% of the grid.

    δ̂ = 1 − max N/T, θ̂ = min (N − N̂)/T, Θ̂ = 1 − max N̂/T.
    """
    if len(grid) < MIN_GRID_FOR_INDICES:
        raise InvalidArgumentError("defect_indices", f"at least {MIN_GRID_FOR_INDICES} radii required")
    if g.is_constant:
        raise DegenerateInputError("defect_indices", "g is constant")
    profile = profile or NevanlinnaProfile(g, p, n_theta, tol)
    radii = sorted(grid)[-top_rows(len(grid)):]
    ratios_n, ratios_gap, ratios_nhat = [], [], []
    for r in radii:
        r, _ = profile.nudge(r, [a])
        T = profile.T(r)
        N = profile.N(r, a)
        Nhat = profile.Nhat(r, a)
        if T <= 1e-6:
            continue
        ratios_n.append(N / T)
        ratios_gap.append((N - Nhat) / T)
        ratios_nhat.append(Nhat / T)
    if not ratios_n:
        raise DegenerateInputError("defect_indices", "T below 1e-6 at the top of the grid")
    return DefectIndices(
        delta=1 - max(ratios_n),
        theta_qc=min(ratios_gap),
        big_theta_qc=1 - max(ratios_nhat),
    )


@dataclass(frozen=True)
class OrderEstimate:
    rho: float
    rho_log: float


def order_estimators(samples: Sequence[Tuple[float, float]]) -> OrderEstimate:
    """
    Least-squares growth slopes over the top half of the grid.

    ρ̂ is the slope of log T against log r, ρ̂_log the slope against log log r.

    Raises:
        InvalidArgumentError: fewer than 10 rows or less than 4 decades of r
    """
    rows = sorted((float(r), float(t)) for r, t in samples)
    if len(rows) < 10:
        raise InvalidArgumentError("order_estimators", f"at least 10 rows required, got {len(rows)}")
    if rows[0][0] <= 0 or rows[-1][0] / rows[0][0] < 1e4:
        raise InvalidArgumentError("order_estimators", "radii must span at least 4 decades")
    upper = [(r, t) for r, t in rows[len(rows) // 2:] if r > 1 and t > 0]
    if len(upper) < 3:
        raise InvalidArgumentError("order_estimators", "too few rows with r > 1 and T > 0")
    log_r = np.log([r for r, _ in upper])
    log_t = np.log([t for _, t in upper])
    rho = linregress(log_r, log_t).slope
    rho_log = linregress(np.log(log_r), log_t).slope
    return OrderEstimate(rho=float(rho), rho_log=float(rho_log))
