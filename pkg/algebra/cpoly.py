"""
Dense Complex Polynomials
Arithmetic, evaluation, affine composition, root finding with multiplicity clustering
"""
import contextlib
import logging
import math
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from core.errors import InvalidArgumentError, SolverError

logger = logging.getLogger(__name__)

DEFAULT_CLUSTER_TOL = 1e-7
MAX_ITERATIONS = 500
# leading coefficients this small relative to the operands are cancellation noise
CANCEL_RTOL = 1e-11
ROOT_SEED = 20240601

_cluster_tol: ContextVar[float] = ContextVar("cluster_tol", default=DEFAULT_CLUSTER_TOL)


def current_cluster_tol() -> float:
    """Cluster tolerance in effect for the current context"""
    return _cluster_tol.get()


@contextlib.contextmanager
def cluster_tolerance(tol: float) -> Iterator[float]:
    """
    Temporarily change the multiplicity-cluster tolerance.

    This is the sensitivity knob of the whole pipeline: root clustering,
    zero/pole cancellation and order-of-vanishing queries all read it.
    """
    if not tol > 0:
        raise InvalidArgumentError("cluster_tolerance", f"tolerance must be positive, got {tol}")
    token = _cluster_tol.set(float(tol))
    try:
        yield tol
    finally:
        _cluster_tol.reset(token)


@dataclass(frozen=True)
class PointMult:
    """A zero or pole location with its multiplicity"""
    location: complex
    mult: int

    def __post_init__(self):
        object.__setattr__(self, "location", complex(self.location))
        if self.mult < 1:
            raise InvalidArgumentError("PointMult", f"multiplicity must be >= 1, got {self.mult}")


class Poly:
    """Polynomial with ascending complex coefficients in normal form"""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Union[Sequence[complex], np.ndarray]):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).copy()
        if arr.size == 0:
            arr = np.zeros(1, dtype=np.complex128)
        nonzero = np.flatnonzero(arr)
        arr = arr[: nonzero[-1] + 1] if nonzero.size else arr[:1] * 0
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def zero(cls) -> "Poly":
        return cls([0])

    @classmethod
    def one(cls) -> "Poly":
        return cls([1])

    @classmethod
    def monomial(cls, n: int, coeff: complex = 1) -> "Poly":
        coeffs = np.zeros(n + 1, dtype=np.complex128)
        coeffs[n] = coeff
        return cls(coeffs)

    @classmethod
    def linear(cls, root: complex) -> "Poly":
        """z − root"""
        return cls([-root, 1])

    @property
    def degree(self) -> float:
        """Degree; −∞ for the zero polynomial"""
        if self.is_zero:
            return -math.inf
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1])

    def norm(self) -> float:
        """Max-abs coefficient norm"""
        return float(np.max(np.abs(self.coeffs)))

    def abs_eval(self, x: float) -> float:
        """Σ|a_k| xᵏ, the rounding-error scale of evaluating at |z| = x"""
        return float(npoly.polyval(x, np.abs(self.coeffs)))

    def scaled(self, factor: complex) -> "Poly":
        return Poly(self.coeffs * factor)

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other: "Poly") -> "Poly":
        return poly_arith("add", self, other)

    def __sub__(self, other: "Poly") -> "Poly":
        return poly_arith("sub", self, other)

    def __mul__(self, other: "Poly") -> "Poly":
        return poly_arith("mul", self, other)

    def __neg__(self) -> "Poly":
        return Poly(-self.coeffs)

    def __divmod__(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        return poly_arith("divrem", self, other)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()})"


def _cancel_trim(coeffs: np.ndarray, magnitude: np.ndarray) -> np.ndarray:
    """
    Drop leading coefficients that are cancellation residue of a sum.

    magnitude[k] is the rounding scale coefficient k was formed at: the sum
    of absolute contributions, including those inside products.
    """
    end = len(coeffs)
    while end > 1:
        value = abs(coeffs[end - 1])
        if value == 0 or (magnitude[end - 1] > 0 and value <= CANCEL_RTOL * magnitude[end - 1]):
            end -= 1
            continue
        break
    if end == 1 and magnitude[0] > 0 and abs(coeffs[0]) <= CANCEL_RTOL * magnitude[0]:
        return np.zeros(1, dtype=np.complex128)
    return coeffs[:end]


def poly_arith(op: str, a: Poly, b: Poly) -> Union[Poly, Tuple[Poly, Poly]]:
    """
    Ring operations in normal form.

    Args:
        op: One of 'add', 'sub', 'mul', 'divrem'
        a: Left operand
        b: Right operand

    Returns:
        Poly, or (quotient, remainder) for 'divrem'
    """
    if op in ("add", "sub"):
        return poly_combine([(a, np.abs(a.coeffs)), (b if op == "add" else -b, np.abs(b.coeffs))])
    if op == "mul":
        if a.is_zero or b.is_zero:
            return Poly.zero()
        return Poly(np.convolve(a.coeffs, b.coeffs))
    if op == "divrem":
        if b.is_zero:
            raise InvalidArgumentError("poly_arith", "division by the zero polynomial")
        if a.degree < b.degree:
            return Poly.zero(), a
        remainder = a.coeffs.copy()
        db = len(b.coeffs) - 1
        quotient = np.zeros(len(remainder) - db, dtype=np.complex128)
        for k in range(len(quotient) - 1, -1, -1):
            factor = remainder[k + db] / b.lead
            quotient[k] = factor
            remainder[k: k + db + 1] -= factor * b.coeffs
        rem = remainder[:db] if db > 0 else np.zeros(1, dtype=np.complex128)
        return Poly(quotient), Poly(rem)
    raise InvalidArgumentError("poly_arith", f"unknown operation {op!r}")


def poly_combine(terms: Sequence[Tuple[Poly, np.ndarray]]) -> Poly:
    """
    Sum of several polynomials in one pass.

    Args:
        terms: (polynomial, rounding scale) pairs; the scale array holds
            Σ|contributions| per coefficient and may be shorter or longer
            than the coefficient array

    Returns:
        Sum with leading cancellation residue trimmed against the summed scale
    """
    if not terms:
        return Poly.zero()
    size = max(max(len(p.coeffs), len(s)) for p, s in terms)
    total = np.zeros(size, dtype=np.complex128)
    magnitude = np.zeros(size)
    for poly, scale in terms:
        total[: len(poly.coeffs)] += poly.coeffs
        magnitude[: len(scale)] += np.abs(scale)
    return Poly(_cancel_trim(total, magnitude))


def points_scale(points: Iterable[PointMult]) -> np.ndarray:
    """Coefficients of ∏ (z + |location|)^mult, the rounding scale of poly_from_points"""
    radii = [-abs(p.location) for p in points for _ in range(p.mult)]
    if not radii:
        return np.ones(1)
    return np.abs(npoly.polyfromroots(radii))


def poly_eval(a: Poly, z):
    """Horner evaluation; accepts scalars or numpy arrays"""
    result = npoly.polyval(z, a.coeffs)
    if np.ndim(result) == 0:
        return complex(result)
    return result


def poly_compose_affine(a: Poly, alpha: complex, beta: complex) -> Poly:
    """
    Coefficients of a(αz + β) by binomial expansion.

    The k-th coefficient is Σ_{j≥k} a_j C(j, k) αᵏ β^{j−k}.
    """
    n = len(a.coeffs)
    out = np.zeros(n, dtype=np.complex128)
    beta_powers = beta ** np.arange(n) if beta != 0 else np.eye(1, n, dtype=np.complex128)[0]
    for k in range(n):
        total = 0j
        for j in range(k, n):
            if a.coeffs[j] != 0:
                total += a.coeffs[j] * math.comb(j, k) * beta_powers[j - k]
        out[k] = total * alpha ** k
    return Poly(out)


def poly_deflate(a: Poly, root: complex) -> Poly:
    """
    Quotient of a by (z − root), remainder discarded.

    Forward synthetic division is used for roots small relative to the other
    roots and backward division for large ones, keeping the quotient stable.
    """
    coeffs = a.coeffs
    n = len(coeffs) - 1
    if n < 1:
        return Poly.zero()
    low = next((abs(c) for c in coeffs if c != 0), 0.0)
    typical = (low / abs(coeffs[-1])) ** (1.0 / n) if low else 0.0
    quotient = np.zeros(n, dtype=np.complex128)
    if root == 0 or abs(root) <= max(typical, 1.0):
        quotient[n - 1] = coeffs[n]
        for k in range(n - 1, 0, -1):
            quotient[k - 1] = coeffs[k] + root * quotient[k]
    else:
        quotient[0] = -coeffs[0] / root
        for k in range(1, n):
            quotient[k] = (quotient[k - 1] - coeffs[k]) / root
    return Poly(quotient)


def poly_from_points(points: Iterable[PointMult], lead: complex = 1) -> Poly:
    """lead · ∏ (z − location)^mult"""
    roots = [p.location for p in points for _ in range(p.mult)]
    if not roots:
        return Poly([lead])
    return Poly(npoly.polyfromroots(roots) * lead)


def _cauchy_radius(coeffs: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(coeffs[:-1] / coeffs[-1])))


def _aberth(coeffs: np.ndarray) -> np.ndarray:
    """Aberth–Ehrlich simultaneous iteration; coeffs ascending with nonzero ends"""
    n = len(coeffs) - 1
    derivative = npoly.polyder(coeffs)
    abs_coeffs = np.abs(coeffs)
    rng = np.random.default_rng(ROOT_SEED)
    radius = _cauchy_radius(coeffs)
    angles = 2 * np.pi * np.arange(n) / n + 0.4 + 0.1 * rng.random(n)
    z = radius * np.exp(1j * angles)
    noise = 8 * n * np.finfo(float).eps
    active = np.ones(n, dtype=bool)

    for iteration in range(MAX_ITERATIONS):
        values = npoly.polyval(z, coeffs)
        floor = noise * npoly.polyval(np.abs(z), abs_coeffs)
        active = np.abs(values) > floor
        if not active.any():
            logger.debug(f"Aberth converged after {iteration} iterations (degree {n})")
            return z
        slopes = npoly.polyval(z, derivative)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = values / slopes
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            repulsion = np.sum(1.0 / diff, axis=1)
            step = newton / (1 - newton * repulsion)
        bad = ~np.isfinite(step)
        step[bad] = 1e-3 * (1 + np.abs(z[bad]))
        z = np.where(active, z - step, z)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        log_values = np.log(np.abs(npoly.polyval(z, coeffs)))
    log_scale = math.log(DEFAULT_CLUSTER_TOL * np.max(abs_coeffs)) + n * np.log1p(np.abs(z))
    if np.all(np.isfinite(log_scale)) and np.all(log_values <= log_scale):
        logger.warning(f"Aberth hit the iteration cap; accepting residual-bounded iterate (degree {n})")
        return z
    raise SolverError("poly_roots", f"no convergence after {MAX_ITERATIONS} iterations", best_iterate=z)


def _taylor_flat(coeffs: np.ndarray, center: complex, order: int, tol: float) -> bool:
    """True when the first `order` Taylor coefficients at center are rounding noise"""
    poly = Poly(coeffs)
    shifted = poly_compose_affine(poly, 1, center).coeffs
    scale = poly_compose_affine(Poly(np.abs(coeffs)), 1, abs(center)).coeffs
    for j in range(min(order, len(shifted))):
        if abs(shifted[j]) > tol * tol * scale[j]:
            return False
    return True


def _refine_center(coeffs: np.ndarray, start: complex, order: int) -> complex:
    """Newton on the (order − 1)-th derivative, where an order-fold root is simple"""
    if order < 2:
        return start
    derivative = npoly.polyder(coeffs, order - 1)
    slope = npoly.polyder(derivative)
    z = start
    for _ in range(20):
        value = npoly.polyval(z, derivative)
        step_slope = npoly.polyval(z, slope)
        if step_slope == 0:
            break
        step = value / step_slope
        z = z - step
        if abs(step) <= 4 * np.finfo(float).eps * (1 + abs(z)):
            break
    # keep the centroid when Newton wandered off the cluster
    if not np.isfinite(z) or abs(z - start) > 1e-3 * (1 + abs(start)):
        return start
    return complex(z)


def _cluster(coeffs: np.ndarray, roots: np.ndarray, tol: float) -> List[PointMult]:
    groups: List[List[complex]] = [[complex(r)] for r in roots]

    def centroid(group):
        return complex(np.mean(group))

    # pass 1: single linkage within tol·(1 + |root|)
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                ci, cj = centroid(groups[i]), centroid(groups[j])
                if abs(ci - cj) <= tol * (1 + max(abs(ci), abs(cj))):
                    groups[i].extend(groups.pop(j))
                    merged = True
                    break
            if merged:
                break

    # pass 2: multiple roots scatter like eps^{1/m}; accept a wider merge only
    # when the polynomial is flat to the merged order at the refined center
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            seed = centroid(groups[i])
            others = sorted(
                (j for j in range(len(groups)) if j != i),
                key=lambda j: abs(centroid(groups[j]) - seed),
            )
            best: List[int] = []
            combined = list(groups[i])
            for k, j in enumerate(others):
                combined = combined + groups[j]
                reach = tol ** (1.0 / len(combined)) * (1 + abs(seed))
                if abs(centroid(groups[j]) - seed) > reach:
                    break
                center = _refine_center(coeffs, centroid(combined), len(combined))
                if _taylor_flat(coeffs, center, len(combined), tol):
                    best = others[: k + 1]
            if best:
                for j in sorted(best, reverse=True):
                    groups[i].extend(groups[j])
                for j in sorted(best, reverse=True):
                    groups.pop(j)
                merged = True
                break

    points = [PointMult(_refine_center(coeffs, centroid(g), len(g)), len(g)) for g in groups]
    return sorted(points, key=lambda p: (p.location.real, p.location.imag))


def poly_roots(a: Poly, tol: float = None) -> List[PointMult]:
    """
    All roots with multiplicities.

    Args:
        a: Polynomial of degree >= 1
        tol: Cluster tolerance (defaults to the context value)

    Returns:
        PointMult list whose multiplicities sum to deg(a)
    """
    tol = current_cluster_tol() if tol is None else tol
    if a.degree < 1:
        raise InvalidArgumentError("poly_roots", f"degree >= 1 required, got {a.degree}")
    coeffs = a.coeffs
    origin = int(np.flatnonzero(coeffs)[0])
    reduced = coeffs[origin:]
    found = [0j] * origin
    n = len(reduced) - 1
    if n == 1:
        found.append(complex(-reduced[0] / reduced[1]))
    elif n > 1:
        found.extend(_aberth(reduced).tolist())
    points = _cluster(coeffs, np.asarray(found, dtype=np.complex128), tol)

    # log space: (1 + |z|)^deg overflows for far-off iterates
    log_scale = math.log(tol) + math.log(a.norm())
    for point in points:
        log_bound = log_scale + a.degree * math.log1p(float(np.abs(point.location)))
        with np.errstate(over="ignore", invalid="ignore"):
            residual = float(np.abs(npoly.polyval(point.location, a.coeffs)))
        if not math.isfinite(residual) or (residual > 0 and math.log(residual) > log_bound):
            logger.warning(f"Root {point.location} residual exceeds the tolerance bound")
    return points


def poly_order_at(a: Poly, z0: complex, tol: float = None) -> int:
    """
    Order of vanishing at z0 by repeated synthetic division by (z − z0).

    A remainder counts as zero when it is below tol times the coefficient
    scale Σ|a_k||z0|ᵏ of the current quotient.
    """
    tol = current_cluster_tol() if tol is None else tol
    if a.is_zero:
        raise InvalidArgumentError("poly_order_at", "the zero polynomial has no finite order")
    order = 0
    current = a
    radius = abs(z0)
    while current.degree >= 1:
        if abs(poly_eval(current, z0)) > tol * current.abs_eval(radius):
            break
        current = poly_deflate(current, z0)
        order += 1
    return order


def match_point(points: Sequence[PointMult], location: complex, tol: float) -> int:
    """Index of the closest point within tol·(1 + |location|), or −1"""
    best, best_dist = -1, math.inf
    for index, point in enumerate(points):
        dist = abs(point.location - location)
        if dist <= tol * (1 + abs(location)) and dist < best_dist:
            best, best_dist = index, dist
    return best


def merge_points(a: Sequence[PointMult], b: Sequence[PointMult], mode: str,
                 tol: float = None) -> List[PointMult]:
    """
    Combine two point multisets.

    mode 'sum' adds multiplicities of matched points (products), 'max' keeps
    the larger one (least common multiple of denominators).
    """
    tol = current_cluster_tol() if tol is None else tol
    out = list(a)
    for point in b:
        index = match_point(out, point.location, tol)
        if index < 0:
            out.append(point)
            continue
        existing = out[index]
        mult = existing.mult + point.mult if mode == "sum" else max(existing.mult, point.mult)
        out[index] = PointMult(existing.location, mult)
    return out


def remove_points(a: Sequence[PointMult], b: Sequence[PointMult], tol: float = None) -> List[PointMult]:
    """Multiset difference a − b; b must be contained in a"""
    tol = current_cluster_tol() if tol is None else tol
    out = list(a)
    for point in b:
        index = match_point(out, point.location, tol)
        if index < 0 or out[index].mult < point.mult:
            raise InvalidArgumentError("remove_points", f"{point} is not contained in the multiset")
        remaining = out[index].mult - point.mult
        if remaining:
            out[index] = PointMult(out[index].location, remaining)
        else:
            out.pop(index)
    return out
