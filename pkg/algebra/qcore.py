"""
q-Calculus Primitives
q-integers, q-Pochhammer symbols, Gaussian binomials and the affine orbit σ(z) = qz + c
"""
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from algebra.cpoly import PointMult
from core.errors import DegenerateParameterError, InvalidParameterError

_FIXED_POINT_ULPS = 16


@dataclass(frozen=True)
class HahnParams:
    """Operator parameters (q, c) of D_{q,c}"""
    q: complex
    c: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def operator_valid(self) -> bool:
        """q ∉ {0, 1}"""
        return self.q != 0 and self.q != 1

    @property
    def theorem_valid(self) -> bool:
        """0 < |q| < 1, the regime of the value-distribution theorems"""
        return 0 < abs(self.q) < 1

    @property
    def z0(self) -> complex:
        """Fixed point c/(1 − q) of σ"""
        if self.q == 1:
            raise InvalidParameterError("HahnParams.z0", "fixed point undefined for q = 1")
        return self.c / (1 - self.q)

    def require_operator(self, operation: str):
        if not self.operator_valid:
            raise InvalidParameterError(operation, f"q must lie outside {{0, 1}}, got {self.q}")

    def require_theorem(self, operation: str):
        if not self.theorem_valid:
            raise InvalidParameterError(operation, f"0 < |q| < 1 required, got |q| = {abs(self.q)}")

    def sigma(self, z: complex) -> complex:
        return self.q * z + self.c

    def fixed_point_defect(self) -> float:
        """|σ(z0) − z0|, bounded by a few ulps of |z0|"""
        z0 = self.z0
        return abs(self.sigma(z0) - z0)

    def fixed_point_ok(self) -> bool:
        z0 = self.z0
        return self.fixed_point_defect() <= _FIXED_POINT_ULPS * np.spacing(max(abs(z0), 1.0))


def q_integer(n: int, q: complex) -> complex:
    """[n]_q = (qⁿ − 1)/(q − 1) = 1 + q + … + q^{n−1}"""
    if n < 0:
        raise InvalidParameterError("q_integer", f"n must be nonnegative, got {n}")
    if q == 1:
        raise InvalidParameterError("q_integer", "q = 1 has no q-integer")
    # the partial sum is exact for small n and avoids 0/0 near q = 1
    if n <= 64:
        return complex(sum(q ** k for k in range(n)))
    return (q ** n - 1) / (q - 1)


def pochhammer_n(a: complex, q: complex, n: int) -> complex:
    """(a; q)_n = ∏_{k<n} (1 − a qᵏ)"""
    if n < 0:
        raise InvalidParameterError("pochhammer_n", f"n must be nonnegative, got {n}")
    if n == 0:
        return 1 + 0j
    powers = q ** np.arange(n)
    return complex(np.prod(1 - a * powers))


def pochhammer_inf(a: complex, q: complex, tol: float = 1e-12) -> complex:
    """
    (a; q)_∞ by truncation.

    The cut-off N satisfies |a||q|^N / (1 − |q|) < tol, which bounds the
    absolute error of log (a; q)_∞ by 2·tol.

    Args:
        a: Base
        q: Nome, 0 < |q| < 1
        tol: Tail bound

    Returns:
        Truncated infinite product
    """
    if not 0 < abs(q) < 1:
        raise InvalidParameterError("pochhammer_inf", f"0 < |q| < 1 required, got |q| = {abs(q)}")
    if tol <= 0:
        raise InvalidParameterError("pochhammer_inf", "tol must be positive")
    if a == 0:
        return 1 + 0j
    bound = tol * (1 - abs(q)) / abs(a)
    n_terms = max(1, math.ceil(math.log(bound) / math.log(abs(q)))) if bound < 1 else 1
    return pochhammer_n(a, q, n_terms)


def gauss_binomial(n: int, j: int, q: complex) -> complex:
    """
    Gaussian binomial [n choose j]_q.

    Built from the ratio product ∏_{k=1}^{j} (1 − q^{n−k+1})/(1 − qᵏ) so no
    (q;q)_n quotient is ever formed.
    """
    if n < 0 or j < 0 or j > n:
        raise InvalidParameterError("gauss_binomial", f"need 0 <= j <= n, got n={n}, j={j}")
    j = min(j, n - j)
    if q == 1:
        return complex(math.comb(n, j))
    value = 1 + 0j
    for k in range(1, j + 1):
        denominator = 1 - q ** k
        if denominator == 0:
            raise DegenerateParameterError(
                "gauss_binomial", f"q is a root of unity of order {k} <= {n}"
            )
        value *= (1 - q ** (n - k + 1)) / denominator
    return value


def sigma_k(z: complex, k: int, p: HahnParams) -> complex:
    """k-th iterate of σ: qᵏz + c(qᵏ − 1)/(q − 1)"""
    if k < 0:
        raise InvalidParameterError("sigma_k", f"k must be nonnegative, got {k}")
    if p.q == 1:
        raise InvalidParameterError("sigma_k", "q = 1 not allowed")
    if k == 0:
        return complex(z)
    qk = p.q ** k
    return qk * z + p.c * (qk - 1) / (p.q - 1)


def qpochhammer_zeros(q: complex, r_max: float) -> List[PointMult]:
    """Zeros q^{−n} (n ≥ 0) of z ↦ (z; q)_∞ inside |z| ≤ r_max"""
    if not 0 < abs(q) < 1:
        raise InvalidParameterError("qpochhammer_zeros", "0 < |q| < 1 required")
    zeros = []
    n = 0
    while abs(q) ** (-n) <= r_max * (1 + 1e-12):
        zeros.append(PointMult(complex(q ** (-n)), 1))
        n += 1
    return zeros
