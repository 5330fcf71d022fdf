import numpy as np
import pytest

from algebra.cpoly import Poly
from algebra.qcore import HahnParams
from algebra.ratfun import RatFun, rat_normalize, rat_eval, POLE


@pytest.fixture
def params():
    """q = 0.5, c = 1: fixed point z0 = 2"""
    return HahnParams(0.5, 1)


@pytest.fixture
def jackson():
    return HahnParams(0.5, 0)


@pytest.fixture
def suite_grid():
    """r = 2^(j/2), j = 0..40"""
    return np.geomspace(1.0, 2.0 ** 20, 41)


def random_ratfun(rng, max_num=3, max_den=3):
    """Random nonconstant rational function with coefficients in [-2, 2]²"""
    while True:
        num_degree = int(rng.integers(0, max_num + 1))
        den_degree = int(rng.integers(0, max_den + 1))
        num = rng.uniform(-2, 2, num_degree + 1) + 1j * rng.uniform(-2, 2, num_degree + 1)
        den = rng.uniform(-2, 2, den_degree + 1) + 1j * rng.uniform(-2, 2, den_degree + 1)
        g = rat_normalize(Poly(num), Poly(den))
        if not g.is_constant:
            return g


def random_params(rng):
    """|q| in [0.3, 0.8], arbitrary argument, c in the square [-2, 2]²"""
    q = rng.uniform(0.3, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    c = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
    return HahnParams(q, c)


def values_close(f: RatFun, g: RatFun, points, rtol=1e-8) -> bool:
    """Pointwise agreement, skipping points where either side has a pole"""
    for z in points:
        a, b = rat_eval(f, z), rat_eval(g, z)
        if a is POLE or b is POLE:
            continue
        if abs(a - b) > rtol * max(1.0, abs(a), abs(b)):
            return False
    return True


SAMPLE_POINTS = [0.37 + 1.21j, -1.73 + 0.44j, 2.9 - 2.2j, -0.61 - 3.05j, 4.4 + 0.13j]
