import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairpia import BSplineCurve, BSplineSurface, KnotVector
from oracles import random_clamped_knots


@pytest.fixture
def rng():
    return np.random.default_rng(20_24)


def random_curve(rng: np.random.Generator, n: int, degree: int = 3, dim: int = 2,
                 multiplicity: bool = False) -> BSplineCurve:
    kv = KnotVector(random_clamped_knots(rng, n, degree, multiplicity), degree)
    base = np.zeros((n, dim))
    base[:, 0] = np.linspace(0.0, n - 1.0, n)
    return BSplineCurve(kv, base + rng.normal(0.0, 0.75, (n, dim)))


def random_surface(rng: np.random.Generator, n1: int, n2: int,
                   degree_u: int = 3, degree_v: int = 3) -> BSplineSurface:
    kv_u = KnotVector(random_clamped_knots(rng, n1, degree_u), degree_u)
    kv_v = KnotVector(random_clamped_knots(rng, n2, degree_v), degree_v)
    net = np.zeros((n1, n2, 3))
    net[:, :, 0] = np.linspace(0, n1 - 1.0, n1)[:, None]
    net[:, :, 1] = np.linspace(0, n2 - 1.0, n2)[None, :]
    net += rng.normal(0.0, 0.4, net.shape)
    return BSplineSurface(kv_u, kv_v, net)


def bezier_cubic_kv() -> KnotVector:
    return KnotVector([0, 0, 0, 0, 1, 1, 1, 1], 3)
