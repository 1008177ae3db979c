import random
from fractions import Fraction

import pytest

from pointspectra.geometry.configuration import PointConfiguration
from pointspectra.services.fixtures import FIXTURES

SEED = 20240229


def random_configuration(rng: random.Random, n: int, m: int, low: int = -10, high: int = 10) -> PointConfiguration:
    return PointConfiguration.from_coordinates([[rng.randint(low, high) for _ in range(m)] for _ in range(n)])


def random_rotation(rng: random.Random, m: int) -> list[list[Fraction]]:
    """Rational orthogonal matrix: Pythagorean plane rotations, a coordinate permutation and sign flips."""
    matrix = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    for _ in range(2 if m > 1 else 0):
        i, j = rng.sample(range(m), 2)
        p, q = rng.randint(1, 5), rng.randint(0, 5)
        c = p * p + q * q
        cos, sin = Fraction(p * p - q * q, c), Fraction(2 * p * q, c)
        for row in matrix:
            row[i], row[j] = cos * row[i] - sin * row[j], sin * row[i] + cos * row[j]
    order = list(range(m))
    rng.shuffle(order)
    signs = [rng.choice((-1, 1)) for _ in range(m)]
    return [[signs[i] * matrix[order[i]][j] for j in range(m)] for i in range(m)]


def random_unimodular(rng: random.Random, m: int) -> list[list[int]]:
    """Integer matrix with determinant +1 or -1."""
    matrix = [[int(i == j) for j in range(m)] for i in range(m)]
    for _ in range(3 * m):
        if m > 1:
            i, j = rng.sample(range(m), 2)
            t = rng.randint(-2, 2)
            matrix[i] = [a + t * b for a, b in zip(matrix[i], matrix[j])]
    flip = rng.randrange(m)
    matrix[flip] = [-a for a in matrix[flip]]
    return matrix


def random_permutation(rng: random.Random, n: int) -> list[int]:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return perm


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def distance_pair():
    return FIXTURES["distance-pair-4"].configurations


@pytest.fixture
def area_pair_5():
    return FIXTURES["area-pair-5"].configurations


@pytest.fixture
def area_pair_6():
    return FIXTURES["area-pair-6"].configurations


@pytest.fixture
def combined_pair():
    return FIXTURES["combined-pair-4"].configurations


@pytest.fixture
def rhombus():
    return FIXTURES["rhombus"].configuration()


@pytest.fixture
def square():
    return FIXTURES["square"].configuration()
