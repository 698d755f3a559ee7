"""Random rational draws for exact identity testing.

Numerators and denominators are drawn uniformly from [-40, 40] \\ {0} and
resampled until the admissibility constraints hold; the degrees of the
verified polynomial identities are small enough that exact zeros at such
points certify the identities with a wide Schwartz-Zippel margin.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

RATIONAL_BOUND = 40


def random_fraction(rng, bound: int = RATIONAL_BOUND) -> Fraction:
    num = 0
    while num == 0:
        num = int(rng.integers(-bound, bound + 1))
    den = 0
    while den == 0:
        den = int(rng.integers(-bound, bound + 1))
    return Fraction(num, den)


def _admissible(values, banned, non_opposite: bool) -> bool:
    for i, v in enumerate(values):
        if v == 0 or v in banned or (non_opposite and -v in banned):
            return False
        for w in values[:i]:
            if v == w or (non_opposite and v == -w):
                return False
    return True


def random_admissible_tuple(rng, count: int, banned=(), non_opposite: bool = True,
                            bound: int = RATIONAL_BOUND) -> tuple:
    """Distinct (optionally non-opposite) nonzero rationals avoiding banned
    values (and their negatives when non_opposite)."""
    banned = set(banned)
    while True:
        values = [random_fraction(rng, bound) for _ in range(count)]
        if _admissible(values, banned, non_opposite):
            return tuple(values)


def random_identity_inputs(rng, n: int, m: int, *, signed: bool = True):
    """(q, mu) suitable for off-shell determinant identity checks."""
    q = random_admissible_tuple(rng, n, non_opposite=signed)
    banned = set(q) | ({-v for v in q} if signed else set())
    mu = random_admissible_tuple(rng, m, banned=banned, non_opposite=signed) \
        if m else ()
    return q, mu


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
