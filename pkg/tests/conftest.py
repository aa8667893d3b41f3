"""Shared test helpers: seeded configuration factories."""

import numpy as np

from chainform.chain import Configuration
from chainform.generators import Family, gen_random


def random_2d(n: int, seed: int) -> Configuration:
    return gen_random(Family.RANDOM_2D, n, seed)


def random_opposed(n: int, seed: int) -> Configuration:
    return gen_random(Family.OPPOSED_RANDOM, n, seed)


def random_marching(n: int, seed: int) -> Configuration:
    return gen_random(Family.MARCHING_RANDOM, n, seed)


def max_chain(n: int) -> Configuration:
    """Straight unit chain along +x: the target formation."""
    return Configuration(np.column_stack([np.arange(n, dtype=float),
                                          np.zeros(n)]))
