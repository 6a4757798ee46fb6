import numpy as np
import pytest

from numeralgame import DMPair
from numeralgame.lexicon import covers

ENGLISH_DIGITS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 11)


@pytest.fixture
def english():
    return DMPair(ENGLISH_DIGITS, (10,), 99)


def random_covering_pair(rng: np.random.Generator, range_max: int, max_digits: int = 8,
                         max_mults: int = 3) -> DMPair:
    """Rejection-sample a grammar that covers ``1..range_max``; 1 is always a digit."""
    while True:
        pool = rng.permutation(np.arange(2, range_max + 1))
        nd = int(rng.integers(0, max_digits))
        nm = int(rng.integers(1, max_mults + 1))
        digits = (1, *map(int, pool[:nd]))
        mults = tuple(map(int, pool[nd:nd + nm]))
        dm = DMPair(digits, mults, range_max)
        if covers(dm):
            return dm
