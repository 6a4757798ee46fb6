"""Reference (D, M) pairs: human systems, RL starting points, size-12 optima.

Rows are stored exactly as published.  Starting point 6 lists 40 in both D
and M; :func:`starting_pair` keeps it as a digit so the pair is valid.
"""

from __future__ import annotations

from numeralgame.grammar import DMPair

HUMAN_SYSTEMS: dict[str, tuple[tuple[int, ...], tuple[int, ...]]] = {
    "English": ((1, 2, 3, 4, 5, 6, 7, 8, 9, 11), (10,)),
    "French": ((1, 2, 3, 4, 5, 6, 7, 8, 9), (10, 20)),
    "Kunama": ((1, 2, 3, 4), (5, 10)),
}

STARTING_POINTS: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {
    1: ((1, 2, 3, 20, 35, 37, 40, 47, 49), (4, 25, 45)),
    2: ((1, 4, 7, 8, 15), (10, 33)),
    3: ((1, 20, 25, 28, 31, 39, 41, 45), (2, 3, 4, 15)),
    4: ((1, 4, 19, 21, 39, 40, 45, 47, 49), (3, 5, 8, 10, 18, 23, 28, 30, 37, 42, 43, 48)),
    5: ((1, 2, 3, 4, 5, 10, 20, 30, 35, 40, 47, 49), (6, 11, 13, 15, 45, 50)),
    6: ((1, 2, 35, 37, 40, 47, 49), (3, 5, 10, 20, 30, 40)),
    7: ((1, 4, 12), (9, 25)),
    8: ((1, 4, 17, 22, 49), (9, 10, 25, 28, 31, 41, 45)),
}

SIZE_12_OPTIMA: dict[str, tuple[tuple[int, ...], tuple[int, ...]]] = {
    "Hurford": ((1, 2, 3, 5, 6, 9, 10, 11, 14), (4, 7, 25)),
    "ours": ((1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11), (12,)),
    "4-MixtecA": ((1, 2, 3, 4, 5, 6, 7, 8, 9), (10, 15, 20)),
}

COMMUNICATION_RANGE = 50


def _pair(digits, mults, range_max) -> DMPair:
    mults = tuple(m for m in mults if m not in digits)
    return DMPair(tuple(digits), mults, range_max)


def starting_pair(index: int, range_max: int = COMMUNICATION_RANGE) -> DMPair:
    """Starting grammar ``index`` (1-based) for the evolution experiments."""
    if index not in STARTING_POINTS:
        raise KeyError(f"no starting point {index}; choose 1..{len(STARTING_POINTS)}")
    return _pair(*STARTING_POINTS[index], range_max)


def human_pair(name: str, range_max: int = 99) -> DMPair:
    return _pair(*HUMAN_SYSTEMS[name], range_max)


def size_12_pair(name: str, range_max: int = 99) -> DMPair:
    return _pair(*SIZE_12_OPTIMA[name], range_max)
