"""Need distribution and the two efficiency objectives."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from numeralgame.grammar import DMPair
from numeralgame.lexicon import CoverageError, Lexicon, minimal_costs, uncovered


@dataclass(frozen=True)
class NeedDistribution:
    """Power-law need probabilities ``P(n) ∝ n**-exponent`` on ``1..n_max``."""

    n_max: int = 99
    exponent: float = 2.0

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError(f"n_max must be positive, got {self.n_max}")

    @cached_property
    def weights(self) -> np.ndarray:
        """``weights[n - 1]`` is ``P(n)``."""
        raw = np.arange(1, self.n_max + 1, dtype=np.float64) ** -self.exponent
        w = raw / raw.sum()
        w.flags.writeable = False
        return w

    @property
    def support(self) -> range:
        return range(1, self.n_max + 1)

    def restricted(self, n_max: int) -> "NeedDistribution":
        """Same law renormalised on ``1..n_max``."""
        return NeedDistribution(n_max, self.exponent)


def need_probability(dist: NeedDistribution, n: int) -> float:
    if not 1 <= n <= dist.n_max:
        raise ValueError(f"numeral {n} outside support 1..{dist.n_max}")
    return float(dist.weights[n - 1])


def avg_ms_complexity_lexicon(lex: Lexicon, dist: NeedDistribution) -> float:
    """Need-weighted mean complexity of the lexicon's entries over the support."""
    missing = [n for n in dist.support if n not in lex]
    if missing:
        raise ValueError(
            f"lexicon for {lex.dm} lacks {len(missing)} numerals of support 1..{dist.n_max}"
        )
    costs = np.array([lex.complexity(n) for n in dist.support], dtype=np.float64)
    return _weighted(dist, costs)


def avg_ms_complexity_dm(
    dm: DMPair, dist: NeedDistribution, value_cap: int | None = None
) -> float:
    """Average complexity of L_min for ``dm`` evaluated on ``dist``'s support.

    The grammar's own ``range_max`` is replaced by the support bound, so a
    pair built for a communication range of 1..50 is still scored on 1..99.
    """
    scored = dm if dm.range_max == dist.n_max else dm.with_range(dist.n_max)
    costs = minimal_costs(scored, value_cap)
    if not costs.all():
        raise CoverageError(uncovered(scored, value_cap), scored)
    return _weighted(dist, costs)


def _weighted(dist: NeedDistribution, costs: np.ndarray) -> float:
    # offset by the minimum cost so an all-digit lexicon scores exactly 1
    return float(1.0 + dist.weights @ (costs - 1))


def lexicon_size(dm: DMPair) -> int:
    return len(dm.digits) + len(dm.multipliers)
