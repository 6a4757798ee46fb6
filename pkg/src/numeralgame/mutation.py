"""The six conservative grammar modifications and validity filtering."""

from __future__ import annotations

import enum

import numpy as np

from numeralgame.grammar import DMPair
from numeralgame.lexicon import covers


class MutationKind(enum.IntEnum):
    ADD_DIGIT = 0  # m0: highest numeral not in D or M joins D
    ADD_MULTIPLIER = 1  # m1: highest numeral not in D or M joins M
    LOWEST_MULTIPLIER_TO_DIGIT = 2  # m2
    HIGHEST_DIGIT_TO_MULTIPLIER = 3  # m3
    REMOVE_HIGHEST_DIGIT = 4  # m4
    REMOVE_HIGHEST_MULTIPLIER = 5  # m5

    @property
    def label(self) -> str:
        return f"m{int(self)}"

    @classmethod
    def from_label(cls, label: str) -> "MutationKind":
        return cls(int(label.lstrip("mM")))


class NoValidNeighbor(RuntimeError):
    """No mutation of the current grammar yields a valid, covering grammar."""


def _highest_absent(dm: DMPair) -> int | None:
    used = set(dm.digits) | set(dm.multipliers)
    for n in range(dm.range_max, 0, -1):
        if n not in used:
            return n
    return None


def apply_mutation(dm: DMPair, kind: MutationKind) -> DMPair | None:
    """Apply one modification; ``None`` when it does not apply to ``dm``.

    The result may still violate grammar invariants (an empty digit set), in
    which case ``None`` is returned as well.
    """
    digits, mults = list(dm.digits), list(dm.multipliers)
    kind = MutationKind(kind)
    if kind in (MutationKind.ADD_DIGIT, MutationKind.ADD_MULTIPLIER):
        n = _highest_absent(dm)
        if n is None:
            return None
        (digits if kind == MutationKind.ADD_DIGIT else mults).append(n)
    elif kind == MutationKind.LOWEST_MULTIPLIER_TO_DIGIT:
        if not mults:
            return None
        digits.append(mults.pop(0))
    elif kind == MutationKind.HIGHEST_DIGIT_TO_MULTIPLIER:
        mults.append(digits.pop())
    elif kind == MutationKind.REMOVE_HIGHEST_DIGIT:
        digits.pop()
    elif kind == MutationKind.REMOVE_HIGHEST_MULTIPLIER:
        if not mults:
            return None
        mults.pop()
    if not digits:
        return None
    return DMPair(tuple(digits), tuple(mults), dm.range_max)


def valid_neighbors(dm: DMPair, also_cover: int | None = None) -> list[tuple[MutationKind, DMPair]]:
    """Applicable mutations whose result covers ``1..dm.range_max``.

    ``also_cover`` additionally requires coverage of ``1..also_cover`` (used
    when the grammar is scored on a wider support than it communicates on).
    Results are in kind order; two kinds reaching the same grammar both appear.
    """
    out = []
    for kind in MutationKind:
        new = apply_mutation(dm, kind)
        if new is None or not covers(new):
            continue
        if also_cover is not None and also_cover > new.range_max and not covers(new.with_range(also_cover)):
            continue
        out.append((kind, new))
    return out


def sample_alternative(
    dm: DMPair, rng: np.random.Generator, also_cover: int | None = None
) -> tuple[MutationKind, DMPair]:
    """Uniform draw among the valid neighbours of ``dm``."""
    options = valid_neighbors(dm, also_cover)
    if not options:
        raise NoValidNeighbor(f"no valid mutation of {dm}")
    return options[int(rng.integers(len(options)))]
