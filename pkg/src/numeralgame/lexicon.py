"""Minimal-complexity lexicons (L_min) and grammar coverage.

The search runs level by level over symbol counts: every value first reached
at level ``c`` has minimal complexity ``c``, because each construction costs
strictly more than its parts.

Subtraction lets a short expression route through large intermediate values
(``18*6-15*7`` is 3 in seven symbols), so a fixed cap on intermediates can
miss minima.  The default search is therefore two-pass: a dense search with a
generous cap gives achievable upper bounds, then an uncapped level search,
pruned by a bound on how large a useful subexpression can be, certifies the
true minima.  Passing ``value_cap`` explicitly runs the capped search alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from numeralgame.grammar import DMPair, Diff, Digit, NumExpr, Phrase, Sum, ms_complexity, value


class CoverageError(ValueError):
    """Some numerals in range have no expression under the grammar."""

    def __init__(self, missing, dm=None):
        self.missing = sorted(int(n) for n in missing)
        self.dm = dm
        shown = self.missing if len(self.missing) <= 20 else self.missing[:20] + ["..."]
        where = f" for {dm}" if dm is not None else ""
        super().__init__(f"{len(self.missing)} numerals not expressible{where}: {shown}")


@dataclass(frozen=True)
class Lexicon:
    """One chosen expression per numeral in ``1..dm.range_max``."""

    dm: DMPair
    entries: dict[int, NumExpr] = field(hash=False)
    partial: bool = False

    def __post_init__(self):
        for n, expr in self.entries.items():
            if value(expr) != n:
                raise ValueError(f"entry for {n} evaluates to {value(expr)}")
        if not self.partial:
            missing = [n for n in range(1, self.dm.range_max + 1) if n not in self.entries]
            if missing:
                raise CoverageError(missing, self.dm)

    def __getitem__(self, n: int) -> NumExpr:
        return self.entries[n]

    def __contains__(self, n) -> bool:
        return n in self.entries

    def __len__(self):
        return len(self.entries)

    def complexity(self, n: int) -> int:
        return ms_complexity(self.entries[n])

    def complexities(self) -> dict[int, int]:
        return {n: ms_complexity(e) for n, e in sorted(self.entries.items())}


def default_value_cap(range_max: int) -> int:
    """Intermediate cap under which coverage is decided."""
    return 2 * range_max


WIDE_CAP_FACTOR = 50
# element operations the certifying search may spend before falling back
EXACT_WORK_LIMIT = 3_000_000
_EMPTY = np.zeros(0, dtype=np.int64)


class _Levels:
    """Values first reached at each symbol count, as a Num and as a Phrase."""

    digits: frozenset
    multipliers: np.ndarray
    num_levels: dict[int, np.ndarray]
    phrase_levels: dict[int, np.ndarray]
    exact: bool

    def _level_of(self, levels, v) -> int:
        for c, arr in levels.items():
            i = np.searchsorted(arr, v)
            if i < arr.size and arr[i] == v:
                return c
        return 0

    def cost_of(self, v: int) -> int:
        return self._level_of(self.num_levels, v)

    def pcost_of(self, v: int) -> int:
        return self._level_of(self.phrase_levels, v)


class _CappedSearch(_Levels):
    """Minimal Num and Phrase costs among expressions whose values all stay in ``1..cap``."""

    exact = False

    def __init__(self, digits, multipliers, cap: int, target_max: int):
        self.digits = frozenset(digits)
        self.multipliers = np.asarray(multipliers, dtype=np.int64)
        self.cap = cap
        cost = np.zeros(cap + 1, dtype=np.int64)
        pcost = np.zeros(cap + 1, dtype=np.int64)
        d = np.asarray([x for x in digits if x <= cap], dtype=np.int64)
        cost[d] = 1
        num_levels = {1: d}
        phrase_levels: dict[int, np.ndarray] = {}
        remaining = target_max - int(np.count_nonzero(d <= target_max))
        level, last_nonempty = 1, 1
        while remaining > 0:
            level += 2  # symbol counts are always odd
            if level > 2 * last_nonempty + 1:
                break
            found = False
            q = num_levels.get(level - 2)
            if q is not None and self.multipliers.size:
                prod = np.multiply.outer(q, self.multipliers).ravel()
                prod = np.unique(prod[prod <= cap])
                prod = prod[pcost[prod] == 0]
                if prod.size:
                    pcost[prod] = level
                    phrase_levels[level] = prod
                    found = True
            candidates = []
            if level in phrase_levels:
                candidates.append(phrase_levels[level])
            for a, phrases in phrase_levels.items():
                rests = num_levels.get(level - 1 - a)
                if rests is None:
                    continue
                sums = np.add.outer(phrases, rests).ravel()
                diffs = np.subtract.outer(phrases, rests).ravel()
                candidates.append(sums[sums <= cap])
                candidates.append(diffs[diffs >= 1])
            if candidates:
                new = np.unique(np.concatenate(candidates))
                new = new[cost[new] == 0]
                if new.size:
                    cost[new] = level
                    num_levels[level] = new
                    remaining -= int(np.count_nonzero(new <= target_max))
                    found = True
            if found:
                last_nonempty = level
        self.cost = cost
        self.num_levels = num_levels
        self.phrase_levels = phrase_levels

    def cost_of(self, v: int) -> int:
        return int(self.cost[v]) if v <= self.cap else 0


def _slack(digits, multipliers, horizon: int) -> list[int]:
    """``slack[k]``: the most that subtracted siblings worth ``k`` symbols can add.

    Walking from the root of an expression for ``n`` down to a subexpression
    ``e``, the value can only exceed the parent's by the value of a sibling
    being subtracted, so ``value(e) <= n + slack[C - complexity(e)]`` when the
    whole expression has ``C`` symbols.  ``slack`` is the largest total value
    of disjoint subtrees whose symbols plus one operator each fit in ``k``.
    """
    top_m = max(multipliers, default=0)
    vmax = [0] * (horizon + 1)  # largest value with exactly c symbols
    pmax = [0] * (horizon + 1)
    for c in range(1, horizon + 1, 2):
        if c == 1:
            vmax[1] = max(digits)
            continue
        pmax[c] = vmax[c - 2] * top_m
        best = pmax[c]
        for a in range(3, c - 1, 2):
            if pmax[a] and vmax[c - 1 - a]:
                best = max(best, pmax[a] + vmax[c - 1 - a])
        vmax[c] = best
    upto = [0] * (horizon + 1)
    for c in range(1, horizon + 1):
        upto[c] = max(upto[c - 1], vmax[c])
    slack = [0] * (horizon + 1)
    for k in range(2, horizon + 1):
        slack[k] = max([slack[k - 1]] + [upto[j] + slack[k - 1 - j] for j in range(1, k)])
    return slack


class _WorkLimit(Exception):
    pass


class _ExactSearch(_Levels):
    """Uncapped level search certifying the minima below known upper bounds.

    ``upper[n - 1]`` must be an achievable complexity for every numeral in
    range.  Levels stop once every numeral has been reached; each level keeps
    only values no larger than the slack bound allows.
    """

    exact = True

    def __init__(self, dm: DMPair, upper: np.ndarray, work_limit: int | None = None):
        work_limit = EXACT_WORK_LIMIT if work_limit is None else work_limit
        self.digits = frozenset(dm.digits)
        self.multipliers = np.asarray(dm.multipliers, dtype=np.int64)
        r = dm.range_max
        slack = _slack(dm.digits, dm.multipliers, int(upper.max()))
        # keeps products inside int64; no realistic grammar gets near it
        ceiling = (1 << 62) // max(dm.multipliers + (2,))
        m_min = int(self.multipliers.min()) if self.multipliers.size else 1
        digits = np.asarray(dm.digits, dtype=np.int64)
        found = np.zeros(r + 1, dtype=bool)
        found[digits] = True
        num_levels, phrase_levels = {1: digits}, {}
        seen, pseen = digits, _EMPTY
        work, level = 0, 1
        while not found[1:].all():
            level += 2
            horizon = int(upper[~found[1:]].max())
            if level > horizon:
                raise AssertionError(f"certifying search overran its bound for {dm}")
            bound = min(r + slack[horizon - level], ceiling)
            candidates = []
            q = num_levels.get(level - 2)
            if q is not None and self.multipliers.size:
                q = q[q <= bound // m_min]
                work += q.size * self.multipliers.size
                if work > work_limit:
                    raise _WorkLimit
                prod = np.unique(np.multiply.outer(q, self.multipliers).ravel())
                prod = prod[prod <= bound]
                prod = prod[~np.isin(prod, pseen, assume_unique=True)]
                if prod.size:
                    phrase_levels[level] = prod
                    pseen = np.union1d(pseen, prod)
                    candidates.append(prod)
            for a, phrases in phrase_levels.items():
                rests = num_levels.get(level - 1 - a)
                if rests is None or not rests.size:
                    continue
                phrases = phrases[phrases <= bound + rests[-1]]
                work += 2 * phrases.size * rests.size
                if work > work_limit:
                    raise _WorkLimit
                small = phrases[phrases < bound]
                sums = np.add.outer(small, rests[rests < bound]).ravel()
                diffs = np.subtract.outer(phrases, rests).ravel()
                candidates.append(sums[sums <= bound])
                candidates.append(diffs[(diffs >= 1) & (diffs <= bound)])
            new = np.unique(np.concatenate(candidates)) if candidates else _EMPTY
            new = new[~np.isin(new, seen, assume_unique=True)]
            if new.size:
                num_levels[level] = new
                seen = np.union1d(seen, new)
                hit = new[new <= r]
                found[hit] = True
                upper[hit - 1] = np.minimum(upper[hit - 1], level)
        self.num_levels = num_levels
        self.phrase_levels = phrase_levels
        cost = np.zeros(r + 1, dtype=np.int64)
        for c, arr in num_levels.items():
            cost[arr[arr <= r]] = c
        self.cost = cost


@lru_cache(maxsize=1 << 16)
def _search(dm: DMPair, cap: int | None) -> _Levels:
    if cap is not None:
        return _CappedSearch(dm.digits, dm.multipliers, cap, dm.range_max)
    narrow = _search(dm, default_value_cap(dm.range_max))
    if not narrow.cost[1 : dm.range_max + 1].all():
        # coverage is decided under the default cap
        return narrow
    wide = _search(dm, WIDE_CAP_FACTOR * dm.range_max)
    try:
        return _ExactSearch(dm, wide.cost[1 : dm.range_max + 1].copy())
    except _WorkLimit:
        return wide


def minimal_costs(dm: DMPair, value_cap: int | None = None) -> np.ndarray:
    """Minimal complexity for each numeral ``1..range_max`` (index 0 is numeral 1).

    Uncoverable numerals get 0.  Cached per (dm, cap); the array is read-only.
    """
    costs = _search(dm, value_cap).cost[1 : dm.range_max + 1]
    costs.flags.writeable = False
    return costs


def is_certified(dm: DMPair) -> bool:
    """Whether the default search proved its costs minimal (see ``EXACT_WORK_LIMIT``)."""
    return _search(dm, None).exact


def uncovered(dm: DMPair, value_cap: int | None = None) -> list[int]:
    costs = minimal_costs(dm, value_cap)
    return [int(i) + 1 for i in np.flatnonzero(costs == 0)]


def covers(dm: DMPair, value_cap: int | None = None) -> bool:
    """True iff every numeral in ``1..dm.range_max`` has an expression."""
    return bool(np.all(minimal_costs(dm, value_cap) > 0))


class _Builder:
    """Rebuilds canonical expressions from a finished level search.

    Ties among minimal expressions resolve as: digit, then bare phrase, then
    sum, then difference; within a kind the larger outermost multiplier wins,
    then the smaller rest.  Multiplier and rest together pin down a single
    candidate, so no further tie-break is needed.
    """

    def __init__(self, search: _Levels):
        self.s = search
        self._num: dict[int, NumExpr] = {}
        self._phrase: dict[int, Phrase] = {}

    def phrase(self, v: int) -> Phrase:
        if v in self._phrase:
            return self._phrase[v]
        s = self.s
        target = s.pcost_of(v)
        best = None
        for m in s.multipliers[::-1].tolist():
            if v % m == 0 and s.cost_of(v // m) + 2 == target:
                best = Phrase(self.num(v // m), m)
                break
        assert best is not None, v
        self._phrase[v] = best
        return best

    def num(self, v: int) -> NumExpr:
        if v in self._num:
            return self._num[v]
        s = self.s
        target = s.cost_of(v)
        if target == 1 and v in s.digits:
            expr = Digit(v)
        elif s.pcost_of(v) == target:
            expr = self.phrase(v)
        else:
            expr = self._combine(v, target, Sum) or self._combine(v, target, Diff)
            assert expr is not None, v
        self._num[v] = expr
        return expr

    def _combine(self, v, target, kind):
        best_key, best = None, None
        for a, phrases in self.s.phrase_levels.items():
            rests = self.s.num_levels.get(target - 1 - a)
            if rests is None:
                continue
            if kind is Sum:
                p = phrases[phrases < v]
                r = v - p
            else:
                p = phrases[phrases > v]
                r = p - v
            ok = np.isin(r, rests)
            for pv, rv in zip(p[ok].tolist(), r[ok].tolist()):
                key = (-self.phrase(pv).multiplier, rv)
                if best_key is None or key < best_key:
                    best_key, best = key, (pv, rv)
        if best is None:
            return None
        return kind(self.phrase(best[0]), self.num(best[1]))


def compute_lmin(dm: DMPair, value_cap: int | None = None) -> Lexicon:
    """The minimal-complexity language for ``dm``.

    Every numeral gets an expression of the least possible symbol count; since
    the need-weighted average is a positively weighted sum of per-numeral
    complexities, this lexicon also minimises the average.  When the
    certifying search would exceed its work limit the wide-cap result is used
    instead; :func:`is_certified` reports which happened.

    Raises:
        CoverageError: listing every numeral in range with no expression.
    """
    search = _search(dm, value_cap)
    missing = uncovered(dm, value_cap)
    if missing:
        raise CoverageError(missing, dm)
    builder = _Builder(search)
    entries = {n: builder.num(n) for n in range(1, dm.range_max + 1)}
    return Lexicon(dm, entries)


def brute_force_lmin(dm: DMPair, max_complexity: int, *, require_complete: bool = True) -> Lexicon:
    """Exhaustive enumeration of expressions up to ``max_complexity`` symbols.

    Intermediate values are not capped.  Expressions are grouped by exact
    symbol count and kind, keeping one tree per value (enough to decide the
    minimum).  Intended as a test oracle for :func:`compute_lmin`; keep the
    bound small.
    """
    num: dict[int, dict[int, NumExpr]] = {}
    phr: dict[int, dict[int, Phrase]] = {}
    for c in range(1, max_complexity + 1):
        phr[c] = {}
        if c >= 3:
            for v, q in num[c - 2].items():
                for m in dm.multipliers:
                    phr[c].setdefault(v * m, Phrase(q, m))
        level: dict[int, NumExpr] = {}
        if c == 1:
            level = {d: Digit(d) for d in dm.digits}
        for v, p in phr[c].items():
            level.setdefault(v, p)
        for a in range(3, c - 1):
            b = c - 1 - a
            for pv, p in phr[a].items():
                for rv, r in num[b].items():
                    level.setdefault(pv + rv, Sum(p, r))
                    if pv - rv >= 1 and pv - rv not in level:
                        level[pv - rv] = Diff(p, r)
        num[c] = level

    entries: dict[int, NumExpr] = {}
    for c in range(1, max_complexity + 1):
        for v, expr in num[c].items():
            if 1 <= v <= dm.range_max and v not in entries:
                entries[v] = expr
    entries = dict(sorted(entries.items()))
    if require_complete:
        missing = [n for n in range(1, dm.range_max + 1) if n not in entries]
        if missing:
            raise CoverageError(missing, dm)
    return Lexicon(dm, entries, partial=not require_complete)
