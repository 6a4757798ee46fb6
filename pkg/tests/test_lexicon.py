import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from numeralgame import CoverageError, DMPair, brute_force_lmin, compute_lmin, covers, render, value
from numeralgame.grammar import uses_lexicon
from numeralgame.lexicon import is_certified, minimal_costs, uncovered

from conftest import random_covering_pair


def test_english_entries(english):
    lex = compute_lmin(english)
    assert render(lex[10]) == "1*10" and lex.complexity(10) == 3
    assert render(lex[7]) == "7" and lex.complexity(7) == 1
    assert render(lex[99]) == "9*10+9" and lex.complexity(99) == 5


def test_entries_are_valid(english):
    lex = compute_lmin(english)
    assert len(lex) == 99
    for n in range(1, 100):
        assert value(lex[n]) == n
        assert uses_lexicon(lex[n], english)


def test_coverage():
    assert covers(DMPair((1,), (2,), 10))
    assert not covers(DMPair((2,), (3,), 10))
    assert uncovered(DMPair((2,), (3,), 10)) == [1, 3, 5, 7, 9]
    with pytest.raises(CoverageError) as err:
        compute_lmin(DMPair((2,), (3,), 10))
    assert err.value.missing == [1, 3, 5, 7, 9]


def test_brute_force_examples(english):
    # 3..7 need more than five symbols here, so the lexicon is partial
    lex = brute_force_lmin(DMPair((1, 2), (10,), 12), 5, require_complete=False)
    assert render(lex[12]) == "1*10+2"
    partial = brute_force_lmin(english, 3, require_complete=False)
    assert render(partial[20]) == "2*10"
    digits_only = brute_force_lmin(english, 1, require_complete=False)
    assert sorted(digits_only.entries) == list(english.digits)


def test_matches_brute_force_on_random_pairs():
    rng = np.random.default_rng(123)
    for _ in range(10):
        dm = random_covering_pair(rng, int(rng.integers(10, 31)))
        fast = compute_lmin(dm).complexities()
        bound = max(fast.values())
        slow = brute_force_lmin(dm, bound).complexities()
        assert fast == slow, dm


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 30))
def test_adding_a_digit_never_hurts(seed, extra):
    rng = np.random.default_rng(seed)
    dm = random_covering_pair(rng, 30)
    if extra in dm.digits or extra in dm.multipliers:
        return
    before = minimal_costs(dm)
    after = minimal_costs(DMPair(dm.digits + (extra,), dm.multipliers, dm.range_max))
    assert np.all(after <= before)


def test_deterministic(english):
    assert compute_lmin(english).entries == compute_lmin(english).entries


def test_large_intermediates_are_used():
    # 3 = 18*6-15*7 routes through 108 and 105, far beyond the range
    dm = DMPair((1, 15, 16, 18), (6, 7), 35)
    lex = compute_lmin(dm)
    assert lex.complexity(3) == 7
    assert lex.complexity(3) == brute_force_lmin(dm, 7, require_complete=False).complexity(3)
    assert is_certified(dm)


def test_explicit_cap_restricts_search():
    dm = DMPair((1, 15, 16, 18), (6, 7), 35)
    assert minimal_costs(dm, 70)[2] > minimal_costs(dm)[2]


def test_uncertified_fallback_is_an_upper_bound():
    # a single digit and two large multipliers need very long expressions
    dm = DMPair((1,), (35, 69), 99)
    if is_certified(dm):
        pytest.skip("certified within the work limit")
    lex = compute_lmin(dm)
    assert all(value(lex[n]) == n for n in range(1, 100))
