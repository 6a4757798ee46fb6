import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from numeralgame import DMPair, Diff, Digit, ParseError, Phrase, Sum, ms_complexity, parse, render, value
from numeralgame.grammar import symbols, uses_lexicon

NINETY_NINE = Sum(Phrase(Digit(9), 10), Digit(9))


def test_value():
    assert value(Digit(2)) == 2
    assert value(Phrase(Digit(2), 10)) == 20
    assert value(NINETY_NINE) == 99
    assert value(Diff(Phrase(Digit(10), 10), Digit(1))) == 99


def test_complexity_counts_symbols():
    assert ms_complexity(Digit(2)) == 1
    assert ms_complexity(Phrase(Digit(2), 10)) == 3
    assert ms_complexity(NINETY_NINE) == 5


def test_render():
    assert render(Phrase(Digit(1), 10)) == "1*10"
    assert render(Digit(7)) == "7"
    assert render(Sum(Phrase(Digit(2), 10), Digit(3))) == "2*10+3"
    # a sum used as a multiplicand needs brackets to stay unambiguous
    assert render(Phrase(Sum(Phrase(Digit(2), 10), Digit(3)), 10)) == "(2*10+3)*10"


def test_parse():
    dm = DMPair((1, 2, 3), (10,), 99)
    assert parse("2*10+3", dm) == Sum(Phrase(Digit(2), 10), Digit(3))
    assert parse("11", DMPair((11,), (), 99)) == Digit(11)
    with pytest.raises(ParseError):
        parse("2*10", DMPair((2,), (12,), 99))


def test_nonpositive_difference_rejected():
    with pytest.raises(ValueError):
        Diff(Phrase(Digit(1), 2), Digit(2))


def test_sum_left_operand_must_be_phrase():
    with pytest.raises((TypeError, ValueError)):
        Sum(Digit(1), Digit(2))


def test_uses_lexicon():
    dm = DMPair((1, 2, 3, 9), (10,), 99)
    assert uses_lexicon(NINETY_NINE, dm)
    assert not uses_lexicon(NINETY_NINE, DMPair((9,), (12,), 99))


DIGITS = (1, 2, 3, 5, 7)
MULTS = (4, 10)
DM = DMPair(DIGITS, MULTS, 10**9)


def _exprs():
    leaves = st.sampled_from(DIGITS).map(Digit)

    def extend(children):
        phrases = st.builds(Phrase, children, st.sampled_from(MULTS))
        sums = st.builds(Sum, phrases, children)
        diffs = st.tuples(phrases, children).filter(lambda t: value(t[0]) > value(t[1])).map(lambda t: Diff(*t))
        return st.one_of(phrases, sums, diffs)

    return st.recursive(leaves, extend, max_leaves=6)


@settings(max_examples=200, deadline=None)
@given(_exprs())
def test_roundtrip_and_token_count(expr):
    assert parse(render(expr), DM) == expr
    assert len(symbols(expr)) == ms_complexity(expr)
    assert value(expr) >= 1
