"""Learning efficient recursive numeral systems through grammar search and signaling games."""

from numeralgame.grammar import (
    DMPair,
    Diff,
    Digit,
    NumExpr,
    ParseError,
    Phrase,
    Sum,
    ms_complexity,
    parse,
    render,
    value,
)
from numeralgame.lexicon import CoverageError, Lexicon, brute_force_lmin, compute_lmin, covers
from numeralgame.metrics import (
    NeedDistribution,
    avg_ms_complexity_dm,
    avg_ms_complexity_lexicon,
    lexicon_size,
    need_probability,
)

__version__ = "0.1.0"

__all__ = [
    "CoverageError",
    "DMPair",
    "Diff",
    "Digit",
    "Lexicon",
    "NeedDistribution",
    "NumExpr",
    "ParseError",
    "Phrase",
    "Sum",
    "avg_ms_complexity_dm",
    "avg_ms_complexity_lexicon",
    "brute_force_lmin",
    "compute_lmin",
    "covers",
    "lexicon_size",
    "ms_complexity",
    "need_probability",
    "parse",
    "render",
    "value",
]
