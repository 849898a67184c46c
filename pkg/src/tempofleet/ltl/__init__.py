from .formula import (
    Formula,
    TrueF,
    FalseF,
    Atom,
    Not,
    And,
    Or,
    Next,
    Until,
    Release,
    Eventually,
    Always,
    ParseError,
    UnknownAtomError,
    parse_ltl,
    pretty,
    to_nnf,
    conjoin,
)
from .lasso import LassoWord, eval_lasso
from .buchi import NBA, translate, nba_accepts_lasso

__all__ = [
    "Formula",
    "TrueF",
    "FalseF",
    "Atom",
    "Not",
    "And",
    "Or",
    "Next",
    "Until",
    "Release",
    "Eventually",
    "Always",
    "ParseError",
    "UnknownAtomError",
    "parse_ltl",
    "pretty",
    "to_nnf",
    "conjoin",
    "LassoWord",
    "eval_lasso",
    "NBA",
    "translate",
    "nba_accepts_lasso",
]
