"""LTL formula AST, parser, pretty-printer and negation normal form."""

from __future__ import annotations

from dataclasses import dataclass


class Formula:
    pass


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


TRUE = TrueF()
FALSE = FalseF()


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownAtomError(ValueError):
    pass


_UNARY = {"!": Not, "X": Next, "F": Eventually, "G": Always}


class _Parser:
    """Recursive-descent parser.

    Precedence, tightest to loosest: unary (!, X, F, G), U (right
    associative), &, |, ->.  Implications are expanded on the fly.
    """

    def __init__(self, text, universe):
        self.text = text
        self.universe = universe
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._skip_ws()
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def _accept(self, token):
        self._skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def parse(self):
        f = self._implies()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ParseError("trailing input", self.pos)
        return f

    def _implies(self):
        left = self._or()
        if self._accept("->"):
            right = self._implies()
            return Or(Not(left), right)
        return left

    def _or(self):
        left = self._and()
        while self._peek() == "|":
            self._accept("|")
            left = Or(left, self._and())
        return left

    def _and(self):
        left = self._until()
        while self._peek() == "&":
            self._accept("&")
            left = And(left, self._until())
        return left

    def _until(self):
        left = self._unary()
        if self._peek() == "U":
            self._accept("U")
            return Until(left, self._until())
        return left

    def _unary(self):
        self._skip_ws()
        c = self._peek()
        if c in _UNARY:
            # "U" cannot start a formula, so single-letter operators are
            # unambiguous here.
            self.pos += 1
            return _UNARY[c](self._unary())
        return self._primary()

    def _primary(self):
        self._skip_ws()
        start = self.pos
        if self._accept("("):
            f = self._implies()
            if not self._accept(")"):
                raise ParseError("expected ')'", self.pos)
            return f
        if self._accept('"'):
            end = self.text.find('"', self.pos)
            if end < 0:
                raise ParseError("unterminated atom", start)
            name = self.text[self.pos:end]
            self.pos = end + 1
            if not name:
                raise ParseError("empty atom name", start)
            if self.universe is not None and name not in self.universe:
                raise UnknownAtomError(f"unknown atom {name!r}")
            return Atom(name)
        if self.text.startswith("true", self.pos):
            self.pos += 4
            return TRUE
        raise ParseError("expected formula", self.pos)


def parse_ltl(text, universe=None):
    """Parse an LTL formula; atom names are validated against ``universe`` if given."""
    return _Parser(text, universe).parse()


def pretty(f):
    """Render a formula; ``parse_ltl(pretty(f))`` reproduces the AST."""
    return _pretty(f, 0)


# Binding strength used to insert the minimal parentheses.
_LEVEL_OR, _LEVEL_AND, _LEVEL_UNTIL, _LEVEL_UNARY = 1, 2, 3, 4


def _pretty(f, parent_level):
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        # Not produced by the parser; printed as a tautological negation.
        return "!true"
    if isinstance(f, Atom):
        return f'"{f.name}"'
    if isinstance(f, (Not, Next, Eventually, Always)):
        op = {Not: "!", Next: "X", Eventually: "F", Always: "G"}[type(f)]
        return op + " " + _pretty(f.operand, _LEVEL_UNARY)
    if isinstance(f, Until):
        s = _pretty(f.left, _LEVEL_UNARY) + " U " + _pretty(f.right, _LEVEL_UNTIL)
        return "(" + s + ")" if parent_level > _LEVEL_UNTIL else s
    if isinstance(f, Release):
        # Release has no surface syntax; print its Until dual.
        return _pretty(Not(Until(Not(f.left), Not(f.right))), parent_level)
    if isinstance(f, And):
        s = _pretty(f.left, _LEVEL_AND) + " & " + _pretty(f.right, _LEVEL_AND + 1)
        return "(" + s + ")" if parent_level > _LEVEL_AND else s
    if isinstance(f, Or):
        s = _pretty(f.left, _LEVEL_OR) + " | " + _pretty(f.right, _LEVEL_OR + 1)
        return "(" + s + ")" if parent_level > _LEVEL_OR else s
    raise TypeError(f"not a formula: {f!r}")


def to_nnf(f):
    """Negation normal form.

    Pushes negations down to atoms and rewrites F/G in terms of
    Until/Release, so the result uses only literals, True/False, And, Or,
    Next, Until and Release.
    """
    if isinstance(f, (TrueF, FalseF, Atom)):
        return f
    if isinstance(f, Not):
        return _neg_nnf(f.operand)
    if isinstance(f, Next):
        return Next(to_nnf(f.operand))
    if isinstance(f, Eventually):
        return Until(TRUE, to_nnf(f.operand))
    if isinstance(f, Always):
        return Release(FALSE, to_nnf(f.operand))
    if isinstance(f, And):
        return And(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Or):
        return Or(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Until):
        return Until(to_nnf(f.left), to_nnf(f.right))
    if isinstance(f, Release):
        return Release(to_nnf(f.left), to_nnf(f.right))
    raise TypeError(f"not a formula: {f!r}")


def _neg_nnf(f):
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return to_nnf(f.operand)
    if isinstance(f, Next):
        return Next(_neg_nnf(f.operand))
    if isinstance(f, Eventually):
        return Release(FALSE, _neg_nnf(f.operand))
    if isinstance(f, Always):
        return Until(TRUE, _neg_nnf(f.operand))
    if isinstance(f, And):
        return Or(_neg_nnf(f.left), _neg_nnf(f.right))
    if isinstance(f, Or):
        return And(_neg_nnf(f.left), _neg_nnf(f.right))
    if isinstance(f, Until):
        return Release(_neg_nnf(f.left), _neg_nnf(f.right))
    if isinstance(f, Release):
        return Until(_neg_nnf(f.left), _neg_nnf(f.right))
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f):
    if isinstance(f, Not):
        return isinstance(f.operand, Atom)
    if isinstance(f, (TrueF, FalseF, Atom)):
        return True
    if isinstance(f, Next):
        return is_nnf(f.operand)
    if isinstance(f, (And, Or, Until, Release)):
        return is_nnf(f.left) and is_nnf(f.right)
    return False


def conjoin(formulas):
    """Conjunction of a list of formulas (True for the empty list)."""
    out = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return TRUE if out is None else out


def atoms_of(f):
    """Set of atom names occurring in the formula."""
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if isinstance(f, (Not, Next, Eventually, Always)):
        return atoms_of(f.operand)
    return atoms_of(f.left) | atoms_of(f.right)
