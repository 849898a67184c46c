"""Ultimately periodic words and a direct LTL semantics evaluator.

The evaluator works position by position over the finitely many distinct
suffixes of a lasso word, computing Until/Release by fixpoint iteration
over the cycle.  It is deliberately independent of the automaton route so
the two can cross-check each other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    FalseF,
    Next,
    Not,
    Or,
    Release,
    TrueF,
    Until,
)


@dataclass(frozen=True)
class LassoWord:
    """Infinite word ``prefix . cycle^omega``; letters are frozensets of atoms."""

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ValueError("lasso cycle must be nonempty")
        object.__setattr__(self, "prefix", tuple(frozenset(a) for a in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(a) for a in self.cycle))

    @property
    def letters(self):
        return self.prefix + self.cycle

    def successor(self, i):
        """Index of the position following ``i`` among the distinct positions."""
        n = len(self.prefix) + len(self.cycle)
        if i < n - 1:
            return i + 1
        return len(self.prefix)


def eval_lasso(f, w):
    """True iff the lasso word satisfies the formula at position 0."""
    return _truth_table(f, w, {})[0]


def _truth_table(f, w, cache):
    """Truth value of f at every distinct position of w."""
    if f in cache:
        return cache[f]
    letters = w.letters
    n = len(letters)
    p = len(w.prefix)
    succ = [w.successor(i) for i in range(n)]

    if isinstance(f, TrueF):
        vals = [True] * n
    elif isinstance(f, FalseF):
        vals = [False] * n
    elif isinstance(f, Atom):
        vals = [f.name in letters[i] for i in range(n)]
    elif isinstance(f, Not):
        sub = _truth_table(f.operand, w, cache)
        vals = [not v for v in sub]
    elif isinstance(f, And):
        a = _truth_table(f.left, w, cache)
        b = _truth_table(f.right, w, cache)
        vals = [x and y for x, y in zip(a, b)]
    elif isinstance(f, Or):
        a = _truth_table(f.left, w, cache)
        b = _truth_table(f.right, w, cache)
        vals = [x or y for x, y in zip(a, b)]
    elif isinstance(f, Next):
        sub = _truth_table(f.operand, w, cache)
        vals = [sub[succ[i]] for i in range(n)]
    elif isinstance(f, Eventually):
        vals = _fixpoint([True] * n, _truth_table(f.operand, w, cache),
                         succ, p, n, least=True, mode="until")
    elif isinstance(f, Always):
        vals = _fixpoint([False] * n, _truth_table(f.operand, w, cache),
                         succ, p, n, least=False, mode="release")
    elif isinstance(f, Until):
        vals = _fixpoint(_truth_table(f.left, w, cache),
                         _truth_table(f.right, w, cache),
                         succ, p, n, least=True, mode="until")
    elif isinstance(f, Release):
        vals = _fixpoint(_truth_table(f.left, w, cache),
                         _truth_table(f.right, w, cache),
                         succ, p, n, least=False, mode="release")
    else:
        raise TypeError(f"not a formula: {f!r}")
    cache[f] = vals
    return vals


def _fixpoint(a, b, succ, p, n, least, mode):
    """Until (least) / Release (greatest) fixpoint over the lasso positions.

    Cycle positions are iterated to a fixpoint first (at most cycle-length
    rounds), then prefix positions are filled right to left.
    """
    vals = [not least] * n
    cycle_len = n - p
    for _ in range(cycle_len + 1):
        changed = False
        for i in range(n - 1, p - 1, -1):
            if mode == "until":
                v = b[i] or (a[i] and vals[succ[i]])
            else:
                v = b[i] and (a[i] or vals[succ[i]])
            if v != vals[i]:
                vals[i] = v
                changed = True
        if not changed:
            break
    for i in range(p - 1, -1, -1):
        if mode == "until":
            vals[i] = b[i] or (a[i] and vals[succ[i]])
        else:
            vals[i] = b[i] and (a[i] or vals[succ[i]])
    return vals
