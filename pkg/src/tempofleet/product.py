"""Product of the transition system with a Büchi automaton, plus an exact
prefix-suffix planner used as the optimality oracle.

The composition matches edge constraints against the label of the SOURCE
discrete state (the rule π_B --L(π_s)--> π_B'); getting this convention
wrong is the classic off-by-one product bug, hence it is centralized here.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .ltl import LassoWord, nba_accepts_lasso
from .ts import (
    ActionAtom,
    BudgetExceeded,
    TSTransition,
    initial_state,
    state_label,
    successors,
)


@dataclass(frozen=True)
class ProductState:
    ts_state: object
    nba_state: int


@dataclass
class PrefixSuffixPlan:
    prefix: list             # TSTransitions from the initial state
    suffix: list             # nonempty TSTransitions cycling at the knot
    total_cost: float

    @property
    def prefix_cost(self):
        return sum(t.cost for t in self.prefix)

    @property
    def suffix_cost(self):
        return sum(t.cost for t in self.suffix)

    def prefix_states(self):
        """π_s sequence of the prefix including both endpoints."""
        if not self.prefix:
            return [self.suffix[0].source]
        return [self.prefix[0].source] + [t.target for t in self.prefix]

    def suffix_states(self):
        """π_s sequence around the cycle, excluding the closing repeat."""
        return [t.source for t in self.suffix]

    def lasso_word(self, scenario):
        pre = [state_label(scenario, s) for s in self.prefix_states()[:-1]]
        cyc = [state_label(scenario, s) for s in self.suffix_states()]
        return LassoWord(tuple(pre), tuple(cyc))

    def validate_structure(self, scenario):
        if not self.suffix:
            raise ValueError("suffix must be nonempty")
        if self.prefix and self.prefix[0].source != initial_state(scenario):
            raise ValueError("prefix must start at the initial state")
        chain = self.prefix + self.suffix
        for a, b in zip(chain, chain[1:]):
            if a.target != b.source:
                raise ValueError("transitions do not chain")
        if self.suffix[-1].target != self.suffix[0].source:
            raise ValueError("suffix does not cycle")
        if self.prefix and self.prefix[-1].target != self.suffix[0].source:
            raise ValueError("suffix does not start at the prefix end")

    def export_table(self):
        """Ordered action table: one row per plan step, suffix rows starred."""
        lines = [f"total cost: {self.total_cost:.6f}",
                 f"prefix cost: {self.prefix_cost:.6f}",
                 f"suffix cost: {self.suffix_cost:.6f}",
                 "step | actions"]
        n = 1
        for t in self.prefix:
            lines.append(f"{n:4d} | {t.describe()}")
            n += 1
        for t in self.suffix:
            lines.append(f"{n:4d}* | {t.describe()}")
            n += 1
        return "\n".join(lines) + "\n"


class _Expander:
    """Lazy, memoized product successor generator."""

    def __init__(self, scenario, nba):
        self.scenario = scenario
        self.nba = nba
        self._ts_succ = {}
        self._labels = {}
        self._pack_cache = {}
        self._match = {}      # (nba state, letter) -> tuple of destinations

    def label(self, s):
        if s not in self._labels:
            self._labels[s] = state_label(self.scenario, s)
        return self._labels[s]

    def ts_successors(self, s):
        if s not in self._ts_succ:
            self._ts_succ[s] = successors(s, self.scenario, self._pack_cache)
        return self._ts_succ[s]

    def matching(self, q, letter):
        key = (q, letter)
        got = self._match.get(key)
        if got is None:
            got = tuple(e.dst for e in self.nba.out_edges(q) if e.matches(letter))
            self._match[key] = got
        return got

    def expand(self, p):
        qs = self.matching(p.nba_state, self.label(p.ts_state))
        out = []
        for t in self.ts_successors(p.ts_state):
            for q in qs:
                out.append((ProductState(t.target, q), t))
        return out


def product_successors(p, nba, scenario, _expander=None):
    """(successor, TSTransition) pairs; cost χ_P is the TS transition cost."""
    ex = _expander or _Expander(scenario, nba)
    return ex.expand(p)


def initial_product_states(scenario, nba):
    s0 = initial_state(scenario)
    return [ProductState(s0, q) for q in sorted(nba.initial)]


def _dijkstra(sources, expander, max_states):
    """Shortest distances + parent transitions from a set of product states."""
    dist = {}
    parent = {}
    heap = []
    for n, p in enumerate(sources):
        dist[p] = 0.0
        parent[p] = None
        heapq.heappush(heap, (0.0, n, p))
    tick = len(sources)
    while heap:
        d, _, p = heapq.heappop(heap)
        if d > dist.get(p, float("inf")):
            continue
        for q, t in expander.expand(p):
            nd = d + t.cost
            if nd < dist.get(q, float("inf")):
                if q not in dist and len(dist) >= max_states:
                    raise BudgetExceeded(
                        f"product exploration exceeds {max_states} states")
                dist[q] = nd
                parent[q] = (p, t)
                tick += 1
                heapq.heappush(heap, (nd, tick, q))
    return dist, parent


def _path_to(p, parent):
    out = []
    while parent[p] is not None:
        prev, t = parent[p]
        out.append(t)
        p = prev
    out.reverse()
    return out


def exact_plan(scenario, nba, max_states=100000):
    """Optimal prefix-suffix plan by Dijkstra to accepting states plus a
    shortest nonempty cycle around each; None when no accepting lasso exists."""
    ex = _Expander(scenario, nba)
    starts = initial_product_states(scenario, nba)
    dist, parent = _dijkstra(starts, ex, max_states)

    cyclic = nba.cyclic_states()
    accepting = sorted(
        ((d, repr(f), f) for f, d in dist.items()
         if f.nba_state in nba.accepting and f.nba_state in cyclic),
        key=lambda x: (x[0], x[1]))
    best = None
    for d_pre, _, f in accepting:
        if best is not None and d_pre >= best[0]:
            break
        # shortest nonempty cycle: seed with f's outgoing edges, Dijkstra back
        seeds = {}
        for q, t in ex.expand(f):
            if q not in seeds or t.cost < seeds[q][0]:
                seeds[q] = (t.cost, t)
        d_cyc, cycle = _cycle_via(ex, f, seeds, max_states)
        if d_cyc is None:
            continue
        total = d_pre + d_cyc
        if best is None or total < best[0]:
            best = (total, f, cycle)
    if best is None:
        return None
    total, f, cycle = best
    prefix = _path_to(f, parent)
    plan = PrefixSuffixPlan(prefix, cycle, total)
    plan.validate_structure(scenario)
    return plan


def _cycle_via(ex, f, seeds, max_states):
    """Cheapest cycle f -> ... -> f with at least one edge."""
    dist = {}
    parent = {}
    heap = []
    tick = 0
    for q, (c, t) in sorted(seeds.items(), key=lambda kv: (kv[1][0], repr(kv[0]))):
        if c < dist.get(q, float("inf")):
            dist[q] = c
            parent[q] = (None, t)
            tick += 1
            heapq.heappush(heap, (c, tick, q))
    best = None
    while heap:
        d, _, p = heapq.heappop(heap)
        if d > dist.get(p, float("inf")):
            continue
        if p == f:
            best = d
            break
        for q, t in ex.expand(p):
            nd = d + t.cost
            if nd < dist.get(q, float("inf")):
                if q not in dist and len(dist) >= max_states:
                    raise BudgetExceeded(
                        f"product exploration exceeds {max_states} states")
                dist[q] = nd
                parent[q] = (p, t)
                tick += 1
                heapq.heappush(heap, (nd, tick, q))
    if best is None:
        return None, None
    out = []
    p = f
    while True:
        prev, t = parent[p]
        out.append(t)
        if prev is None:
            break
        p = prev
    out.reverse()
    return best, out


def verify_plan(plan, nba, scenario):
    """Discrete certificate: the plan's trace lasso is accepted by the NBA."""
    try:
        plan.validate_structure(scenario)
    except ValueError:
        return False
    return nba_accepts_lasso(nba, plan.lasso_word(scenario))
