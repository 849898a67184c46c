"""Sampling-based prefix-suffix planner over the product space.

Grows incremental trees (never materializing the full product): a prefix
tree rooted at the initial product state, then one suffix tree per
discovered accepting node.  Node selection is ε-greedy between the newest
node and a uniform draw; admission expands all lazily enumerated
successors; re-parenting (rewiring) keeps costs shortest-so-far, which is
what makes the scheme asymptotically optimal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .product import (
    PrefixSuffixPlan,
    _Expander,
    initial_product_states,
    verify_plan,
)


@dataclass
class PlannerParams:
    n_max: int = 100000
    seed: int = 0
    bias: float = 0.3        # probability of expanding the newest node
    suffix_cap: int = 25     # max accepting roots to grow suffix trees from
    stall_limit: int | None = None   # early stop after this many idle rounds

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if not 0.0 <= self.bias <= 1.0:
            raise ValueError("bias must be in [0, 1]")


class SearchTree:
    """Parent-linked shortest-cost-so-far tree over product states."""

    def __init__(self, roots):
        self.parent = {}         # state -> (parent state | None, TSTransition | None)
        self.cost = {}
        self.children = {}
        self.order = []          # insertion order, newest last
        for r in roots:
            if r not in self.cost:
                self.parent[r] = (None, None)
                self.cost[r] = 0.0
                self.children[r] = set()
                self.order.append(r)

    def __contains__(self, p):
        return p in self.cost

    def add(self, q, p, edge, cost):
        self.parent[q] = (p, edge)
        self.cost[q] = cost
        self.children[q] = set()
        self.children[p].add(q)
        self.order.append(q)

    def reparent(self, q, p, edge, cost):
        old, _ = self.parent[q]
        self.children[old].discard(q)
        self.parent[q] = (p, edge)
        self.children[p].add(q)
        delta = cost - self.cost[q]
        stack = [q]
        while stack:
            v = stack.pop()
            self.cost[v] += delta
            stack.extend(self.children[v])

    def path_edges(self, q):
        out = []
        while True:
            p, e = self.parent[q]
            if e is None:
                break
            out.append(e)
            q = p
        out.reverse()
        return out

    def check_cost_invariant(self):
        for q, c in self.cost.items():
            total = sum(e.cost for e in self.path_edges(q))
            assert abs(total - c) < 1e-9, f"cost drift at {q}"


def _grow(tree, expander, params, on_edge=None, debug=False):
    rng = random.Random(params.seed)
    stall = 0
    for it in range(params.n_max):
        limit = params.stall_limit or max(200, 2 * len(tree.order))
        if stall > limit:
            break
        if rng.random() < params.bias:
            p = tree.order[-1]
        else:
            p = tree.order[rng.randrange(len(tree.order))]
        changed = False
        for q, t in expander.expand(p):
            if on_edge is not None:
                on_edge(p, q, t)
            cand = tree.cost[p] + t.cost
            if q not in tree:
                tree.add(q, p, t, cand)
                changed = True
            elif cand < tree.cost[q] - 1e-12:
                tree.reparent(q, p, t, cand)
                changed = True
        stall = 0 if changed else stall + 1
        if debug and it % 1000 == 999:
            tree.check_cost_invariant()
    return tree


def grow_prefix_tree(scenario, nba, params, _expander=None, debug=False):
    """Returns (tree, accepting product states discovered)."""
    ex = _expander or _Expander(scenario, nba)
    tree = SearchTree(initial_product_states(scenario, nba))
    _grow(tree, ex, params, debug=debug)
    accepting = [p for p in tree.order if p.nba_state in nba.accepting]
    return tree, accepting


def grow_suffix_tree(root, scenario, nba, params, _expander=None, debug=False):
    """Cheapest detected cycle around ``root``: (edges, cost) or None."""
    if root.nba_state not in nba.accepting:
        raise ValueError("suffix trees must be rooted at accepting states")
    ex = _expander or _Expander(scenario, nba)
    tree = SearchTree([root])
    closers = {}     # (source state, closing edge) keyed for dedup

    def on_edge(p, q, t):
        if q == root:
            closers[(p, t)] = True

    _grow(tree, ex, params, on_edge=on_edge, debug=debug)
    best = None
    for (p, t) in sorted(closers, key=repr):
        c = tree.cost[p] + t.cost
        if best is None or c < best[0]:
            best = (c, tree.path_edges(p) + [t])
    if best is None:
        return None
    return best[1], best[0]


def plan_sampling(scenario, nba, params, debug=False):
    """Prefix tree + one suffix tree per accepting root; min-total plan."""
    ex = _Expander(scenario, nba)
    tree, accepting = grow_prefix_tree(scenario, nba, params, _expander=ex,
                                       debug=debug)
    cyclic = nba.cyclic_states()
    roots = sorted((p for p in accepting if p.nba_state in cyclic),
                   key=lambda p: (tree.cost[p], repr(p)))
    best = None
    for f in roots[:params.suffix_cap]:
        if best is not None and tree.cost[f] >= best[0]:
            continue
        got = grow_suffix_tree(f, scenario, nba, params, _expander=ex,
                               debug=debug)
        if got is None:
            continue
        cycle, c_cyc = got
        total = tree.cost[f] + c_cyc
        if best is None or total < best[0]:
            best = (total, f, cycle)
    if best is None:
        return None
    total, f, cycle = best
    plan = PrefixSuffixPlan(tree.path_edges(f), cycle, total)
    plan.validate_structure(scenario)
    assert verify_plan(plan, nba, scenario)
    return plan
