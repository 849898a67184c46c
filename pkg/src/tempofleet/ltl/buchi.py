"""Tableau translation from LTL to nondeterministic Büchi automata.

Expand-node construction to a generalized Büchi automaton (one acceptance
set per Until subformula) followed by counter-based degeneralization.
Edges carry propositional constraints (required-true / required-false atom
sets) rather than explicit letters, so the automaton stays polynomial in
the formula size even for large atom universes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import (
    And,
    Atom,
    FalseF,
    Next,
    Not,
    Or,
    Release,
    TrueF,
    Until,
    atoms_of,
    is_nnf,
)


@dataclass(frozen=True)
class Edge:
    src: int
    req_true: frozenset
    req_false: frozenset
    dst: int

    def matches(self, letter):
        return self.req_true <= letter and not (self.req_false & letter)


@dataclass
class NBA:
    n_states: int
    initial: frozenset
    accepting: frozenset
    edges: list
    atoms: frozenset = frozenset()
    _out: dict = field(default=None, repr=False)

    def __post_init__(self):
        if not self.initial <= frozenset(range(self.n_states)):
            raise ValueError("initial states out of range")
        if not self.accepting <= frozenset(range(self.n_states)):
            raise ValueError("accepting states out of range")
        for e in self.edges:
            if e.req_true & e.req_false:
                raise ValueError(f"contradictory edge label on {e}")

    def out_edges(self, state):
        if self._out is None:
            out = {s: [] for s in range(self.n_states)}
            for e in self.edges:
                out[e.src].append(e)
            self._out = out
        return self._out[state]

    def cyclic_states(self):
        """States lying on some directed cycle of the edge graph.

        A lasso can only close around such a state, so planners use this to
        skip accepting states that are structurally transient.
        """
        adj = {s: {e.dst for e in self.out_edges(s)} for s in range(self.n_states)}
        # iterative Tarjan strongly-connected components
        index = {}
        low = {}
        on = set()
        stack = []
        result = set()
        counter = [0]
        for root in range(self.n_states):
            if root in index:
                continue
            work = [(root, iter(sorted(adj[root])))]
            index[root] = low[root] = counter[0]
            counter[0] += 1
            stack.append(root)
            on.add(root)
            while work:
                v, it = work[-1]
                advanced = False
                for u in it:
                    if u not in index:
                        index[u] = low[u] = counter[0]
                        counter[0] += 1
                        stack.append(u)
                        on.add(u)
                        work.append((u, iter(sorted(adj[u]))))
                        advanced = True
                        break
                    if u in on:
                        low[v] = min(low[v], index[u])
                if advanced:
                    continue
                work.pop()
                if work:
                    pv = work[-1][0]
                    low[pv] = min(low[pv], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        u = stack.pop()
                        on.discard(u)
                        comp.append(u)
                        if u == v:
                            break
                    if len(comp) > 1 or comp[0] in adj[comp[0]]:
                        result.update(comp)
        return frozenset(result)

    def export_text(self):
        lines = [f"states: {self.n_states}",
                 "initial: " + " ".join(map(str, sorted(self.initial))),
                 "accepting: " + " ".join(map(str, sorted(self.accepting))),
                 "edges:"]
        for e in sorted(self.edges, key=lambda e: (e.src, e.dst)):
            pos = " & ".join(sorted(e.req_true)) or "-"
            neg = " & ".join("!" + a for a in sorted(e.req_false)) or "-"
            lines.append(f"  {e.src} -> {e.dst} : +[{pos}] -[{neg}]")
        return "\n".join(lines) + "\n"


class _Node:
    __slots__ = ("incoming", "new", "old", "nxt")

    def __init__(self, incoming, new, old, nxt):
        self.incoming = incoming
        self.new = new  # insertion-ordered dict used as an ordered set
        self.old = old
        self.nxt = nxt


_INIT = 0  # reserved automaton-entry node id


def translate(f):
    """Translate an NNF formula into a language-equivalent NBA.

    State 0 of the result is a dedicated entry state; tableau node labels
    constrain the letter read on the way *into* the node.
    """
    if not is_nnf(f):
        raise ValueError("translate expects a formula in negation normal form")
    nodes = _expand_graph(f)

    untils = sorted(_until_subformulas(f), key=str)
    k = max(1, len(untils))

    node_ids = sorted(nodes)
    if untils:
        gba_accept = [
            {nid for nid in node_ids
             if g not in nodes[nid].old or g.right in nodes[nid].old}
            for g in untils
        ]
    else:
        gba_accept = [set(node_ids)]

    # Counter degeneralization over (node, i): the counter advances when the
    # source node lies in acceptance set i; accepting = set-0 nodes at i=0.
    id_of = {_INIT: _INIT}
    for nid in node_ids:
        for i in range(k):
            id_of[(nid, i)] = len(id_of)

    edges = []
    for nid in node_ids:
        nd = nodes[nid]
        req_true = frozenset(a.name for a in nd.old if isinstance(a, Atom))
        req_false = frozenset(g.operand.name for g in nd.old if isinstance(g, Not))
        for src in sorted(nd.incoming):
            if src == _INIT:
                edges.append(Edge(_INIT, req_true, req_false, id_of[(nid, 0)]))
                continue
            for i in range(k):
                j = (i + 1) % k if src in gba_accept[i] else i
                edges.append(Edge(id_of[(src, i)], req_true, req_false,
                                  id_of[(nid, j)]))

    accepting = frozenset(id_of[(nid, 0)] for nid in gba_accept[0])

    return NBA(
        n_states=len(id_of),
        initial=frozenset({_INIT}),
        accepting=accepting,
        edges=edges,
        atoms=frozenset(atoms_of(f)),
    )


def _until_subformulas(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Until):
            out.add(g)
        if isinstance(g, (Until, Release, And, Or)):
            stack.extend((g.left, g.right))
        elif isinstance(g, Next):
            stack.append(g.operand)
    return out


def _expand_graph(f):
    """GPVW expand-node; returns {node_id: _Node} with deterministic ids.

    Node ids start at 1 (0 is the automaton entry).  All iteration is over
    insertion-ordered structures so results do not depend on hash seeding.
    """
    nodes = {}
    by_key = {}
    counter = [_INIT]

    def fresh():
        counter[0] += 1
        return counter[0]

    stack = [_Node({_INIT}, {f: None}, set(), {})]
    while stack:
        nd = stack.pop()
        if not nd.new:
            key = (frozenset(nd.old), frozenset(nd.nxt))
            other = by_key.get(key)
            if other is not None:
                other.incoming |= nd.incoming
                continue
            nid = fresh()
            nodes[nid] = nd
            by_key[key] = nd
            stack.append(_Node({nid}, dict.fromkeys(nd.nxt), set(), {}))
            continue

        g, _ = nd.new.popitem()
        if isinstance(g, FalseF):
            continue  # contradiction: drop the node
        if isinstance(g, TrueF):
            # Recorded in old so an Until with a trivially true right side
            # still registers as fulfilled in its acceptance set.
            nd.old.add(g)
            stack.append(nd)
            continue
        if isinstance(g, (Atom, Not)):
            if _negation(g) in nd.old:
                continue
            nd.old.add(g)
            stack.append(nd)
        elif isinstance(g, And):
            for c in (g.left, g.right):
                if c not in nd.old:
                    nd.new[c] = None
            nd.old.add(g)
            stack.append(nd)
        elif isinstance(g, Next):
            nd.old.add(g)
            nd.nxt[g.operand] = None
            stack.append(nd)
        elif isinstance(g, Or):
            stack.append(_split(nd, g, (g.left,), ()))
            stack.append(_split(nd, g, (g.right,), ()))
        elif isinstance(g, Until):
            stack.append(_split(nd, g, (g.left,), (g,)))
            stack.append(_split(nd, g, (g.right,), ()))
        elif isinstance(g, Release):
            stack.append(_split(nd, g, (g.right,), (g,)))
            stack.append(_split(nd, g, (g.left, g.right), ()))
        else:
            raise TypeError(f"unexpected formula node: {g!r}")
    return nodes


def _split(nd, g, extra_new, extra_next):
    new = dict(nd.new)
    for c in extra_new:
        if c not in nd.old:
            new[c] = None
    nxt = dict(nd.nxt)
    for c in extra_next:
        nxt[c] = None
    return _Node(set(nd.incoming), new, nd.old | {g}, nxt)


def _negation(lit):
    if isinstance(lit, Not):
        return lit.operand
    return Not(lit)


def nba_accepts_lasso(nba, w):
    """True iff some run over ``w``'s infinite unrolling is accepting.

    Builds the finite product of the automaton with the lasso positions and
    looks for a reachable cycle through an accepting pair.
    """
    letters = w.letters
    n = len(letters)
    p = len(w.prefix)

    def succ(i):
        return i + 1 if i < n - 1 else p

    start = [(q, 0) for q in nba.initial]
    seen = set(start)
    queue = list(start)
    adj = {}
    while queue:
        q, i = queue.pop()
        nxt = []
        letter = letters[i]
        si = succ(i)
        for e in nba.out_edges(q):
            if e.matches(letter):
                node = (e.dst, si)
                nxt.append(node)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
        adj[(q, i)] = nxt

    candidates = [v for v in seen if v[0] in nba.accepting and v[1] >= p]
    for target in candidates:
        stack = list(adj.get(target, ()))
        visited = set(stack)
        while stack:
            v = stack.pop()
            if v == target:
                return True
            for u in adj.get(v, ()):
                if u not in visited:
                    visited.add(u)
                    stack.append(u)
    return False
