"""Batched lasso semantics used by the exhaustive agreement check.

Evaluates one formula against every word of a fixed word bank at once.
Truth values are held as bit-planes: one integer per word position, with
bit w giving the truth at that position of word w.  The automaton side is
batched the same way, with cached per-cycle accepting sets and per-prefix
reachable sets, so that checking hundreds of words per formula costs a
handful of integer operations.
"""

from itertools import product

from tempofleet.ltl.formula import (
    And,
    Atom,
    FalseF,
    Next,
    Not,
    Or,
    Release,
    TrueF,
    Until,
)


def all_letters(atoms):
    """Every truth assignment over ``atoms`` as a frozenset letter."""
    out = []
    for bits in product((False, True), repeat=len(atoms)):
        out.append(frozenset(a for a, b in zip(atoms, bits) if b))
    return tuple(out)


class WordBank:
    """All lasso words with prefix length <= max_prefix and cycle length
    in 1..max_cycle over the full alphabet of ``atoms``, grouped by shape
    (prefix length, cycle length) for bit-plane evaluation."""

    def __init__(self, atoms=("a", "b"), max_prefix=2, max_cycle=2):
        self.atoms = tuple(atoms)
        self.letters = all_letters(self.atoms)
        self.shapes = []
        for lp in range(max_prefix + 1):
            for lc in range(1, max_cycle + 1):
                words = [(p, c)
                         for p in product(self.letters, repeat=lp)
                         for c in product(self.letters, repeat=lc)]
                n = lp + lc
                succ = tuple(i + 1 if i < n - 1 else lp for i in range(n))
                full = (1 << len(words)) - 1
                planes = {}
                for a in self.atoms:
                    planes[a] = [0] * n
                    for w, (p, c) in enumerate(words):
                        seq = p + c
                        for i in range(n):
                            if a in seq[i]:
                                planes[a][i] |= 1 << w
                self.shapes.append({
                    "lp": lp, "lc": lc, "words": words, "n": n,
                    "succ": succ, "full": full, "atom_planes": planes,
                })

    @property
    def n_words(self):
        return sum(len(s["words"]) for s in self.shapes)

    def words(self):
        for s in self.shapes:
            yield from s["words"]

    def truth_planes(self, f, memo=None):
        """Per-shape truth bit-planes of ``f`` (NNF) at every position."""
        if memo is None:
            memo = {}
        return [self._truth(f, s, memo) for s in self.shapes]

    def eval_all(self, f, memo=None):
        """Per-shape bitmasks: bit w set iff ``f`` holds on word w."""
        return [planes[0] for planes in self.truth_planes(f, memo)]

    def _truth(self, f, shape, memo):
        key = (f, shape["lp"], shape["lc"])
        hit = memo.get(key)
        if hit is not None:
            return hit
        n, succ, full = shape["n"], shape["succ"], shape["full"]
        if isinstance(f, TrueF):
            t = (full,) * n
        elif isinstance(f, FalseF):
            t = (0,) * n
        elif isinstance(f, Atom):
            t = tuple(shape["atom_planes"][f.name])
        elif isinstance(f, Not):
            a = self._truth(f.operand, shape, memo)
            t = tuple(full & ~x for x in a)
        elif isinstance(f, Next):
            a = self._truth(f.operand, shape, memo)
            t = tuple(a[succ[i]] for i in range(n))
        elif isinstance(f, And):
            a = self._truth(f.left, shape, memo)
            b = self._truth(f.right, shape, memo)
            t = tuple(x & y for x, y in zip(a, b))
        elif isinstance(f, Or):
            a = self._truth(f.left, shape, memo)
            b = self._truth(f.right, shape, memo)
            t = tuple(x | y for x, y in zip(a, b))
        elif isinstance(f, Until):
            a = self._truth(f.left, shape, memo)
            b = self._truth(f.right, shape, memo)
            t = self._fix(n, succ, b,
                          lambda cur, i: b[i] | (a[i] & cur[succ[i]]))
        elif isinstance(f, Release):
            a = self._truth(f.left, shape, memo)
            b = self._truth(f.right, shape, memo)
            t = self._fix(n, succ, (full,) * n,
                          lambda cur, i: b[i] & (a[i] | cur[succ[i]]))
        else:
            raise TypeError(f"not an NNF formula: {f!r}")
        memo[key] = t
        return t

    @staticmethod
    def _fix(n, succ, start, step):
        cur = tuple(start)
        while True:
            nxt = tuple(step(cur, i) for i in range(n))
            if nxt == cur:
                return cur
            cur = nxt


class BatchAcceptance:
    """Batched NBA lasso acceptance over a WordBank.

    For one automaton: builds per-letter successor bitmasks, then for each
    word intersects the states reachable on the prefix with the states from
    which the cycle admits an accepting lasso (cached per distinct cycle).
    """

    def __init__(self, nba, bank):
        self.nba = nba
        self.bank = bank
        n = nba.n_states
        self.adj = {}
        for letter in bank.letters:
            rows = [0] * n
            for e in nba.edges:
                if e.matches(letter):
                    rows[e.src] |= 1 << e.dst
            self.adj[letter] = rows
        self.init_mask = 0
        for q in nba.initial:
            self.init_mask |= 1 << q
        self.acc_mask = 0
        for q in nba.accepting:
            self.acc_mask |= 1 << q
        self._reach = {(): self.init_mask}
        self._win = {}

    def _step(self, mask, letter):
        rows = self.adj[letter]
        out = 0
        q = 0
        while mask:
            if mask & 1:
                out |= rows[q]
            mask >>= 1
            q += 1
        return out

    def reach(self, prefix):
        hit = self._reach.get(prefix)
        if hit is None:
            hit = self._step(self.reach(prefix[:-1]), prefix[-1])
            self._reach[prefix] = hit
        return hit

    def _cycle_rows(self, cycle):
        """(M, A): whole-cycle successor rows and the subset of those
        successors reached through (or at) an accepting state."""
        acc = self.acc_mask
        rows = self.adj[cycle[0]]
        M = list(rows)
        A = [m & acc for m in M]
        for letter in cycle[1:]:
            rows = self.adj[letter]
            M2, A2 = [], []
            for m, a in zip(M, A):
                nm = na = 0
                r = 0
                while m:
                    if m & 1:
                        nm |= rows[r]
                        if (a >> r | acc >> r) & 1:
                            na |= rows[r]
                    m >>= 1
                    r += 1
                M2.append(nm)
                A2.append(na | (nm & acc))
            M, A = M2, A2
        return M, A

    def win(self, cycle):
        """Bitmask of states q from which reading ``cycle`` forever admits
        a run visiting an accepting state infinitely often."""
        hit = self._win.get(cycle)
        if hit is not None:
            return hit
        n = self.nba.n_states
        M, A = self._cycle_rows(cycle)
        good = self._good_states(n, M, A)
        # backward closure over M of the good states
        seen = good
        while True:
            grown = seen
            for q in range(n):
                if not (grown >> q) & 1 and M[q] & seen:
                    grown |= 1 << q
            if grown == seen:
                break
            seen = grown
        self._win[cycle] = seen
        return seen

    def _good_states(self, n, M, A):
        """States in an SCC of the whole-cycle graph M that contains an
        accepting-visiting edge (u -> v with v in A[u]), as a bitmask.
        Iterative Tarjan."""
        index, low, on, comp = {}, {}, set(), []
        counter = [0]
        good = 0

        def succs(q):
            m, out = M[q], []
            r = 0
            while m:
                if m & 1:
                    out.append(r)
                m >>= 1
                r += 1
            return out

        for root in range(n):
            if root in index:
                continue
            work = [(root, iter(succs(root)))]
            index[root] = low[root] = counter[0]
            counter[0] += 1
            comp.append(root)
            on.add(root)
            while work:
                u, it = work[-1]
                advanced = False
                for v in it:
                    if v not in index:
                        index[v] = low[v] = counter[0]
                        counter[0] += 1
                        comp.append(v)
                        on.add(v)
                        work.append((v, iter(succs(v))))
                        advanced = True
                        break
                    if v in on:
                        low[u] = min(low[u], index[v])
                if advanced:
                    continue
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[u])
                if low[u] == index[u]:
                    scc = []
                    while True:
                        w = comp.pop()
                        on.discard(w)
                        scc.append(w)
                        if w == u:
                            break
                    mask = 0
                    for w in scc:
                        mask |= 1 << w
                    if any(A[w] & mask for w in scc):
                        good |= mask
        return good

    def accepts_all(self):
        """Per-shape bitmasks matching WordBank.eval_all ordering."""
        out = []
        letters = self.bank.letters
        for s in self.bank.shapes:
            # words are ordered prefixes-outer, cycles-inner (see WordBank)
            prefixes = list(product(letters, repeat=s["lp"]))
            wins = [self.win(c) for c in product(letters, repeat=s["lc"])]
            mask = 0
            w = 0
            for p in prefixes:
                r = self.reach(p)
                for win in wins:
                    if r & win:
                        mask |= 1 << w
                    w += 1
            out.append(mask)
        return out


def enumerate_nnf(atoms, depth):
    """All NNF formulas over ``atoms`` with operator depth <= ``depth``.

    Leaves are true, false and the positive/negative literals; each level
    adds X plus the four binary connectives over the previous level.
    """
    from tempofleet.ltl.formula import FALSE, TRUE
    level = [TRUE, FALSE]
    for a in atoms:
        level += [Atom(a), Not(Atom(a))]
    for _ in range(depth):
        prev = list(level)
        nxt = list(prev)
        nxt += [Next(f) for f in prev]
        for op in (And, Or, Until, Release):
            nxt += [op(f, g) for f in prev for g in prev]
        level = nxt
    return level
