"""Pomset automata: sequential, fork and merge transitions.

Acceptance follows the five run rules: trivial runs, sequential units,
composition, forks whose branches all terminate in accepting states, and
forks whose paused branches are merged back by the merge map.  Run labels
are communication-free pomsets: communication is consumed as rho-labelled
sequential symbols, so pomsets with communication edges must be
synchronously translated before acceptance.
"""

import json
from itertools import permutations

from . import expr as ex
from . import pomset as pm
from .comm import CommTable, active_comm_table, is_rho, rho_parts
from .errors import (
    InputFormError,
    PreconditionError,
    UnsupportedStructureError,
)


def _skey(s):
    return s.key() if isinstance(s, ex.Expr) else (str(s),)


def _mset(states):
    return tuple(sorted(states, key=_skey))


class PomsetAutomaton:
    """Finite-state automaton over pomsets.

    ``delta`` maps (state, symbol) to target sets, ``gamma`` maps
    (state, multiset-of-states) to target sets (the fork transitions) and
    ``eta`` maps (multiset-of-states, state) to target sets (the merge
    transitions).  Multisets are sorted tuples.  Values are immutable
    after construction.
    """

    def __init__(self, states, finals, delta, gamma=None, eta=None):
        self.states = frozenset(states)
        self.finals = frozenset(finals)
        self.delta = {}
        for (q, a), targets in (delta or {}).items():
            targets = frozenset(targets)
            if targets:
                self.delta[(q, a)] = targets
        self.gamma = {}
        for (q, phi), targets in (gamma or {}).items():
            targets = frozenset(targets)
            if targets:
                self.gamma[(q, _mset(phi))] = targets
        self.eta = {}
        for (phi, q), targets in (eta or {}).items():
            targets = frozenset(targets)
            if targets:
                self.eta[(_mset(phi), q)] = targets
        self._check()
        self._cache = {}

    def _check(self):
        if not self.finals <= self.states:
            raise PreconditionError("final states outside the state set")
        for (q, _), targets in self.delta.items():
            if q not in self.states or not targets <= self.states:
                raise PreconditionError("sequential transition outside the state set")
        for (q, phi), targets in self.gamma.items():
            refs = {q} | set(phi) | set(targets)
            if not refs <= self.states:
                raise PreconditionError("fork transition outside the state set")
        for (phi, q), targets in self.eta.items():
            refs = {q} | set(phi) | set(targets)
            if not refs <= self.states:
                raise PreconditionError("merge transition outside the state set")

    def alphabet(self):
        return sorted({a for (_, a) in self.delta})

    def delta_from(self, q):
        return sorted(
            ((a, targets) for (p, a), targets in self.delta.items() if p == q),
            key=lambda item: item[0],
        )

    def gamma_from(self, q):
        return sorted(
            ((phi, targets) for (p, phi), targets in self.gamma.items() if p == q),
            key=lambda item: tuple(map(_skey, item[0])),
        )

    def eta_into(self, q):
        """Merge entries whose pending fork target is ``q``."""
        return sorted(
            ((phi, targets) for (phi, p), targets in self.eta.items() if p == q),
            key=lambda item: tuple(map(_skey, item[0])),
        )

    def has_outgoing(self, q):
        if any(p == q for (p, _) in self.delta):
            return True
        if any(p == q for (p, _) in self.gamma):
            return True
        if any(p == q for (_, p) in self.eta):
            return True
        return False

    def __repr__(self):
        return "<pomset automaton %d states, %d/%d/%d transitions>" % (
            len(self.states),
            len(self.delta),
            len(self.gamma),
            len(self.eta),
        )


def deadlock_states(a):
    """States with no outgoing transitions that do not terminate."""
    return frozenset(
        q for q in a.states if not a.has_outgoing(q) and q not in a.finals
    )


# ---------------------------------------------------------------------------
# support relation and structural predicates


def _support_edges(a):
    edges = {q: set() for q in a.states}
    for (q, _), targets in a.delta.items():
        edges[q] |= targets
    for (q, phi), targets in a.gamma.items():
        edges[q] |= targets
        edges[q] |= set(phi)
    for (phi, q), targets in a.eta.items():
        edges[q] |= targets
        for r in phi:
            edges[r].add(q)
    return edges


def _reachable(edges, q):
    seen = {q}
    stack = [q]
    while stack:
        s = stack.pop()
        for t in edges[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def support(a, q):
    """The least support-closed set of states containing ``q``."""
    return frozenset(_reachable(_support_edges(a), q))


def _below(a):
    """below[q] = all states supporting q (i.e. r with r preceq q)."""
    edges = _support_edges(a)
    return {q: _reachable(edges, q) for q in a.states}


def is_fork_acyclic(a):
    below = _below(a)
    for (q, phi), _ in a.gamma.items():
        for r in phi:
            if q in below[r]:
                return False
    return True


def _strictly_below(below, r, q):
    return r in below[q] and q not in below[r]


def is_recursive_state(a, q, below=None):
    below = below or _below(a)
    for (p, _), targets in a.delta.items():
        if p == q and any(not _strictly_below(below, t, q) for t in targets):
            return False
    for (p, phi), targets in a.gamma.items():
        if p != q:
            continue
        if any(not _strictly_below(below, t, q) for t in targets):
            return False
        if all(_strictly_below(below, r, q) for r in phi):
            continue
        rest = list(phi)
        if q in rest:
            rest.remove(q)
            if all(_strictly_below(below, r, q) for r in rest) and all(
                not a.has_outgoing(t) for t in targets
            ):
                continue
        return False
    for (phi, p), _ in a.eta.items():
        if p == q and any(not _strictly_below(below, q, r) for r in phi):
            return False
    return True


def is_progressive_state(a, q, below=None):
    below = below or _below(a)
    for (p, phi), _ in a.gamma.items():
        if p == q and any(not _strictly_below(below, r, q) for r in phi):
            return False
    return True


def is_well_nested(a):
    below = _below(a)
    return all(
        is_recursive_state(a, q, below) or is_progressive_state(a, q, below)
        for q in a.states
    )


def restrict(a, keep):
    """Component-wise restriction to a support-closed state set."""
    keep = frozenset(keep)
    edges = _support_edges(a)
    for q in keep:
        if not edges[q] <= keep:
            raise PreconditionError("state set is not support-closed")
    return PomsetAutomaton(
        keep,
        a.finals & keep,
        {k: v for k, v in a.delta.items() if k[0] in keep},
        {k: v for k, v in a.gamma.items() if k[0] in keep},
        {k: v for k, v in a.eta.items() if k[1] in keep},
    )


# ---------------------------------------------------------------------------
# acceptance (decision over one pomset)


def _divisors(u):
    out = set()
    stack = [u, pm.EMPTY]
    while stack:
        v = stack.pop()
        if v in out:
            continue
        out.add(v)
        sf = pm.seq_factors(v)
        if len(sf) > 1:
            for i in range(1, len(sf)):
                left = pm.EMPTY
                for f in sf[:i]:
                    left = pm.compose_seq(left, f)
                right = pm.EMPTY
                for f in sf[i:]:
                    right = pm.compose_seq(right, f)
                stack.append(left)
                stack.append(right)
        pf = pm.par_factors(v)
        if len(pf) > 1:
            for mask in range(1, (1 << len(pf)) - 1):
                part = pm.EMPTY
                for i in range(len(pf)):
                    if mask >> i & 1:
                        part = pm.compose_par(part, pf[i])
                stack.append(part)
    return out


def _prefix_splits(u):
    """(prefix, rest) pairs with the prefix a possibly-empty initial
    segment of the prime chain."""
    factors = pm.seq_factors(u)
    out = []
    for i in range(len(factors) + 1):
        left = pm.EMPTY
        for f in factors[:i]:
            left = pm.compose_seq(left, f)
        right = pm.EMPTY
        for f in factors[i:]:
            right = pm.compose_seq(right, f)
        out.append((left, right))
    return out


def _par_assignments(u, slots):
    """All ways to split ``u`` into ``slots`` parallel parts (parts may be
    empty); yields tuples of pomsets."""
    factors = pm.par_factors(u)
    seen = set()
    out = []

    def assign(i, groups):
        if i == len(factors):
            parts = []
            for g in groups:
                part = pm.EMPTY
                for f in g:
                    part = pm.compose_par(part, f)
                parts.append(part)
            key = tuple(p.sort_key() for p in parts)
            if key not in seen:
                seen.add(key)
                out.append(tuple(parts))
            return
        for g in groups:
            g.append(factors[i])
            assign(i + 1, groups)
            g.pop()

    assign(0, [[] for _ in range(slots)])
    return out


def _matchings(phi, items):
    """Distinct bijections between the multiset ``phi`` and ``items``."""
    seen = set()
    for perm in permutations(range(len(items))):
        pairing = tuple((phi[i], items[perm[i]]) for i in range(len(phi)))
        if pairing not in seen:
            seen.add(pairing)
            yield pairing


def accepts(a, q, u):
    """Whether some accepting run of the automaton carries ``u`` from
    ``q``; the pomset must be communication-free."""
    if u.co:
        raise InputFormError(
            "acceptance runs over synchronously translated pomsets; "
            "apply the translation first"
        )
    if q not in a.states:
        raise PreconditionError("unknown state %r" % (q,))
    divisors = sorted(_divisors(u), key=pm.Pomset.sort_key)
    run = {(s, v): set() for s in a.states for v in divisors}

    def unit_ends(s, w):
        """End states of unit runs from s labelled w (given current run)."""
        ends = set()
        if w.n == 1:
            ends |= a.delta.get((s, w.labels[0]), frozenset())
        for phi, targets in a.gamma_from(s):
            if len(phi) < 2:
                continue
            for parts in _par_assignments(w, len(phi)):
                for pairing in _matchings(phi, parts):
                    end_choices = [run[(r, v)] for r, v in pairing]
                    if any(not c for c in end_choices):
                        continue
                    # fork whose branches all end accepting
                    if all(c & a.finals for c in end_choices):
                        ends |= targets
                    # fork with a merge of the paused branches
                    for t in targets:
                        for psi, merged in a.eta_into(t):
                            if len(psi) != len(phi):
                                continue
                            for pairing2 in _matchings(psi, list(pairing)):
                                if all(
                                    p_end in run[(r, v)]
                                    for p_end, (r, v) in pairing2
                                ):
                                    ends |= merged
                                    break
        return ends

    changed = True
    while changed:
        changed = False
        for v in divisors:
            splits = _prefix_splits(v)
            for s in a.states:
                cell = run[(s, v)]
                before = len(cell)
                if v.is_empty:
                    cell.add(s)
                for w, rest in splits:
                    for mid in unit_ends(s, w):
                        if rest.is_empty:
                            cell.add(mid)
                        else:
                            cell |= run[(mid, rest)]
                if len(cell) != before:
                    changed = True
    return bool(run[(q, u)] & a.finals)


# ---------------------------------------------------------------------------
# bounded language by forward closure of runs


def _run_table(a, n):
    """For each state, all (pomset, end state) pairs of runs with at most
    ``n`` events."""
    key = ("runs", n)
    if key in a._cache:
        return a._cache[key]
    table = {s: {(pm.EMPTY, s)} for s in a.states}
    changed = True
    while changed:
        changed = False
        for s in a.states:
            new = set()
            for u, p in table[s]:
                for sym, targets in a.delta_from(p):
                    if u.n + 1 > n:
                        continue
                    w = pm.compose_seq(u, pm.primitive(sym))
                    for t in targets:
                        new.add((w, t))
                for phi, targets in a.gamma_from(p):
                    if len(phi) < 2:
                        continue
                    branch_sets = [table[r] for r in phi]

                    def branch_tuples(i, acc_pomset, acc_ends):
                        if acc_pomset.n + u.n > n:
                            return
                        if i == len(branch_sets):
                            yield acc_pomset, tuple(acc_ends)
                            return
                        for v, end in branch_sets[i]:
                            yield from branch_tuples(
                                i + 1,
                                pm.compose_par(acc_pomset, v),
                                acc_ends + [end],
                            )

                    for w, ends in branch_tuples(0, pm.EMPTY, []):
                        label = pm.compose_seq(u, w)
                        if label.n > n:
                            continue
                        if all(e in a.finals for e in ends):
                            for t in targets:
                                new.add((label, t))
                        for t in targets:
                            for psi, merged in a.eta_into(t):
                                if psi == _mset(ends):
                                    for t2 in merged:
                                        new.add((label, t2))
            if not new <= table[s]:
                table[s] |= new
                changed = True
    a._cache[key] = table
    return table


def language_bounded(a, q, n):
    """All accepted pomsets with at most ``n`` events."""
    if q not in a.states:
        raise PreconditionError("unknown state %r" % (q,))
    table = _run_table(a, n)
    return frozenset(u for u, end in table[q] if end in a.finals)


def unit_lts(a, n):
    """Unit-run edges with labels of at most ``n`` events, for reusing the
    state-based bisimilarity procedures on automata."""
    table = _run_table(a, n)
    succ = {}
    for s in a.states:
        edges = set()
        for sym, targets in a.delta_from(s):
            for t in targets:
                edges.add((pm.primitive(sym).sort_key(), t))
        for phi, targets in a.gamma_from(s):
            if len(phi) < 2:
                continue
            branch_sets = [table[r] for r in phi]

            def tuples(i, acc_pomset, acc_ends):
                if acc_pomset.n > n:
                    return
                if i == len(branch_sets):
                    yield acc_pomset, tuple(acc_ends)
                    return
                for v, end in branch_sets[i]:
                    yield from tuples(
                        i + 1, pm.compose_par(acc_pomset, v), acc_ends + [end]
                    )

            for w, ends in tuples(0, pm.EMPTY, []):
                if all(e in a.finals for e in ends):
                    for t in targets:
                        edges.add((w.sort_key(), t))
                for t in targets:
                    for psi, merged in a.eta_into(t):
                        if psi == _mset(ends):
                            for t2 in merged:
                                edges.add((w.sort_key(), t2))
        succ[s] = tuple(sorted(edges, key=lambda e: (e[0], _skey(e[1]))))
    return succ


# ---------------------------------------------------------------------------
# syntactic automaton (expression derivatives)


def _seq_after(targets, y):
    return {ex.mkseq(t, y) for t in targets}


def _delta_expr(x, sym, table):
    """Sequential derivative; communication symbols pair first actions of
    both operands of a merge and require nullable leftovers."""
    if isinstance(x, (ex.Zero, ex.One)):
        return set()
    if isinstance(x, ex.Act):
        return {ex.ONE} if x.name == sym else set()
    if isinstance(x, ex.CommAct):
        return {ex.ONE} if x.sym() == sym else set()
    if isinstance(x, ex.Alt):
        return _delta_expr(x.left, sym, table) | _delta_expr(x.right, sym, table)
    if isinstance(x, ex.Seq):
        out = _seq_after(_delta_expr(x.left, sym, table), x.right)
        if ex.nullable(x.left):
            out |= _delta_expr(x.right, sym, table)
        return out
    if isinstance(x, ex.Star):
        return _seq_after(_delta_expr(x.arg, sym, table), x)
    if isinstance(x, ex.ParStar):
        return set()
    if isinstance(x, ex.Par):
        return set()
    if isinstance(x, (ex.Merge, ex.Conc)):
        if not is_rho(sym):
            return set()
        from .semantics import primitive_symbols

        p, q = rho_parts(sym)
        lefts = primitive_symbols(x.left)
        rights = primitive_symbols(x.right)
        if (p in lefts and q in rights) or (q in lefts and p in rights):
            return {ex.ONE}
        return set()
    if isinstance(x, ex.LMerge):
        return set()
    raise TypeError("not an expression: %r" % (x,))


def _forks_expr(x):
    """Fork entries (phi, target) of the syntactic automaton."""
    if isinstance(x, (ex.Zero, ex.One, ex.Act, ex.CommAct)):
        return set()
    if isinstance(x, ex.Alt):
        return _forks_expr(x.left) | _forks_expr(x.right)
    if isinstance(x, ex.Seq):
        out = {(phi, ex.mkseq(t, x.right)) for phi, t in _forks_expr(x.left)}
        if ex.nullable(x.left):
            out |= _forks_expr(x.right)
        return out
    if isinstance(x, ex.Star):
        return {(phi, ex.mkseq(t, x)) for phi, t in _forks_expr(x.arg)}
    if isinstance(x, ex.ParStar):
        return {(_mset((x.arg, x)), ex.ONE)}
    if isinstance(x, (ex.Par, ex.Conc)):
        return {(_mset((x.left, x.right)), ex.ONE)}
    if isinstance(x, (ex.Merge, ex.LMerge)):
        return set()
    raise TypeError("not an expression: %r" % (x,))


def _syntactic_alphabet(x, table):
    letters = set()

    def walk(e):
        if isinstance(e, ex.Act):
            letters.add(e.name)
        for c in e.children():
            walk(c)

    walk(x)
    syms = set(letters)

    def rho_atoms(e):
        if isinstance(e, ex.CommAct):
            syms.add(e.sym())
        for c in e.children():
            rho_atoms(c)

    rho_atoms(x)
    for a in sorted(letters):
        for b in sorted(letters):
            if table.defined(a, b):
                syms.add(table.rho(a, b))
    return sorted(syms)


def syntactic_pa(x, table=None):
    """The derivative automaton of an expression; returns ``(A, x)``.

    States are the reachable remainders, accepting states the nullable
    ones.  Forks realize parallel composition and the parallel star;
    communication is consumed as rho-labelled sequential transitions.
    """
    table = table or active_comm_table()
    alphabet = _syntactic_alphabet(x, table)
    delta = {}
    gamma = {}
    states = {x}
    frontier = [x]
    while frontier:
        state = frontier.pop()
        nxt = set()
        for sym in alphabet:
            targets = _delta_expr(state, sym, table)
            if targets:
                delta[(state, sym)] = targets
                nxt |= targets
        for phi, target in _forks_expr(state):
            gamma.setdefault((state, phi), set()).add(target)
            nxt |= set(phi) | {target}
        for s in nxt:
            if s not in states:
                states.add(s)
                frontier.append(s)
    finals = {s for s in states if ex.nullable(s)}
    return PomsetAutomaton(states, finals, delta, gamma, {}), x


# ---------------------------------------------------------------------------
# linear systems and least solutions


class LinearSystem:
    """s(q) >= b(q)*e + sum_q' M(q,q')*s(q'), solved for the least s."""

    def __init__(self, states, matrix, vector):
        self.states = list(states)
        self.matrix = {
            k: v for k, v in matrix.items() if not isinstance(v, ex.Zero)
        }
        self.vector = {
            k: v for k, v in vector.items() if not isinstance(v, ex.Zero)
        }

    def m(self, p, q):
        return self.matrix.get((p, q), ex.ZERO)

    def b(self, q):
        return self.vector.get(q, ex.ZERO)


def _lmul(x, y):
    if isinstance(x, ex.Zero) or isinstance(y, ex.Zero):
        return ex.ZERO
    return ex.mkseq(x, y)


def _lsum(*terms):
    return ex.sum_of(terms)


def _lstar(x):
    if isinstance(x, (ex.Zero, ex.One)):
        return ex.ONE
    return ex.Star(x)


def _lpar(x, y):
    if isinstance(x, ex.Zero) or isinstance(y, ex.Zero):
        return ex.ZERO
    if isinstance(x, ex.One):
        return y
    if isinstance(y, ex.One):
        return x
    return ex.Par(x, y)


def solve_linear_system(system, e=ex.ONE):
    """Least solution by generalized Arden elimination.

    Forward elimination removes each unknown in turn (a self-loop becomes
    a starred prefix); back-substitution then resolves the rows against
    the already-solved later unknowns.
    """
    states = list(system.states)
    m = {
        (p, q): system.m(p, q)
        for p in states
        for q in states
        if not isinstance(system.m(p, q), ex.Zero)
    }
    b = {q: _lmul(system.b(q), e) for q in states}
    for i, q in enumerate(states):
        star = _lstar(m.pop((q, q), ex.ZERO))
        b[q] = _lmul(star, b[q])
        row = {dst: coeff for (src, dst), coeff in m.items() if src == q}
        for dst, coeff in row.items():
            m[(q, dst)] = _lmul(star, coeff)
        for p in states[i + 1 :]:
            c = m.pop((p, q), None)
            if c is None:
                continue
            b[p] = _lsum(b[p], _lmul(c, b[q]))
            for dst, coeff in row.items():
                if dst == q:
                    continue
                m[(p, dst)] = _lsum(
                    m.get((p, dst), ex.ZERO), _lmul(c, _lmul(star, coeff))
                )
    solution = {}
    for q in reversed(states):
        value = b[q]
        for (src, dst), coeff in m.items():
            if src == q and dst in solution:
                value = _lsum(value, _lmul(coeff, solution[dst]))
        solution[q] = value
    return solution


class _Solver:
    """Stratified least-solution extraction along the support order."""

    def __init__(self, a):
        self.a = a
        self.below = _below(a)
        self.fork_acyclic = is_fork_acyclic(a)
        if not self.fork_acyclic and not is_well_nested(a):
            raise UnsupportedStructureError(
                "the automaton is neither fork-acyclic nor well-nested"
            )
        self.memo = {}
        self.rho_table = self._rho_table()

    def _rho_table(self):
        entries = []
        for (_, sym) in self.a.delta:
            if is_rho(sym):
                p, q = rho_parts(sym)
                entries.append((p, q, sym))
        return CommTable(entries)

    def _atom(self, sym):
        if is_rho(sym):
            p, q = rho_parts(sym)
            return ex.CommAct(p, q, self.rho_table)
        return ex.Act(sym)

    def _scc(self, q):
        mutual = frozenset(
            r for r in self.below[q] if q in self.below[r]
        )
        return mutual

    def value(self, q, goal):
        key = (q, goal)
        if key in self.memo:
            return self.memo[key]
        scc = self._scc(q)
        self._solve_scc(scc, goal)
        return self.memo[key]

    def _goal_holds(self, q, goal):
        if goal == "accept":
            return q in self.a.finals
        return q == goal[1]

    def _strict(self, r, q):
        return _strictly_below(self.below, r, q)

    def _fork_coefficients(self, q, goal, scc):
        """(coefficient, continuation, kind) contributions of forks at q;
        continuation is either a state of the same component (matrix) or an
        already-solved expression (vector)."""
        matrix_terms = []
        vector_terms = []
        self_par = []  # bodies P of equations s = ... + P || s
        for phi, targets in self.a.gamma_from(q):
            if len(phi) < 2:
                continue
            if q in phi:
                rest = list(phi)
                rest.remove(q)
                if q in rest or not all(self._strict(r, q) for r in rest):
                    raise UnsupportedStructureError(
                        "unsolvable recursive fork at %r" % (q,)
                    )
                if any(self.a.has_outgoing(t) for t in targets):
                    raise UnsupportedStructureError(
                        "recursive fork target with outgoing transitions"
                    )
                body = ex.ONE
                for r in rest:
                    body = _lpar(body, self.value(r, "accept"))
                for t in targets:
                    self_par.append((body, t))
                continue
            if not all(self._strict(r, q) for r in phi):
                raise UnsupportedStructureError(
                    "fork child not strictly below its source"
                )
            # branches all terminate in accepting states
            coeff5 = ex.ONE
            for r in phi:
                coeff5 = _lpar(coeff5, self.value(r, "accept"))
            for t in targets:
                if t in scc:
                    matrix_terms.append((coeff5, t))
                else:
                    vector_terms.append(_lmul(coeff5, self.value(t, goal)))
            # branches paused and merged
            for t in targets:
                for psi, merged in self.a.eta_into(t):
                    if len(psi) != len(phi):
                        continue
                    coeff4 = ex.ZERO
                    for pairing in _matchings(list(phi), list(psi)):
                        prod = ex.ONE
                        for r, end in pairing:
                            prod = _lpar(prod, self.value(r, ("at", end)))
                        coeff4 = _lsum(coeff4, prod)
                    for t2 in merged:
                        if t2 in scc:
                            matrix_terms.append((coeff4, t2))
                        else:
                            vector_terms.append(
                                _lmul(coeff4, self.value(t2, goal))
                            )
        return matrix_terms, vector_terms, self_par

    def _solve_scc(self, scc, goal):
        states = sorted(scc, key=_skey)
        matrix = {}
        vector = {}
        par_bodies = {}
        for q in states:
            b = ex.ONE if self._goal_holds(q, goal) else ex.ZERO
            for sym, targets in self.a.delta_from(q):
                atom = self._atom(sym)
                for t in targets:
                    if t in scc:
                        key = (q, t)
                        matrix[key] = _lsum(matrix.get(key, ex.ZERO), atom)
                    else:
                        b = _lsum(b, _lmul(atom, self.value(t, goal)))
            m_terms, v_terms, self_par = self._fork_coefficients(q, goal, scc)
            for coeff, t in m_terms:
                key = (q, t)
                matrix[key] = _lsum(matrix.get(key, ex.ZERO), coeff)
            for term in v_terms:
                b = _lsum(b, term)
            if self_par:
                if len(states) > 1 or matrix:
                    raise UnsupportedStructureError(
                        "recursive fork inside a non-trivial component"
                    )
                par_bodies[q] = self_par
            vector[q] = b
        if par_bodies:
            (q,) = states
            base = vector[q]
            if goal == "accept":
                body = ex.ZERO
                for p, t in par_bodies[q]:
                    if t in self.a.finals:
                        body = _lsum(body, p)
                value = _lpar(
                    ex.ParStar(body) if not isinstance(body, ex.Zero) else ex.ONE,
                    base,
                )
            else:
                value = base
                own_accept = self.value(q, "accept")
                for p, t in par_bodies[q]:
                    if self._goal_holds(t, goal):
                        value = _lsum(value, _lpar(p, own_accept))
            self.memo[(q, goal)] = value
            return
        solution = solve_linear_system(LinearSystem(states, matrix, vector))
        for q in states:
            self.memo[(q, goal)] = solution[q]


def solve(a, q):
    """A rational expression whose bounded language coincides with the
    state's bounded automaton language."""
    solver = a._cache.get("solver")
    if solver is None:
        solver = _Solver(a)
        a._cache["solver"] = solver
    return solver.value(q, "accept")


# ---------------------------------------------------------------------------
# JSON and DOT


def to_json(a, name_of=None):
    name_of = name_of or (lambda s: s if isinstance(s, str) else ex.to_text(s))
    states = sorted(a.states, key=_skey)
    return {
        "states": [name_of(s) for s in states],
        "finals": sorted(name_of(s) for s in a.finals),
        "delta": sorted(
            (
                {"from": name_of(q), "label": sym, "to": name_of(t)}
                for (q, sym), targets in a.delta.items()
                for t in targets
            ),
            key=lambda d: (d["from"], d["label"], d["to"]),
        ),
        "gamma": sorted(
            (
                {
                    "from": name_of(q),
                    "fork": [name_of(r) for r in phi],
                    "to": name_of(t),
                }
                for (q, phi), targets in a.gamma.items()
                for t in targets
            ),
            key=lambda d: (d["from"], d["fork"], d["to"]),
        ),
        "eta": sorted(
            (
                {
                    "join": [name_of(r) for r in phi],
                    "from": name_of(q),
                    "to": name_of(t),
                }
                for (phi, q), targets in a.eta.items()
                for t in targets
            ),
            key=lambda d: (d["join"], d["from"], d["to"]),
        ),
    }


def from_json(obj):
    try:
        states = set(obj["states"])
        finals = set(obj["finals"])
        delta = {}
        for entry in obj.get("delta", []):
            delta.setdefault((entry["from"], entry["label"]), set()).add(
                entry["to"]
            )
        gamma = {}
        for entry in obj.get("gamma", []):
            gamma.setdefault(
                (entry["from"], tuple(sorted(entry["fork"]))), set()
            ).add(entry["to"])
        eta = {}
        for entry in obj.get("eta", []):
            eta.setdefault(
                (tuple(sorted(entry["join"])), entry["from"]), set()
            ).add(entry["to"])
    except (KeyError, TypeError) as exc:
        raise InputFormError("malformed automaton object: %s" % exc) from None
    return PomsetAutomaton(states, finals, delta, gamma, eta)


def dumps(a):
    return json.dumps(to_json(a), sort_keys=True)


def loads(text):
    return from_json(json.loads(text))


def to_dot(a):
    name_of = lambda s: s if isinstance(s, str) else ex.to_text(s)
    states = sorted(a.states, key=_skey)
    index = {s: "q%d" % i for i, s in enumerate(states)}
    lines = ["digraph pa {", '  rankdir="LR";']
    for s in states:
        shape = "doublecircle" if s in a.finals else "circle"
        lines.append('  %s [label="%s", shape=%s];' % (index[s], name_of(s), shape))
    for (q, sym), targets in sorted(
        a.delta.items(), key=lambda kv: (_skey(kv[0][0]), kv[0][1])
    ):
        for t in sorted(targets, key=_skey):
            lines.append('  %s -> %s [label="%s"];' % (index[q], index[t], sym))
    forks = 0
    for (q, phi), targets in sorted(
        a.gamma.items(), key=lambda kv: (_skey(kv[0][0]), tuple(map(_skey, kv[0][1])))
    ):
        for t in sorted(targets, key=_skey):
            node = "fork%d" % forks
            forks += 1
            lines.append('  %s [shape=point, label=""];' % node)
            lines.append("  %s -> %s [style=dashed, arrowhead=none];" % (index[q], node))
            for r in phi:
                lines.append("  %s -> %s [style=dashed];" % (node, index[r]))
            lines.append('  %s -> %s [style=dotted, label="resume"];' % (node, index[t]))
    joins = 0
    for (phi, q), targets in sorted(
        a.eta.items(), key=lambda kv: (tuple(map(_skey, kv[0][0])), _skey(kv[0][1]))
    ):
        for t in sorted(targets, key=_skey):
            node = "join%d" % joins
            joins += 1
            lines.append('  %s [shape=point, label=""];' % node)
            for r in phi:
                lines.append("  %s -> %s [style=dashed, arrowhead=none];" % (index[r], node))
            lines.append("  %s -> %s [style=dashed];" % (index[q], node))
            lines.append("  %s -> %s;" % (node, index[t]))
    lines.append("}")
    return "\n".join(lines)
