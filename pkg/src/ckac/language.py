"""Finite pomset languages and their compositions.

Languages are finite sets of canonical pomsets, optionally carrying the
event bound at which an infinite language was truncated.  All operations
are pointwise and deterministic.
"""

import json

from . import pomset as pm
from .errors import PreconditionError, UnsupportedHypothesisError


class PomsetLanguage:
    """Finite set of canonical pomsets with an optional truncation bound."""

    __slots__ = ("members", "event_bound")

    def __init__(self, members=(), event_bound=None):
        members = frozenset(members)
        if event_bound is not None:
            members = frozenset(u for u in members if u.n <= event_bound)
        self.members = members
        self.event_bound = event_bound

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, u):
        return u in self.members

    def __eq__(self, other):
        if not isinstance(other, PomsetLanguage):
            return NotImplemented
        if self.event_bound != other.event_bound:
            return False
        return self.members == other.members

    def __hash__(self):
        return hash((self.members, self.event_bound))

    def sorted(self):
        return sorted(self.members, key=pm.Pomset.sort_key)

    def __repr__(self):
        bound = "" if self.event_bound is None else " <=%d" % self.event_bound
        return "<language %d pomsets%s>" % (len(self.members), bound)


def _merge_bound(*bounds):
    present = [b for b in bounds if b is not None]
    return min(present) if present else None


def lang_compose(op, left, right):
    """Pointwise composition of two languages.

    ``op`` is one of ``union``, ``seq``, ``par``, ``comm``, ``conc``.  For
    ``comm``, pairs with an empty operand are excluded so that ``x | 1``
    denotes the empty language.  The event bound propagates as the minimum
    of the operands' bounds.
    """
    bound = _merge_bound(left.event_bound, right.event_bound)
    if op == "union":
        return PomsetLanguage(left.members | right.members, bound)
    out = set()
    for u in left:
        for v in right:
            if bound is not None and u.n + v.n > bound:
                continue
            if op == "seq":
                out.add(pm.compose_seq(u, v))
            elif op == "par":
                out.add(pm.compose_par(u, v))
            elif op == "comm":
                if not u.is_empty and not v.is_empty:
                    out.add(pm.compose_comm(u, v))
            elif op == "conc":
                out.update(pm.compose_conc(u, v))
            else:
                raise ValueError("unknown composition %r" % op)
    return PomsetLanguage(out, bound)


def _iterate_bounded(lang, n, combine):
    seeds = [u for u in lang if not u.is_empty and u.n <= n]
    out = {pm.EMPTY}
    frontier = {pm.EMPTY}
    while frontier:
        nxt = set()
        for u in frontier:
            for v in seeds:
                if u.n + v.n > n:
                    continue
                w = combine(u, v)
                if w not in out:
                    out.add(w)
                    nxt.add(w)
        frontier = nxt
    return PomsetLanguage(out, _merge_bound(lang.event_bound, n))


def lang_star_bounded(lang, n):
    """All members of the iterated sequential composition with at most
    ``n`` events."""
    return _iterate_bounded(lang, n, pm.compose_seq)


def lang_parstar_bounded(lang, n):
    """All members of the iterated parallel composition with at most ``n``
    events."""
    return _iterate_bounded(lang, n, pm.compose_par)


# ---------------------------------------------------------------------------
# subsumption closure

_closure_cache = {}


def _member_closure(v):
    """All SCP pomsets subsumed by ``v`` (same events and communication,
    possibly more execution order)."""
    if v in _closure_cache:
        return _closure_cache[v]
    if v.co:
        out = _closure_by_extension(v)
    else:
        candidates = pm.enum_over_multiset(v.label_multiset(), False)
        out = frozenset(u for u in candidates if pm.subsumes(u, v))
    _closure_cache[v] = out
    return out


def _closure_by_extension(v):
    """Breadth-first closure under single execution-edge additions; SCP
    members are filtered at the end (intermediates may be non-SCP)."""
    seen = {v}
    frontier = [v]
    while frontier:
        nxt = []
        for u in frontier:
            for a in range(u.n):
                for b in range(u.n):
                    if a == b or (a, b) in u.eo:
                        continue
                    if (b, a) in u.eo:  # would be a cycle
                        continue
                    eo = pm._transitive_closure(u.eo | {(a, b)}, range(u.n))
                    if any(x == y for x, y in eo):
                        continue
                    if eo & u.co:
                        continue
                    w = pm._canonical_form(u.n, u.labels, frozenset(eo), u.co)
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
        frontier = nxt
    return frozenset(u for u in seen if pm.is_scp(u))


def subsumption_closure(lang):
    """Downward closure under subsumption, within SCP."""
    for u in lang:
        if not pm.is_scp(u):
            raise PreconditionError("subsumption closure requires SCP members")
    out = set()
    for u in lang:
        out |= _member_closure(u)
    return PomsetLanguage(out, lang.event_bound)


# ---------------------------------------------------------------------------
# grounded-hypothesis closure


def _chain(word):
    out = pm.EMPTY
    for sym in word:
        out = pm.compose_seq(out, pm.primitive(sym))
    return out


def _replace_occurrences(u, word, x):
    """All results of rewriting one context occurrence of the chain ``word``
    inside ``u`` by the pomset ``x``.  Contexts are sequential on either
    side, parallel, or the right operand of a communication."""
    target = _chain(word)
    out = set()
    if u == target:
        out.add(x)
    if u.n == 0:
        return out
    sf = pm.seq_factors(u)
    if len(sf) >= 2:
        for i in range(len(sf)):
            for j in range(i, len(sf)):
                seg = sf[i]
                for f in sf[i + 1 : j + 1]:
                    seg = pm.compose_seq(seg, f)
                if seg == target:
                    new = pm.EMPTY
                    for f in sf[:i]:
                        new = pm.compose_seq(new, f)
                    new = pm.compose_seq(new, x)
                    for f in sf[j + 1 :]:
                        new = pm.compose_seq(new, f)
                    out.add(new)
        for idx, factor in enumerate(sf):
            for repl in _replace_occurrences(factor, word, x):
                new = pm.EMPTY
                for k, f in enumerate(sf):
                    new = pm.compose_seq(new, repl if k == idx else f)
                out.add(new)
        return out
    pf = pm.par_factors(u)
    if len(pf) >= 2:
        for idx, factor in enumerate(pf):
            rest = pm.EMPTY
            for k, f in enumerate(pf):
                if k != idx:
                    rest = pm.compose_par(rest, f)
            if factor == target:
                out.add(pm.compose_par(rest, x))
            for repl in _replace_occurrences(factor, word, x):
                out.add(pm.compose_par(rest, repl))
        return out
    for a_side, b_side in pm.comm_splits(u):
        ua = pm.induced(u, a_side)
        ub = pm.induced(u, b_side)
        # the hole sits in the right operand of a communication context
        for repl in _replace_occurrences(ub, word, x):
            out.add(pm.compose_comm(ua, repl))
    return out


def h_closure_bounded(lang, hypotheses, n):
    """Least fixpoint of grounded-hypothesis rewriting over pomsets with at
    most ``n`` events.

    Every hypothesis must be grounded: its right-hand side a non-empty
    sequence of actions.  Left-hand-side languages are evaluated at the
    same bound.
    """
    from .semantics import denote_bounded  # local import to avoid a cycle

    rules = []
    for hyp in hypotheses:
        word = hyp.grounded_word()
        if word is None:
            raise UnsupportedHypothesisError(
                "hypothesis %s is not grounded" % (hyp,)
            )
        lhs = denote_bounded(hyp.lhs, n)
        rules.append((word, lhs))
    out = {u for u in lang if u.n <= n}
    frontier = list(out)
    while frontier:
        u = frontier.pop()
        for word, lhs in rules:
            for x in lhs:
                for w in _replace_occurrences(u, word, x):
                    if w.n <= n and w not in out:
                        out.add(w)
                        frontier.append(w)
    return PomsetLanguage(out, _merge_bound(lang.event_bound, n))


# ---------------------------------------------------------------------------
# dump format


def dump(lang):
    """JSON array of pomset objects, sorted for reproducible diffs."""
    return json.dumps([pm.to_json(u) for u in lang.sorted()], sort_keys=True)


def load(text):
    return PomsetLanguage(pm.from_json(obj) for obj in json.loads(text))
