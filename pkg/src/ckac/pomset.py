"""Finite labelled posets with two order relations and their canonical forms.

Events carry an execution order and a communication relation.  ``Pomset``
values are canonical representatives of isomorphism classes: events are
renumbered 0..n-1 by a deterministic canonical labeling, so structural
equality of ``Pomset`` values coincides with isomorphism of the underlying
posets.  Both relations are stored directed; the execution order is kept
transitively closed.
"""

import json
from functools import lru_cache
from itertools import combinations_with_replacement

from .comm import active_comm_table, is_rho, rho_parts
from .errors import AmbiguityError, InputFormError, StructureError


class LabelledPoset:
    """Raw (non-canonical) labelled poset with communications.

    ``labels`` maps event ids to action symbols; ``eo`` and ``co`` are
    iterables of ordered event pairs.  Event ids may be any sortable
    hashable values; they are forgotten by canonicalization.
    """

    def __init__(self, labels, eo=(), co=()):
        self.labels = dict(labels)
        self.eo = set(map(tuple, eo))
        self.co = set(map(tuple, co))

    def events(self):
        return set(self.labels)


def _transitive_closure(pairs, events):
    adj = {e: set() for e in events}
    for a, b in pairs:
        adj[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in events:
            extra = set()
            for b in adj[a]:
                extra |= adj[b]
            if not extra <= adj[a]:
                adj[a] |= extra
                changed = True
    return {(a, b) for a in events for b in adj[a]}


class Pomset:
    """Canonical isomorphism-class representative.

    Do not call the constructor directly; build values via
    :func:`canonicalize`, :func:`empty`, :func:`primitive` or the
    composition functions.
    """

    __slots__ = ("n", "labels", "eo", "co", "_hash")

    def __init__(self, n, labels, eo, co):
        self.n = n
        self.labels = labels
        self.eo = eo
        self.co = co
        self._hash = hash((n, labels, eo, co))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, Pomset):
            return NotImplemented
        return (self.n, self.labels, self.eo, self.co) == (
            other.n,
            other.labels,
            other.eo,
            other.co,
        )

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.n, self.labels, tuple(sorted(self.eo)), tuple(sorted(self.co)))

    @property
    def is_empty(self):
        return self.n == 0

    def label_multiset(self):
        return tuple(sorted(self.labels))

    def __repr__(self):
        if self.n == 0:
            return "<pomset 1>"
        bits = ",".join(
            "%d:%s" % (i, self.labels[i]) for i in range(self.n)
        )
        e = " e" + str(sorted(self.eo)) if self.eo else ""
        c = " c" + str(sorted(self.co)) if self.co else ""
        return "<pomset %s%s%s>" % (bits, e, c)


EMPTY = Pomset(0, (), frozenset(), frozenset())


def empty():
    return EMPTY


def primitive(sym):
    return Pomset(1, (sym,), frozenset(), frozenset())


def _refine(n, colors, oute, ine, outc, inc):
    while True:
        sigs = [
            (
                colors[i],
                tuple(sorted(colors[j] for j in oute[i])),
                tuple(sorted(colors[j] for j in ine[i])),
                tuple(sorted(colors[j] for j in outc[i])),
                tuple(sorted(colors[j] for j in inc[i])),
            )
            for i in range(n)
        ]
        rank = {s: k for k, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _canonical_form(n, labels, eo, co):
    """Minimal (labels, eo, co) over all colorings reachable by
    individualization-refinement; exact for the small instances used here."""
    oute = [set() for _ in range(n)]
    ine = [set() for _ in range(n)]
    outc = [set() for _ in range(n)]
    inc = [set() for _ in range(n)]
    for a, b in eo:
        oute[a].add(b)
        ine[b].add(a)
    for a, b in co:
        outc[a].add(b)
        inc[b].add(a)
    label_rank = {s: k for k, s in enumerate(sorted(set(labels)))}
    init = [label_rank[labels[i]] for i in range(n)]

    best = [None]

    def leaf(colors):
        pos = colors  # colors[i] == new index of event i when discrete
        new_labels = [None] * n
        for i in range(n):
            new_labels[pos[i]] = labels[i]
        key = (
            tuple(new_labels),
            tuple(sorted((pos[a], pos[b]) for a, b in eo)),
            tuple(sorted((pos[a], pos[b]) for a, b in co)),
        )
        if best[0] is None or key < best[0]:
            best[0] = key

    def search(colors):
        colors = _refine(n, colors, oute, ine, outc, inc)
        classes = {}
        for i, c in enumerate(colors):
            classes.setdefault(c, []).append(i)
        target = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                target = classes[c]
                break
        if target is None:
            leaf(colors)
            return
        for m in target:
            branched = list(colors)
            branched[m] = n  # fresh color, ranked last
            search(branched)

    search(init)
    new_labels, new_eo, new_co = best[0]
    return Pomset(n, new_labels, frozenset(new_eo), frozenset(new_co))


def canonicalize(lp):
    """Canonical representative of a raw labelled poset.

    Validates the structural invariants: the execution order must be
    acyclic (it is transitively closed here), both relations irreflexive,
    and no ordered pair may lie in both relations.
    """
    events = sorted(lp.events(), key=lambda e: (e.__class__.__name__, str(e)))
    index = {e: i for i, e in enumerate(events)}
    n = len(events)
    labels = tuple(lp.labels[e] for e in events)
    for a, b in set(lp.eo) | set(lp.co):
        if a not in index or b not in index:
            raise StructureError("order pair (%r, %r) outside the carrier" % (a, b))
    eo = _transitive_closure({(index[a], index[b]) for a, b in lp.eo}, range(n))
    co = {(index[a], index[b]) for a, b in lp.co}
    for a, b in eo:
        if a == b:
            raise StructureError("cycle in the execution order")
    for a, b in co:
        if a == b:
            raise StructureError("reflexive communication pair")
    if eo & co:
        raise StructureError("execution and communication orders overlap")
    return _canonical_form(n, labels, frozenset(eo), frozenset(co))


def isomorphic(u, v):
    """Label-preserving order-isomorphism of raw labelled posets."""
    if isinstance(u, LabelledPoset):
        u = canonicalize(u)
    if isinstance(v, LabelledPoset):
        v = canonicalize(v)
    return u == v


# ---------------------------------------------------------------------------
# compositions


def _shift(p, k):
    return (
        [(a + k, b + k) for a, b in p.eo],
        [(a + k, b + k) for a, b in p.co],
    )


def _combine(u, v, cross_eo=False, cross_co=False):
    n = u.n + v.n
    labels = u.labels + v.labels
    eo_v, co_v = _shift(v, u.n)
    eo = set(u.eo) | set(eo_v)
    co = set(u.co) | set(co_v)
    if cross_eo:
        eo |= {(a, b + u.n) for a in range(u.n) for b in range(v.n)}
    if cross_co:
        co |= {(a, b + u.n) for a in range(u.n) for b in range(v.n)}
    return _canonical_form(n, labels, frozenset(eo), frozenset(co))


def compose_seq(u, v):
    """Sequential composition: every event of ``u`` precedes every event of
    ``v`` in the execution order."""
    if u.is_empty:
        return v
    if v.is_empty:
        return u
    return _combine(u, v, cross_eo=True)


def compose_par(u, v):
    """Parallel composition: disjoint union, no cross edges."""
    if u.is_empty:
        return v
    if v.is_empty:
        return u
    return _combine(u, v)


def compose_comm(u, v):
    """Communication composition: every event of ``u`` communicates with
    every event of ``v``."""
    if u.is_empty:
        return v
    if v.is_empty:
        return u
    return _combine(u, v, cross_co=True)


def compose_conc(u, v):
    """Concurrent composition: the set of both resolutions (parallel and
    communicating); a single-element set when they coincide."""
    return {compose_par(u, v), compose_comm(u, v)}


# ---------------------------------------------------------------------------
# factorization


def induced(p, events):
    """Sub-pomset induced by a subset of event indices (canonicalized)."""
    events = sorted(events)
    pos = {e: i for i, e in enumerate(events)}
    labels = tuple(p.labels[e] for e in events)
    eo = frozenset((pos[a], pos[b]) for a, b in p.eo if a in pos and b in pos)
    co = frozenset((pos[a], pos[b]) for a, b in p.co if a in pos and b in pos)
    return _canonical_form(len(events), labels, eo, co)


def _first_seq_cut(p):
    """Smallest nonempty proper prefix A with A x rest fully exec-ordered and
    no communication across the cut, or None."""
    events = set(range(p.n))
    preds = {e: set() for e in events}
    for a, b in p.eo:
        preds[b].add(a)
    a_side = {e for e in events if not preds[e]}
    if not a_side:
        return None
    while True:
        if a_side == events:
            return None
        rest = events - a_side
        grow = set()
        for b in rest:
            for a in a_side:
                if (a, b) not in p.eo or (a, b) in p.co or (b, a) in p.co:
                    grow.add(b)
                    break
            else:
                if any((b, a) in p.co or (b, a) in p.eo for a in a_side):
                    grow.add(b)
        if not grow:
            return frozenset(a_side)
        a_side |= grow


def seq_factors(p):
    """Maximal sequential factorization (list of non-sequential factors).

    Defined for every pomset; the public :func:`seq_factorize` adds the
    series-communication-parallel precondition.
    """
    if p.is_empty:
        return []
    out = []
    rest = p
    while True:
        cut = _first_seq_cut(rest)
        if cut is None:
            out.append(rest)
            return out
        out.append(induced(rest, cut))
        rest = induced(rest, set(range(rest.n)) - cut)


def par_factors(p):
    """Maximal parallel factorization (multiset, as a sorted list)."""
    if p.is_empty:
        return []
    parent = list(range(p.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    for a, b in list(p.eo) + list(p.co):
        union(a, b)
    comps = {}
    for e in range(p.n):
        comps.setdefault(find(e), set()).add(e)
    return sorted(induced(p, c) for c in comps.values())


def seq_factorize(p):
    if not is_scp(p):
        raise StructureError("sequential factorization requires an SCP pomset")
    return seq_factors(p)


def par_factorize(p):
    if not is_scp(p):
        raise StructureError("parallel factorization requires an SCP pomset")
    return par_factors(p)


def comm_splits(p):
    """All bipartitions (A, B) of the events realizing ``A | B``: the cross
    pairs A x B are exactly the communication edges across the cut and no
    execution edge crosses it."""
    n = p.n
    if n < 2:
        return []
    # events that can never be separated share a block
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def separable(x, y):
        fwd = (x, y) in p.co and (y, x) not in p.co
        bwd = (y, x) in p.co and (x, y) not in p.co
        if not (fwd or bwd):
            return False
        return (x, y) not in p.eo and (y, x) not in p.eo

    for x in range(n):
        for y in range(x + 1, n):
            if not separable(x, y):
                parent[find(x)] = find(y)
    blocks = {}
    for e in range(n):
        blocks.setdefault(find(e), set()).add(e)
    blocks = list(blocks.values())
    if len(blocks) < 2 or len(blocks) > 20:
        return []
    out = []
    for mask in range(0, 1 << (len(blocks) - 1)):
        a_side = set()
        for i in range(len(blocks) - 1):
            if mask >> i & 1:
                a_side |= blocks[i + 1]
        a_side |= blocks[0]
        b_side = set(range(n)) - a_side
        if not b_side:
            continue
        ok = all(
            (a, b) in p.co and (b, a) not in p.co
            and (a, b) not in p.eo and (b, a) not in p.eo
            for a in a_side
            for b in b_side
        )
        if ok:
            out.append((frozenset(a_side), frozenset(b_side)))
        else:
            swapped = all(
                (b, a) in p.co and (a, b) not in p.co
                and (a, b) not in p.eo and (b, a) not in p.eo
                for a in a_side
                for b in b_side
            )
            if swapped:
                out.append((frozenset(b_side), frozenset(a_side)))
    return out


_scp_cache = {}


def is_scp(p):
    """Whether the pomset is derivable from primitives by the sequential,
    parallel, communication and concurrent compositions."""
    if p in _scp_cache:
        return _scp_cache[p]
    if p.n <= 1:
        result = True
    else:
        sf = seq_factors(p)
        if len(sf) > 1:
            result = all(is_scp(f) for f in sf)
        else:
            pf = par_factors(p)
            if len(pf) > 1:
                result = all(is_scp(f) for f in pf)
            else:
                result = any(
                    is_scp(induced(p, a)) and is_scp(induced(p, b))
                    for a, b in comm_splits(p)
                )
    _scp_cache[p] = result
    return result


def is_n_free(p):
    """No four distinct events carry exactly the relation pattern
    u0<=u1, u2<=u3, u0<=u3 (over the union of both orders)."""
    rel = p.eo | p.co
    ev = range(p.n)
    for u0 in ev:
        for u1 in ev:
            for u2 in ev:
                for u3 in ev:
                    q = (u0, u1, u2, u3)
                    if len(set(q)) != 4:
                        continue
                    present = {
                        (x, y) for x in q for y in q if x != y and (x, y) in rel
                    }
                    if present == {(u0, u1), (u2, u3), (u0, u3)}:
                        return False
    return True


# ---------------------------------------------------------------------------
# subsumption


def subsumes(u, v):
    """``u`` is subsumed by ``v``: a label-preserving bijection from v's
    events to u's events carries v's execution order into u's and matches
    the communication relation exactly (only execution order may grow)."""
    if u.n != v.n or u.label_multiset() != v.label_multiset():
        return False
    if len(u.co) != len(v.co) or len(u.eo) < len(v.eo):
        return False
    by_label = {}
    for i in range(u.n):
        by_label.setdefault(u.labels[i], []).append(i)

    order = sorted(range(v.n), key=lambda e: v.labels[e])
    used = [False] * u.n

    def extend(k, mapping):
        if k == v.n:
            return True
        x = order[k]
        for cand in by_label[v.labels[x]]:
            if used[cand]:
                continue
            ok = True
            for y, my in mapping.items():
                if (x, y) in v.eo and (cand, my) not in u.eo:
                    ok = False
                elif (y, x) in v.eo and (my, cand) not in u.eo:
                    ok = False
                elif ((x, y) in v.co) != ((cand, my) in u.co):
                    ok = False
                elif ((y, x) in v.co) != ((my, cand) in u.co):
                    ok = False
                if not ok:
                    break
            if not ok:
                continue
            used[cand] = True
            mapping[x] = cand
            if extend(k + 1, mapping):
                return True
            used[cand] = False
            del mapping[x]
        return False

    return extend(0, {})


# ---------------------------------------------------------------------------
# synchronous translation, width, depth


def sync_translate(p, table=None):
    """Merge each communication pair into a single rho-labelled event.

    Every event may take part in at most one communication edge and the
    table must define the pair's merge; the result has an empty
    communication relation.
    """
    table = table or active_comm_table()
    degree = {}
    for a, b in p.co:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    if any(d > 1 for d in degree.values()):
        raise AmbiguityError("an event takes part in several communication edges")
    rep = {e: e for e in range(p.n)}
    labels = dict(enumerate(p.labels))
    for a, b in p.co:
        sym = table.rho(p.labels[a], p.labels[b])
        rep[b] = a
        labels[a] = sym
        del labels[b]
    eo = set()
    for a, b in p.eo:
        x, y = rep[a], rep[b]
        if x == y:
            raise StructureError(
                "communication pair also related by the execution order"
            )
        eo.add((x, y))
    return canonicalize(LabelledPoset(labels, eo))


def _max_antichain(n, rel):
    if n == 0:
        return 0
    neighbours = [0] * n
    for a, b in rel:
        neighbours[a] |= 1 << b
        neighbours[b] |= 1 << a
    best = 0

    def grow(start, chosen, size):
        nonlocal best
        if size + (n - start) <= best:
            return
        if start == n:
            best = max(best, size)
            return
        if not (chosen & neighbours[start]):
            grow(start + 1, chosen | (1 << start), size + 1)
        grow(start + 1, chosen, size)

    grow(0, 0, 0)
    return best


def width(p):
    """Larger of the maximum antichains of the two order relations."""
    return max(_max_antichain(p.n, p.eo), _max_antichain(p.n, p.co))


def depth(p):
    """Nesting depth of the recursive factorization (SCP pomsets only)."""
    if not is_scp(p):
        raise StructureError("depth requires an SCP pomset")
    return _depth(p)


def _depth(p):
    if p.n <= 1:
        return 0
    sf = seq_factors(p)
    if len(sf) > 1:
        return 1 + max(_depth(f) for f in sf)
    pf = par_factors(p)
    if len(pf) > 1:
        return 1 + max(_depth(f) for f in pf)
    for a, b in comm_splits(p):
        ua, ub = induced(p, a), induced(p, b)
        if is_scp(ua) and is_scp(ub):
            return 1 + max(_depth(ua), _depth(ub))
    raise StructureError("depth requires an SCP pomset")


# ---------------------------------------------------------------------------
# JSON form


def to_json(p):
    return {
        "nodes": [{"id": i, "label": p.labels[i]} for i in range(p.n)],
        "eedges": sorted([a, b] for a, b in p.eo),
        "cedges": sorted([a, b] for a, b in p.co),
    }


def from_json(obj):
    try:
        labels = {node["id"]: node["label"] for node in obj["nodes"]}
        eo = [tuple(e) for e in obj.get("eedges", [])]
        co = [tuple(e) for e in obj.get("cedges", [])]
    except (KeyError, TypeError) as exc:
        raise InputFormError("malformed pomset object: %s" % exc) from None
    for sym in labels.values():
        if is_rho(sym):
            rho_parts(sym)  # validates the syntax
    return canonicalize(LabelledPoset(labels, eo, co))


def dumps(p):
    return json.dumps(to_json(p), sort_keys=True)


def loads(text):
    return from_json(json.loads(text))


# ---------------------------------------------------------------------------
# enumeration (oracles and bounded automaton languages)


@lru_cache(maxsize=None)
def enum_over_multiset(labels, with_comm):
    """All SCP pomsets whose label multiset is exactly ``labels`` (a sorted
    tuple); communication splits are used only when ``with_comm``."""
    if len(labels) == 0:
        return frozenset({EMPTY})
    if len(labels) == 1:
        return frozenset({primitive(labels[0])})
    out = set()
    seen_splits = set()
    k = len(labels)
    for mask in range(1, (1 << k) - 1):
        left = tuple(labels[i] for i in range(k) if mask >> i & 1)
        right = tuple(labels[i] for i in range(k) if not mask >> i & 1)
        if (left, right) in seen_splits:
            continue
        seen_splits.add((left, right))
        for u in enum_over_multiset(left, with_comm):
            for v in enum_over_multiset(right, with_comm):
                out.add(compose_seq(u, v))
                out.add(compose_par(u, v))
                if with_comm:
                    out.add(compose_comm(u, v))
    return frozenset(out)


@lru_cache(maxsize=None)
def enum_sp(alphabet, n):
    """All series-parallel (communication-free) pomsets with at most ``n``
    events over ``alphabet`` (a sorted tuple of symbols)."""
    out = {EMPTY}
    for size in range(1, n + 1):
        for ms in combinations_with_replacement(sorted(alphabet), size):
            out |= enum_over_multiset(ms, False)
    return frozenset(out)
