"""Step, bounded-pomset, hp- and hhp-(bi)simulation over expression systems.

Step and bounded-pomset relations work by partition refinement over the
transition system (with termination as a distinguishing predicate for the
bisimulations).  The history-preserving relations work over an unfolding
of the system into runs-with-event-identity: every unit step mints fresh
events ordered after all events of earlier steps, configurations are the
order ideals of run posets, and the posetal product carries
label-preserving level-respecting isomorphisms.  Hereditary variants
restrict to downward-closed relations.
"""

from itertools import permutations

from . import expr as ex
from . import pomset as pm
from .comm import active_comm_table
from .errors import UnsupportedInputError
from .lts import Multi, build_lts, steps, terminates


class Relation:
    """Outcome of a (bi)similarity check with a replayable witness."""

    def __init__(self, kind, mode, holds, witness=None, counterexample=None, replayer=None):
        self.kind = kind
        self.mode = mode
        self.holds = holds
        self.witness = witness
        self.counterexample = counterexample
        self._replayer = replayer

    def __bool__(self):
        return self.holds

    def replay(self):
        """Re-check the stored witness against its defining conditions."""
        if not self.holds or self._replayer is None:
            return self.holds is False or self.witness is not None
        return self._replayer(self.witness)

    def __repr__(self):
        return "<%s %s: %s>" % (self.kind, self.mode, self.holds)


# ---------------------------------------------------------------------------
# partition refinement with separation history


def _refinement_history(states, succ, marked):
    """List of block maps, one per refinement round, coarsest first."""
    block = {s: (1 if s in marked else 0) for s in states}
    history = [dict(block)]
    while True:
        sigs = {
            s: (
                block[s],
                tuple(sorted({(lk, block[d]) for lk, d in succ[s]})),
            )
            for s in states
        }
        rank = {v: i for i, v in enumerate(sorted(set(sigs.values())))}
        new = {s: rank[sigs[s]] for s in states}
        if len(set(new.values())) == len(set(block.values())):
            history.append(new)
            return history
        block = new
        history.append(dict(block))


def _separation_round(history, p, q):
    for i, block in enumerate(history):
        if block[p] != block[q]:
            return i
    return None


def _distinguishing_trace(history, succ, p, q):
    round_ = _separation_round(history, p, q)
    if round_ is None or round_ == 0:
        return ()
    for side_p, side_q in ((p, q), (q, p)):
        for lk, p2 in succ[side_p]:
            responses = [q2 for lk2, q2 in succ[side_q] if lk2 == lk]
            if not responses:
                return (lk,)
            if all(
                (r := _separation_round(history, p2, q2)) is not None
                and r < round_
                for q2 in responses
            ):
                q2 = responses[0]
                return (lk,) + _distinguishing_trace(history, succ, p2, q2)
    return ()


def _bisim_by_refinement(kind, rootl, rootr, states, succ, marked, label_text):
    history = _refinement_history(states, succ, marked)
    final = history[-1]
    holds = final[rootl] == final[rootr]
    if holds:
        blocks = {}
        for s in states:
            blocks.setdefault(final[s], []).append(s)
        witness = frozenset(
            (p, q) for group in blocks.values() for p in group for q in group
        )

        def replayer(rel):
            pairs = set(rel)
            for p, q in pairs:
                if (p in marked) != (q in marked):
                    return False
                for lk, p2 in succ[p]:
                    if not any(
                        lk2 == lk and (p2, q2) in pairs for lk2, q2 in succ[q]
                    ):
                        return False
            return (rootl, rootr) in pairs

        return Relation(kind, "bisimulation", True, witness, replayer=replayer)
    trace = _distinguishing_trace(history, succ, rootl, rootr)
    return Relation(
        kind,
        "bisimulation",
        False,
        counterexample=tuple(label_text(lk) for lk in trace),
    )


def _label_key_text(lk):
    if lk[0] == 1:
        return "{%s}" % ",".join(lk[1])
    return str(lk[1])


def _pomset_key_text(lk):
    return repr(lk)


def _tagged_union(lts_l, lts_r):
    states = []
    succ = {}
    marked = set()
    for tag, lts in ((0, lts_l), (1, lts_r)):
        for s in lts.states:
            node = (tag, s)
            states.append(node)
            succ[node] = tuple(
                (lbl.key(), (tag, dst)) for lbl, dst in lts.successors(s)
            )
            if s in lts.terminating:
                marked.add(node)
    return states, succ, marked


def step_bisimilar(x, y, cap=10000, table=None):
    """Step bisimilarity via partition refinement over both systems."""
    table = table or active_comm_table()
    ll, lr = build_lts(x, cap, table), build_lts(y, cap, table)
    states, succ, marked = _tagged_union(ll, lr)
    return _bisim_by_refinement(
        "step", (0, x), (1, y), states, succ, marked, _label_key_text
    )


def _step_pomset(label_key):
    kind = label_key[0]
    if kind == 1:
        out = pm.EMPTY
        for sym in label_key[1]:
            out = pm.compose_par(out, pm.primitive(sym))
        return out
    return pm.primitive(label_key[1])


def _derived_pomset_succ(lts, k):
    """Edges labelled by pomsets of up to k consecutive unit steps."""
    base = {
        s: [(lbl.key(), dst) for lbl, dst in lts.successors(s)] for s in lts.states
    }
    succ = {}
    for s in lts.states:
        found = set()
        frontier = [(pm.EMPTY, s)]
        for _ in range(k):
            nxt = []
            for label, state in frontier:
                for lk, dst in base[state]:
                    composed = pm.compose_seq(label, _step_pomset(lk))
                    entry = (composed, dst)
                    if entry not in found:
                        found.add(entry)
                        nxt.append(entry)
            frontier = nxt
        succ[s] = tuple(sorted(((u.sort_key(), d) for u, d in found),
                               key=lambda e: (e[0], e[1].key())))
    return succ


def pomset_bisimilar_bounded(x, y, k, cap=10000, table=None):
    """Pomset bisimilarity with labels of at most ``k`` consecutive unit
    steps; exact when both systems are acyclic."""
    table = table or active_comm_table()
    ll, lr = build_lts(x, cap, table), build_lts(y, cap, table)
    states = []
    succ = {}
    marked = set()
    for tag, lts in ((0, ll), (1, lr)):
        derived = _derived_pomset_succ(lts, k)
        for s in lts.states:
            node = (tag, s)
            states.append(node)
            succ[node] = tuple((lk, (tag, d)) for lk, d in derived[s])
            if s in lts.terminating:
                marked.add(node)
    return _bisim_by_refinement(
        "pomset", (0, x), (1, y), states, succ, marked, _pomset_key_text
    )


# ---------------------------------------------------------------------------
# simulations over states


def _greatest_simulation(states_l, states_r, succ_l, succ_r):
    alive = {(p, q) for p in states_l for q in states_r}
    changed = True
    while changed:
        changed = False
        for p, q in list(alive):
            ok = True
            for lk, p2 in succ_l[p]:
                if not any(
                    lk2 == lk and (p2, q2) in alive for lk2, q2 in succ_r[q]
                ):
                    ok = False
                    break
            if not ok:
                alive.discard((p, q))
                changed = True
    return alive


def _simulates_states(kind, x, y, succ_builder, cap, table):
    ll, lr = build_lts(x, cap, table), build_lts(y, cap, table)
    succ_l = succ_builder(ll)
    succ_r = succ_builder(lr)
    alive = _greatest_simulation(
        list(ll.states), list(lr.states), succ_l, succ_r
    )
    holds = (x, y) in alive

    def replayer(rel):
        pairs = set(rel)
        for p, q in pairs:
            for lk, p2 in succ_l[p]:
                if not any(lk2 == lk and (p2, q2) in pairs for lk2, q2 in succ_r[q]):
                    return False
        return (x, y) in pairs

    witness = frozenset(alive) if holds else None
    return Relation(kind, "simulation", holds, witness, replayer=replayer)


# ---------------------------------------------------------------------------
# run unfoldings and posetal products


class _Unfolding:
    """Tree of runs of the step semantics with per-step minted events.

    A configuration is ``(run, pending, chosen)``: a sequence of completed
    steps, optionally a started step with the subset of its events already
    present.  Events are ``(step_index, slot)``; the order is the total
    order of step indices (events of one step are pairwise concurrent).
    """

    def __init__(self, root, unroll=None, table=None):
        self.table = table or active_comm_table()
        if unroll is None and (ex.has_star(root) or _has_parstar(root)):
            raise UnsupportedInputError(
                "iterated expressions need an explicit unrolling depth"
            )
        self.root = root
        self.unroll = unroll
        self._edges = {}
        self.configs = []
        self._extensions = {}
        self._state_of = {}
        self._explore()

    def edges(self, state):
        if state not in self._edges:
            out = []
            for lbl, dst in sorted(
                steps(state, self.table), key=lambda p: (p[0].key(), p[1].key())
            ):
                out.append((tuple(lbl.symbols()), lbl.key(), dst))
            self._edges[state] = tuple(out)
        return self._edges[state]

    def _explore(self):
        start = ((), None, frozenset())
        stack = [(start, self.root)]
        seen = {start}
        while stack:
            cfg, state = stack.pop()
            self.configs.append(cfg)
            self._state_of[cfg] = state
            exts = []
            run, pending, chosen = cfg
            if pending is not None:
                syms = pending[0]
                for slot in range(len(syms)):
                    if slot in chosen:
                        continue
                    new_chosen = chosen | {slot}
                    if len(new_chosen) == len(syms):
                        new = (run + (pending,), None, frozenset())
                    else:
                        new = (run, pending, frozenset(new_chosen))
                    exts.append(((len(run), slot), syms[slot], new))
                next_state = state
            else:
                if self.unroll is None or len(run) < self.unroll:
                    for edge in self.edges(state):
                        syms = edge[0]
                        if len(syms) == 1:
                            new = (run + (edge,), None, frozenset())
                            exts.append(((len(run), 0), syms[0], new))
                        else:
                            for slot in range(len(syms)):
                                new = (run, edge, frozenset({slot}))
                                exts.append(((len(run), slot), syms[slot], new))
                next_state = state
            self._extensions[cfg] = tuple(exts)
            for _, _, new in exts:
                if new not in seen:
                    seen.add(new)
                    nrun, npending, _ = new
                    if npending is None and len(nrun) > len(run):
                        nstate = nrun[-1][2]
                    else:
                        nstate = next_state if npending is not None else state
                    stack.append((new, nstate))

    def extensions(self, cfg):
        return self._extensions[cfg]

    def terminating(self, cfg):
        """Whether the configuration is a successfully terminated run: no
        step is pending and the reached state allows termination."""
        if cfg[1] is not None:
            return False
        return terminates(self._state_of[cfg])

    @staticmethod
    def profile(cfg):
        run, pending, chosen = cfg
        blocks = [tuple(sorted(edge[0])) for edge in run]
        if pending is not None:
            blocks.append(tuple(sorted(pending[0][s] for s in chosen)))
        return tuple(blocks)

    @staticmethod
    def block_events(cfg):
        """Per level, the (event, symbol) pairs of the configuration."""
        run, pending, chosen = cfg
        blocks = []
        for i, edge in enumerate(run):
            blocks.append([((i, s), edge[0][s]) for s in range(len(edge[0]))])
        if pending is not None:
            i = len(run)
            blocks.append(sorted(((i, s), pending[0][s]) for s in sorted(chosen)))
        return blocks

    @staticmethod
    def ideals(cfg):
        """Proper order ideals of the configuration, as configurations."""
        run, pending, chosen = cfg
        out = set()
        for i in range(len(run) + 1):
            out.add((run[:i], None, frozenset()))
        for i in range(len(run)):
            width = len(run[i][0])
            for mask in range(1, 1 << width):
                sub = frozenset(s for s in range(width) if mask >> s & 1)
                if len(sub) < width:
                    out.add((run[:i], run[i], sub))
        if pending is not None:
            slots = sorted(chosen)
            for mask in range(1, 1 << len(slots)):
                sub = frozenset(
                    slots[j] for j in range(len(slots)) if mask >> j & 1
                )
                out.add((run, pending, sub))
        out.discard(cfg)
        return out


def _has_parstar(x):
    if isinstance(x, ex.ParStar):
        return True
    return any(_has_parstar(c) for c in x.children())


def _level_isos(blocks1, blocks2):
    """All label-preserving per-level bijections between two block lists."""
    if len(blocks1) != len(blocks2):
        return
    per_level = []
    for b1, b2 in zip(blocks1, blocks2):
        if len(b1) != len(b2):
            return
        if sorted(s for _, s in b1) != sorted(s for _, s in b2):
            return
        options = []
        events2 = list(b2)
        for perm in permutations(range(len(events2))):
            pairs = []
            ok = True
            for (e1, s1), k in zip(b1, perm):
                e2, s2 = events2[k]
                if s1 != s2:
                    ok = False
                    break
                pairs.append((e1, e2))
            if ok:
                options.append(tuple(pairs))
        per_level.append(sorted(set(options)))

    def product(i, acc):
        if i == len(per_level):
            yield tuple(acc)
            return
        for choice in per_level[i]:
            yield from product(i + 1, acc + list(choice))

    yield from product(0, [])


def _posetal_product(unf_l, unf_r):
    """All triples (C1, f, C2); f is stored as a sorted tuple of pairs."""
    by_profile = {}
    for cfg in unf_r.configs:
        by_profile.setdefault(_Unfolding.profile(cfg), []).append(cfg)
    triples = set()
    for c1 in unf_l.configs:
        profile = _Unfolding.profile(c1)
        blocks1 = _Unfolding.block_events(c1)
        for c2 in by_profile.get(profile, ()):
            blocks2 = _Unfolding.block_events(c2)
            for f in _level_isos(blocks1, blocks2):
                triples.add((c1, tuple(sorted(f)), c2))
    return triples


def _restrict_iso(f, events1):
    return tuple(sorted((e1, e2) for e1, e2 in f if e1 in events1))


def _config_events(cfg):
    run, pending, chosen = cfg
    out = set()
    for i, edge in enumerate(run):
        out.update((i, s) for s in range(len(edge[0])))
    if pending is not None:
        out.update((len(run), s) for s in chosen)
    return out


def _hp_like(x, y, hereditary, mode, unroll=None, table=None):
    table = table or active_comm_table()
    unf_l = _Unfolding(x, unroll, table)
    unf_r = _Unfolding(y, unroll, table)
    alive = _posetal_product(unf_l, unf_r)
    root = ((), None, frozenset())
    root_triple = (root, (), root)
    forward_only = mode == "simulation"

    def matching_extensions(cfg_exts, event, sym, f, c_new, left_side):
        """Candidate triples after answering ``event`` on the other side."""
        out = []
        for event2, sym2, new2 in cfg_exts:
            if sym2 != sym:
                continue
            if left_side:
                f2 = tuple(sorted(f + ((event, event2),)))
                out.append((c_new, f2, new2))
            else:
                f2 = tuple(sorted(f + ((event2, event),)))
                out.append((new2, f2, c_new))
        return out

    changed = True
    while changed:
        changed = False
        for triple in list(alive):
            c1, f, c2 = triple
            ok = True
            if not forward_only and unf_l.terminating(c1) != unf_r.terminating(c2):
                ok = False
            for event, sym, new1 in () if not ok else unf_l.extensions(c1):
                cands = matching_extensions(
                    unf_r.extensions(c2), event, sym, f, new1, True
                )
                if not any(c in alive for c in cands):
                    ok = False
                    break
            if ok and not forward_only:
                for event, sym, new2 in unf_r.extensions(c2):
                    cands = matching_extensions(
                        unf_l.extensions(c1), event, sym, f, new2, False
                    )
                    if not any(c in alive for c in cands):
                        ok = False
                        break
            if ok and hereditary:
                for sub in _Unfolding.ideals(c1):
                    events1 = _config_events(sub)
                    f_sub = _restrict_iso(f, events1)
                    image = {e2 for _, e2 in f_sub}
                    sub2 = _restrict_config(c2, image)
                    if sub2 is None or (sub, f_sub, sub2) not in alive:
                        ok = False
                        break
            if not ok:
                alive.discard(triple)
                changed = True
    holds = root_triple in alive
    kind = ("hhp" if hereditary else "hp")
    if holds:
        witness = frozenset(alive)
        return Relation(kind, mode, True, witness)
    trace = _hp_counterexample(unf_l, unf_r, alive, root_triple, forward_only)
    return Relation(kind, mode, False, counterexample=trace)


def _restrict_config(cfg, events):
    """The configuration of ``cfg``'s run holding exactly ``events``, or
    None when the set is not an ideal of the run."""
    run, pending, chosen = cfg
    if not events:
        return ((), None, frozenset())
    top = max(i for i, _ in events)
    # every level below the top must be completely present
    for i in range(top):
        if i >= len(run):
            return None
        width = len(run[i][0])
        if sum(1 for lvl, _ in events if lvl == i) != width:
            return None
    top_slots = frozenset(s for i, s in events if i == top)
    if top < len(run):
        if len(top_slots) == len(run[top][0]):
            return (run[: top + 1], None, frozenset())
        return (run[:top], run[top], top_slots)
    if pending is None or not top_slots <= chosen:
        return None
    return (run, pending, top_slots)


def _hp_counterexample(unf_l, unf_r, alive, root_triple, forward_only):
    seen = set()

    def attack(triple, depth):
        if depth > 40 or triple in seen:
            return ()
        seen.add(triple)
        c1, f, c2 = triple
        sides = [(unf_l, unf_r, c1, c2, True)]
        if not forward_only:
            sides.append((unf_r, unf_l, c2, c1, False))
        for mine, theirs, cm, ct, left in sides:
            for event, sym, new_mine in mine.extensions(cm):
                responses = []
                for event2, sym2, new_theirs in theirs.extensions(ct):
                    if sym2 != sym:
                        continue
                    if left:
                        f2 = tuple(sorted(f + ((event, event2),)))
                        responses.append((new_mine, f2, new_theirs))
                    else:
                        f2 = tuple(sorted(f + ((event2, event),)))
                        responses.append((new_theirs, f2, new_mine))
                if all(r not in alive for r in responses):
                    if not responses:
                        return (sym,)
                    return (sym,) + attack(responses[0], depth + 1)
        return ()

    return attack(root_triple, 0)


def hp_bisimilar(x, y, unroll=None, table=None):
    """History-preserving bisimilarity over run unfoldings."""
    return _hp_like(x, y, False, "bisimulation", unroll, table)


def hhp_bisimilar(x, y, unroll=None, table=None):
    """Hereditary history-preserving bisimilarity: the relation is also
    closed under pointwise restriction to order ideals."""
    return _hp_like(x, y, True, "bisimulation", unroll, table)


def simulates(kind, x, y, k=3, cap=10000, unroll=None, table=None):
    """One-directional transfer only, for each relation kind."""
    table = table or active_comm_table()
    if kind == "step":
        return _simulates_states(
            "step",
            x,
            y,
            lambda lts: {
                s: tuple((lbl.key(), d) for lbl, d in lts.successors(s))
                for s in lts.states
            },
            cap,
            table,
        )
    if kind == "pomset":
        return _simulates_states(
            "pomset",
            x,
            y,
            lambda lts: _derived_pomset_succ(lts, k),
            cap,
            table,
        )
    if kind == "hp":
        return _hp_like(x, y, False, "simulation", unroll, table)
    if kind == "hhp":
        return _hp_like(x, y, True, "simulation", unroll, table)
    raise ValueError("unknown relation kind %r" % kind)
