"""Small-step operational semantics and finite transition systems.

``steps`` yields exactly the conclusions derivable by one rule of the
transition-system specification: alternative, sequence and (parallel)
star propagate any label, while the concurrency operators pair single
base-action steps of both operands into a multiset step or, when the
table defines their merge, a communication step.  There are no rules for
``0``, and the concurrency operators cannot move when only one side can.

Targets are built with the raw constructors, exactly as the rules print
them (so ``a* --a--> 1.a*``); states are expression trees with no
quotienting by axioms.
"""

import json

from . import expr as ex
from .comm import active_comm_table
from .errors import CapExceededError


class StepLabel:
    __slots__ = ()

    def __eq__(self, other):
        if not isinstance(other, StepLabel):
            return NotImplemented
        return self.key() == other.key()

    def __lt__(self, other):
        return self.key() < other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return self.text()


class Single(StepLabel):
    __slots__ = ("sym",)

    def __init__(self, sym):
        self.sym = sym

    def key(self):
        return (0, self.sym)

    def text(self):
        return self.sym

    def symbols(self):
        return (self.sym,)


class Multi(StepLabel):
    """Multiset step of two or more pairwise concurrent actions."""

    __slots__ = ("syms",)

    def __init__(self, syms):
        syms = tuple(sorted(syms))
        if len(syms) < 2:
            raise ValueError("a multiset step needs at least two actions")
        self.syms = syms

    def key(self):
        return (1, self.syms)

    def text(self):
        return "{%s}" % ",".join(self.syms)

    def symbols(self):
        return self.syms


class Sync(StepLabel):
    """Communication step carrying the merged action."""

    __slots__ = ("sym",)

    def __init__(self, sym):
        self.sym = sym

    def key(self):
        return (2, self.sym)

    def text(self):
        return self.sym

    def symbols(self):
        return (self.sym,)


def terminates(x, strict_comm=True):
    """The successful-termination predicate; coincides with nullability."""
    return ex.nullable(x, strict_comm)


def _single_base_steps(pairs):
    for label, target in pairs:
        if isinstance(label, Single):
            yield label.sym, target


def steps(x, table=None):
    """The set of (label, successor) pairs derivable for ``x``."""
    table = table or active_comm_table()
    if isinstance(x, (ex.Zero, ex.One)):
        return frozenset()
    if isinstance(x, ex.Act):
        return frozenset({(Single(x.name), ex.ONE)})
    if isinstance(x, ex.CommAct):
        return frozenset({(Sync(x.sym()), ex.ONE)})
    if isinstance(x, ex.Alt):
        return steps(x.left, table) | steps(x.right, table)
    if isinstance(x, ex.Seq):
        out = {(lbl, ex.Seq(t, x.right)) for lbl, t in steps(x.left, table)}
        if terminates(x.left):
            out |= steps(x.right, table)
        return frozenset(out)
    if isinstance(x, ex.Star):
        return frozenset(
            (lbl, ex.Seq(t, x)) for lbl, t in steps(x.arg, table)
        )
    if isinstance(x, ex.ParStar):
        # as printed, the remainder iterates the body sequentially
        return frozenset(
            (lbl, ex.Par(t, ex.Star(x.arg))) for lbl, t in steps(x.arg, table)
        )
    if isinstance(x, (ex.Par, ex.Merge, ex.Conc, ex.LMerge)):
        left = list(_single_base_steps(steps(x.left, table)))
        right = list(_single_base_steps(steps(x.right, table)))
        out = set()
        for a, t1 in left:
            for b, t2 in right:
                target = ex.Conc(t1, t2)
                if isinstance(x, (ex.Par, ex.Conc)):
                    out.add((Multi((a, b)), target))
                if isinstance(x, ex.LMerge) and a <= b:
                    out.add((Multi((a, b)), target))
                if isinstance(x, (ex.Merge, ex.Conc)) and table.defined(a, b):
                    out.add((Sync(table.rho(a, b)), target))
        return frozenset(out)
    raise TypeError("not an expression: %r" % (x,))


class Lts:
    """Finite labelled transition system over expression states."""

    __slots__ = ("root", "states", "transitions", "terminating")

    def __init__(self, root, states, transitions, terminating):
        self.root = root
        self.states = frozenset(states)
        self.transitions = frozenset(transitions)
        self.terminating = frozenset(terminating)

    def successors(self, state):
        return sorted(
            ((lbl, dst) for src, lbl, dst in self.transitions if src == state),
            key=lambda p: (p[0].key(), p[1].key()),
        )

    def __repr__(self):
        return "<lts %d states, %d transitions>" % (
            len(self.states),
            len(self.transitions),
        )


def build_lts(x, cap=10000, table=None):
    """Breadth-first closure of ``steps`` from ``x``.

    Raises when the state count exceeds ``cap``; the result is never a
    truncated system.
    """
    table = table or active_comm_table()
    seen = {x}
    frontier = [x]
    transitions = set()
    while frontier:
        frontier.sort(key=lambda e: e.key())
        nxt = []
        for state in frontier:
            for lbl, target in steps(state, table):
                transitions.add((state, lbl, target))
                if target not in seen:
                    seen.add(target)
                    if len(seen) > cap:
                        raise CapExceededError(
                            "transition system exceeds the state cap", len(seen)
                        )
                    nxt.append(target)
        frontier = nxt
    terminating = {s for s in seen if terminates(s)}
    return Lts(x, seen, transitions, terminating)


# ---------------------------------------------------------------------------
# export


def _state_names(lts):
    ordered = sorted(lts.states, key=lambda e: e.key())
    return {s: "s%d" % i for i, s in enumerate(ordered)}, ordered


def to_dot(lts):
    names, ordered = _state_names(lts)
    lines = ["digraph lts {", '  rankdir="LR";']
    for s in ordered:
        shape = "doublecircle" if s in lts.terminating else "circle"
        lines.append(
            '  %s [label="%s", shape=%s];' % (names[s], ex.to_text(s), shape)
        )
    lines.append('  init [shape=point];')
    lines.append("  init -> %s;" % names[lts.root])
    for src, lbl, dst in sorted(
        lts.transitions, key=lambda t: (t[0].key(), t[1].key(), t[2].key())
    ):
        lines.append(
            '  %s -> %s [label="%s"];' % (names[src], names[dst], lbl.text())
        )
    lines.append("}")
    return "\n".join(lines)


def to_json(lts):
    names, ordered = _state_names(lts)
    return json.dumps(
        {
            "root": names[lts.root],
            "states": [
                {
                    "id": names[s],
                    "expr": ex.to_text(s),
                    "terminating": s in lts.terminating,
                }
                for s in ordered
            ],
            "transitions": [
                {"from": names[src], "label": lbl.text(), "to": names[dst]}
                for src, lbl, dst in sorted(
                    lts.transitions,
                    key=lambda t: (t[0].key(), t[1].key(), t[2].key()),
                )
            ],
        },
        sort_keys=True,
    )
