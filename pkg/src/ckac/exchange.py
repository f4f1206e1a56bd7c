"""Exchange-law hypotheses, splitting relations, and closure computation.

The closure of an expression denotes the subsumption-closed language: the
set of pomsets obtained from members by adding execution order (never
communication) while staying series-communication-parallel.  Sequential
structure passes through; concurrent compositions are closed through a
linear system over pairs of remainders whose transitions carry preclosed
prime pieces, with the communication variant contributing the whole
communication block at once.
"""

from . import expr as ex
from .errors import UnsupportedOperatorError
from .automata import LinearSystem, _lpar, solve_linear_system
from .semantics import denote_bounded


class Hypothesis:
    """An inequation ``lhs <= rhs`` between expressions."""

    __slots__ = ("lhs", "rhs")

    def __init__(self, lhs, rhs):
        self.lhs = lhs
        self.rhs = rhs

    def grounded_word(self):
        """The right-hand side as a nonempty action sequence, or None."""
        syms = []
        stack = [self.rhs]
        while stack:
            e = stack.pop()
            if isinstance(e, ex.Seq):
                stack.append(e.right)
                stack.append(e.left)
            elif isinstance(e, (ex.Act, ex.CommAct)):
                syms.append(e.sym())
            else:
                return None
        # the stack pops left-first, so restore left-to-right order
        return tuple(syms) if syms else None

    def __eq__(self, other):
        if not isinstance(other, Hypothesis):
            return NotImplemented
        return (self.lhs, self.rhs) == (other.lhs, other.rhs)

    def __hash__(self):
        return hash((self.lhs, self.rhs))

    def __repr__(self):
        return "%s <= %s" % (ex.to_text(self.lhs), ex.to_text(self.rhs))


def parse_hypotheses(text, table=None):
    """Parse a hypothesis file body: one ``lhs <= rhs`` per line; a line
    ``exchs`` selects the built-in exchange laws.  Returns (hypotheses,
    exchange_laws_selected)."""
    hyps = []
    exchs = False
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "exchs":
            exchs = True
            continue
        if "<=" not in line:
            raise ValueError("line %d: expected 'lhs <= rhs'" % lineno)
        lhs, rhs = line.split("<=", 1)
        hyps.append(Hypothesis(ex.parse(lhs, table), ex.parse(rhs, table)))
    return hyps, exchs


class SplitPair:
    """A pair produced by the parallel or sequential splitting relation."""

    __slots__ = ("left", "right", "relation", "source")

    def __init__(self, left, right, relation, source):
        self.left = left
        self.right = right
        self.relation = relation
        self.source = source

    def __eq__(self, other):
        if not isinstance(other, SplitPair):
            return NotImplemented
        return (self.left, self.right, self.relation, self.source) == (
            other.left,
            other.right,
            other.relation,
            other.source,
        )

    def __hash__(self):
        return hash((self.left, self.right, self.relation, self.source))

    def __repr__(self):
        op = "triangle" if self.relation == "par" else "nabla"
        return "%s %s[%s] %s" % (
            ex.to_text(self.left),
            op,
            ex.to_text(self.source),
            ex.to_text(self.right),
        )


# A communication block relates every event of one side to every event of
# the other, so no subsumption-closed member can split one sequentially or
# in parallel: merges are atomic for both splitting relations (splitting
# them would also contradict the axioms that make ``x | 1`` empty).
# Likewise, once a concurrent composition is split, the separated parts
# can no longer communicate with each other: split residues recombine in
# parallel.
_SPLIT_OPS = (ex.Conc, ex.Par, ex.LMerge)


def _recombine(x):
    return ex.LMerge if isinstance(x, ex.LMerge) else _lpar


def _par_pairs(x, memo):
    if x in memo:
        return memo[x]
    memo[x] = frozenset()  # guards self-reference; overwritten below
    out = set()
    if isinstance(x, _SPLIT_OPS):
        op = _recombine(x)
        out.add((x.left, x.right))
        lefts = _par_pairs(x.left, memo)
        rights = _par_pairs(x.right, memo)
        for l1, r1 in lefts:
            for l2, r2 in rights:
                out.add((op(l1, l2), op(r1, r2)))
        for l1, r1 in lefts:
            out.add((l1, op(r1, x.right)))
        for l2, r2 in rights:
            out.add((op(x.left, l2), r2))
        if not isinstance(x, ex.LMerge):
            # the splitting pairs are unordered for the commutative operators
            out |= {(r, l) for l, r in out}
    elif isinstance(x, ex.Alt):
        out |= _par_pairs(x.left, memo)
        out |= _par_pairs(x.right, memo)
    elif isinstance(x, ex.Star):
        out |= _par_pairs(x.arg, memo)
    elif isinstance(x, ex.Seq):
        if ex.nullable(x.right):
            out |= _par_pairs(x.left, memo)
        if ex.nullable(x.left):
            out |= _par_pairs(x.right, memo)
    memo[x] = frozenset(out)
    return memo[x]


def par_split(x):
    """The parallel splitting relation at ``x``."""
    return frozenset(
        SplitPair(l, r, "par", x) for l, r in _par_pairs(x, {})
    )


def _seq_pairs(x, memo):
    """Pairs (first, rest) with first.rest below x in the closed order.

    Besides the structural rules, every expression has the two trivial
    pairs (x, 1) and (1, x): the former consumes the whole behaviour as
    one piece (this is how a communication block is taken at once), the
    latter lets the expression stand still while another parallel
    component contributes the next piece.  Merges are sequentially atomic
    (their members are single primes), and the residues of a split
    concurrent composition recombine in parallel.
    """
    if x in memo:
        return memo[x]
    out = set()
    if not isinstance(x, ex.Zero):
        out.add((ex.ONE, x))
    if isinstance(x, (ex.One, ex.Act, ex.CommAct, ex.Merge, ex.Conc)):
        out.add((x, ex.ONE))
    if isinstance(x, ex.Alt):
        out |= _seq_pairs(x.left, memo)
        out |= _seq_pairs(x.right, memo)
    elif isinstance(x, ex.Seq):
        for l, r in _seq_pairs(x.left, memo):
            out.add((l, ex.mkseq(r, x.right)))
        for l, r in _seq_pairs(x.right, memo):
            out.add((ex.mkseq(x.left, l), r))
    elif isinstance(x, ex.Star):
        out.add((ex.ONE, ex.ONE))
        for l, r in _seq_pairs(x.arg, memo):
            out.add((ex.mkseq(x, l), ex.mkseq(r, x)))
    elif isinstance(x, _SPLIT_OPS):
        rop = _recombine(x)
        if isinstance(x, (ex.Conc, ex.Par)):
            fop = _lpar
        else:
            fop = type(x)
        for l1, r1 in _seq_pairs(x.left, memo):
            for l2, r2 in _seq_pairs(x.right, memo):
                out.add((fop(l1, l2), rop(r1, r2)))
    memo[x] = frozenset(out)
    return memo[x]


def seq_split(x):
    """The sequential splitting relation at ``x``."""
    return frozenset(SplitPair(l, r, "seq", x) for l, r in _seq_pairs(x, {}))


def remainders(x):
    """The right-hand remainders of ``x`` under sequential splitting."""
    memo = {}
    seen = {x}
    frontier = [x]
    while frontier:
        e = frontier.pop()
        for _, r in _seq_pairs(e, memo):
            if r not in seen:
                seen.add(r)
                frontier.append(r)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# closure


def _check_closable(x):
    if isinstance(x, ex.ParStar):
        raise UnsupportedOperatorError(
            "closure is defined for star-communication rational expressions "
            "without the parallel star"
        )
    if isinstance(x, ex.LMerge):
        raise UnsupportedOperatorError(
            "left parallelism has no language semantics to close"
        )
    for c in x.children():
        _check_closable(c)


def _pre_par(z0, h0, memo):
    """Primes of the parallel closure of ``z0 || h0``: the parallel pairing
    of recursively closed splitting components."""
    terms = []
    for l, r in _par_pairs(ex.Par(z0, h0), {}):
        terms.append(_lpar(_closure(l, memo), _closure(r, memo)))
    return ex.sum_of(terms)


def _closure_par(x, y, memo):
    """Least solution of the remainder system for ``x || y``."""
    rx = sorted(remainders(x))
    ry = sorted(remainders(y))
    states = [(z, h) for z in rx for h in ry]
    matrix = {}
    vector = {}
    seq_memo = {}
    for z, h in states:
        if ex.nullable(z) and ex.nullable(h):
            vector[(z, h)] = ex.ONE
        z_pairs = _seq_pairs(z, seq_memo)
        h_pairs = _seq_pairs(h, seq_memo)
        for z0, z1 in z_pairs:
            for h0, h1 in h_pairs:
                key = ((z, h), (z1, h1))
                label = _pre_par(z0, h0, memo)
                if isinstance(label, ex.Zero):
                    continue
                matrix[key] = ex.sum_of([matrix.get(key, ex.ZERO), label])
    solution = solve_linear_system(LinearSystem(states, matrix, vector))
    return solution[(x, y)]


def _closure(x, memo):
    if x in memo:
        return memo[x]
    if isinstance(x, (ex.Zero, ex.One, ex.Act, ex.CommAct)):
        out = x
    elif isinstance(x, ex.Alt):
        out = ex.sum_of([_closure(x.left, memo), _closure(x.right, memo)])
    elif isinstance(x, ex.Seq):
        out = ex.mkseq(_closure(x.left, memo), _closure(x.right, memo))
    elif isinstance(x, ex.Star):
        out = ex.Star(_closure(x.arg, memo))
    elif isinstance(x, ex.Par):
        out = _closure_par(x.left, x.right, memo)
    elif isinstance(x, ex.Merge):
        out = ex.Merge(_closure(x.left, memo), _closure(x.right, memo))
    elif isinstance(x, ex.Conc):
        out = ex.sum_of(
            [
                _closure_par(x.left, x.right, memo),
                ex.Merge(_closure(x.left, memo), _closure(x.right, memo)),
            ]
        )
    else:
        raise UnsupportedOperatorError("cannot close %r" % (x,))
    memo[x] = out
    return out


def preclosure(x, y):
    """Sum over parallel splittings of ``x & y`` with closed components.

    The top-level pair keeps the concurrent composition (it carries the
    whole communication block); nested splittings are committed to the
    parallel resolution.
    """
    memo = {}
    terms = []
    for l, r in _par_pairs(ex.Conc(x, y), {}):
        if (l, r) == (x, y):
            terms.append(ex.Conc(_closure(l, memo), _closure(r, memo)))
        else:
            terms.append(_lpar(_closure(l, memo), _closure(r, memo)))
    return ex.sum_of(terms)


def closure_conc(x, y):
    """Closure of ``x & y``: the parallel remainder system plus the whole
    communication block."""
    memo = {}
    return ex.sum_of(
        [
            _closure_par(x, y, memo),
            ex.Merge(_closure(x, memo), _closure(y, memo)),
        ]
    )


_closure_cache = {}


def closure(x):
    """An expression denoting the subsumption closure of the language."""
    _check_closable(x)
    return _closure(x, _closure_cache)


def equiv_modulo_exchs_bounded(x, y, n):
    """Language equality of the closures, truncated at ``n`` events."""
    return denote_bounded(closure(x), n) == denote_bounded(closure(y), n)
