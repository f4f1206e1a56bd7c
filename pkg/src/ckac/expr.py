"""Abstract syntax of series-communication(-parallel) rational expressions.

Constructors: 0, 1, actions, communication actions, alternative ``+``,
sequence ``.``, star ``*``, parallel ``||``, parallel star ``^``,
communication merge ``|``, concurrent composition ``&`` and left
parallelism ``%``.  Values are immutable and totally ordered.

The ``mk*`` helpers apply only unit and idempotence simplifications that
are sound for every equivalence handled by this package; the parser keeps
the written shape of its input.
"""

import re

from .comm import active_comm_table
from .errors import ParseError


class Expr:
    __slots__ = ("_key", "_hash")

    def _compute_key(self):
        raise NotImplementedError

    def key(self):
        # cached: parent keys share child key tuples, so comparisons
        # short-circuit on identity
        try:
            return self._key
        except AttributeError:
            self._key = k = self._compute_key()
            return k

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self.key() == other.key()

    def __lt__(self, other):
        return self.key() < other.key()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            self._hash = h = hash(self.key())
            return h

    def size(self):
        return 1

    def children(self):
        return ()

    def __repr__(self):
        return to_text(self)


class Zero(Expr):
    __slots__ = ()

    def _compute_key(self):
        return (0,)


class One(Expr):
    __slots__ = ()

    def _compute_key(self):
        return (1,)


ZERO = Zero()
ONE = One()


class Act(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def _compute_key(self):
        return (2, self.name)

    def sym(self):
        return self.name


class CommAct(Expr):
    """Atomic communication action rho(a,b); the pair is stored in
    canonical order and must be defined by the given (or active) table."""

    __slots__ = ("a", "b")

    def __init__(self, a, b, table=None):
        table = table or active_comm_table()
        table.rho(a, b)  # raises CommTableError when undefined
        if b < a:
            a, b = b, a
        self.a = a
        self.b = b

    def _compute_key(self):
        return (3, self.a, self.b)

    def sym(self):
        return "rho(%s,%s)" % (self.a, self.b)


class _Unary(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg

    def _compute_key(self):
        return (self._rank, self.arg.key())

    def size(self):
        return 1 + self.arg.size()

    def children(self):
        return (self.arg,)


class _Binary(Expr):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def _compute_key(self):
        return (self._rank, self.left.key(), self.right.key())

    def size(self):
        return 1 + self.left.size() + self.right.size()

    def children(self):
        return (self.left, self.right)


class Star(_Unary):
    __slots__ = ()
    _rank = 4


class ParStar(_Unary):
    __slots__ = ()
    _rank = 5


class Alt(_Binary):
    __slots__ = ()
    _rank = 6


class Seq(_Binary):
    __slots__ = ()
    _rank = 7


class Par(_Binary):
    __slots__ = ()
    _rank = 8


class Merge(_Binary):
    """Communication merge ``x | y``."""

    __slots__ = ()
    _rank = 9


class Conc(_Binary):
    """Concurrent composition ``x & y``."""

    __slots__ = ()
    _rank = 10


class LMerge(_Binary):
    """Left parallelism ``x % y`` (operational semantics only)."""

    __slots__ = ()
    _rank = 11


# ---------------------------------------------------------------------------
# smart constructors: unit/absorption laws valid modulo every equivalence
# in scope (language, pomset, step, hp, hhp)


def mkseq(x, y):
    if x is ONE or isinstance(x, One):
        return y
    if y is ONE or isinstance(y, One):
        return x
    return Seq(x, y)


def mkalt(x, y):
    if isinstance(x, Zero):
        return y
    if isinstance(y, Zero):
        return x
    if x == y:
        return x
    return Alt(x, y)


def sum_of(terms):
    """Deduplicated, sorted sum; Zero when empty."""
    flat = []
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, Alt):
            stack.append(t.left)
            stack.append(t.right)
        elif not isinstance(t, Zero):
            flat.append(t)
    flat = sorted(set(flat))
    if not flat:
        return ZERO
    out = flat[0]
    for t in flat[1:]:
        out = Alt(out, t)
    return out


def summands(x):
    if isinstance(x, Alt):
        return summands(x.left) + summands(x.right)
    if isinstance(x, Zero):
        return ()
    return (x,)


# ---------------------------------------------------------------------------
# nullability and depth measures


def nullable(x, strict_comm=True):
    """Whether the empty pomset belongs to the expression's language.

    In the default strict-comm mode a communication merge is never
    nullable (the axioms make ``x | 1`` empty); the toggle reproduces the
    literal termination rules instead.
    """
    if isinstance(x, (Zero, Act, CommAct)):
        return False
    if isinstance(x, One):
        return True
    if isinstance(x, (Star, ParStar)):
        return True
    if isinstance(x, Alt):
        return nullable(x.left, strict_comm) or nullable(x.right, strict_comm)
    if isinstance(x, Merge):
        if strict_comm:
            return False
        return nullable(x.left, strict_comm) and nullable(x.right, strict_comm)
    if isinstance(x, (Seq, Par, Conc, LMerge)):
        return nullable(x.left, strict_comm) and nullable(x.right, strict_comm)
    raise TypeError("not an expression: %r" % (x,))


def _conc_depth(x):
    if isinstance(x, (Zero, One, Act, CommAct)):
        return 0
    if isinstance(x, (Star, ParStar)):
        return _conc_depth(x.arg)
    if isinstance(x, (Alt, Seq)):
        return max(_conc_depth(x.left), _conc_depth(x.right))
    if isinstance(x, (Par, Merge, Conc, LMerge)):
        return max(_conc_depth(x.left), _conc_depth(x.right)) + 1
    raise TypeError("not an expression: %r" % (x,))


def conc_depth(x):
    """The triple of concurrent, parallel and communication depths; the
    three recursions coincide on every operator of the syntax."""
    d = _conc_depth(x)
    return (d, d, d)


def dagger_depth(x):
    if isinstance(x, (Zero, One, Act, CommAct)):
        return 0
    if isinstance(x, ParStar):
        return dagger_depth(x.arg) + 1
    if isinstance(x, Star):
        return dagger_depth(x.arg)
    return max(dagger_depth(c) for c in x.children())


def atoms(x):
    """Base action names occurring in the expression."""
    if isinstance(x, Act):
        return {x.name}
    if isinstance(x, CommAct):
        return {x.a, x.b}
    out = set()
    for c in x.children():
        out |= atoms(c)
    return out


def has_star(x):
    if isinstance(x, (Star, ParStar)):
        return True
    return any(has_star(c) for c in x.children())


def has_lmerge(x):
    if isinstance(x, LMerge):
        return True
    return any(has_lmerge(c) for c in x.children())


# ---------------------------------------------------------------------------
# concrete syntax

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<op>\|\||[+.|&%*^(),])|(?P<num>[01])|(?P<ident>[a-z][a-z0-9_]*))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError("unexpected character %r" % stripped[0], pos)
        if m.group("op"):
            tokens.append((m.group("op"), m.start("op")))
        elif m.group("num"):
            tokens.append((m.group("num"), m.start("num")))
        else:
            tokens.append((m.group("ident"), m.start("ident")))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, table=None):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.table = table or active_comm_table()

    def peek(self):
        return self.tokens[self.i][0]

    def pos(self):
        return self.tokens[self.i][1]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, tok):
        got, pos = self.take()
        if got != tok:
            raise ParseError("expected %r, found %r" % (tok, got), pos)

    def parse(self):
        e = self.alt()
        if self.peek() is not None:
            raise ParseError("trailing input %r" % self.peek(), self.pos())
        return e

    def alt(self):
        e = self.parlevel()
        while self.peek() == "+":
            self.take()
            e = Alt(e, self.parlevel())
        return e

    def parlevel(self):
        e = self.seqlevel()
        ops = {"||": Par, "|": Merge, "&": Conc, "%": LMerge}
        while self.peek() in ops:
            op, _ = self.take()
            e = ops[op](e, self.seqlevel())
        return e

    def seqlevel(self):
        e = self.postfix()
        while self.peek() == ".":
            self.take()
            e = Seq(e, self.postfix())
        return e

    def postfix(self):
        e = self.atom()
        while self.peek() in ("*", "^"):
            op, _ = self.take()
            e = Star(e) if op == "*" else ParStar(e)
        return e

    def atom(self):
        tok, pos = self.take()
        if tok == "0":
            return ZERO
        if tok == "1":
            return ONE
        if tok == "(":
            e = self.alt()
            self.expect(")")
            return e
        if tok == "rho" and self.peek() == "(":
            self.take()
            a, apos = self.take()
            self.expect(",")
            b, bpos = self.take()
            self.expect(")")
            if not a or not a[0].isalpha():
                raise ParseError("bad action name %r" % a, apos)
            if not b or not b[0].isalpha():
                raise ParseError("bad action name %r" % b, bpos)
            if not self.table.defined(a, b):
                raise ParseError("rho(%s,%s) is not defined" % (a, b), pos)
            return CommAct(a, b, self.table)
        if tok is not None and tok[0].isalpha():
            return Act(tok)
        raise ParseError("expected an expression, found %r" % (tok,), pos)


def parse(text, table=None):
    """Parse the ASCII grammar into an expression tree."""
    return _Parser(text, table).parse()


_PREC = {
    Zero: 9,
    One: 9,
    Act: 9,
    CommAct: 9,
    Star: 8,
    ParStar: 8,
    Seq: 7,
    Par: 6,
    Merge: 6,
    Conc: 6,
    LMerge: 6,
    Alt: 5,
}

_INFIX = {Alt: "+", Seq: ".", Par: "||", Merge: "|", Conc: "&", LMerge: "%"}


def to_text(x):
    """Render back into the concrete grammar (parse(to_text(x)) == x)."""
    prec = _PREC[type(x)]

    def wrap(child, need):
        text = to_text(child)
        return "(" + text + ")" if _PREC[type(child)] < need else text

    if isinstance(x, Zero):
        return "0"
    if isinstance(x, One):
        return "1"
    if isinstance(x, Act):
        return x.name
    if isinstance(x, CommAct):
        return x.sym()
    if isinstance(x, Star):
        return wrap(x.arg, 9) + "*"
    if isinstance(x, ParStar):
        return wrap(x.arg, 9) + "^"
    op = _INFIX[type(x)]
    return wrap(x.left, prec) + op + wrap(x.right, prec + 1)
