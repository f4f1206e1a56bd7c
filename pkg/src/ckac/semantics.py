"""Bounded denotational semantics of expressions and pomset membership."""

from . import pomset as pm
from .expr import (
    Act,
    Alt,
    CommAct,
    Conc,
    LMerge,
    Merge,
    One,
    Par,
    ParStar,
    Seq,
    Star,
    Zero,
    nullable,
)
from .errors import PreconditionError, UnsupportedOperatorError
from .language import (
    PomsetLanguage,
    lang_compose,
    lang_parstar_bounded,
    lang_star_bounded,
)


_denote_cache = {}


def denote_bounded(x, n):
    """All pomsets of the expression's language with at most ``n`` events.

    Left parallelism has no language semantics and is rejected.
    """
    key = (x, n)
    cached = _denote_cache.get(key)
    if cached is None:
        cached = _denote_cache[key] = _denote(x, n)
    return cached


def _denote(x, n):
    if isinstance(x, Zero):
        return PomsetLanguage((), n)
    if isinstance(x, One):
        return PomsetLanguage({pm.EMPTY}, n)
    if isinstance(x, (Act, CommAct)):
        members = {pm.primitive(x.sym())} if n >= 1 else set()
        return PomsetLanguage(members, n)
    if isinstance(x, LMerge):
        raise UnsupportedOperatorError("left parallelism has no language semantics")
    if isinstance(x, Alt):
        return lang_compose("union", denote_bounded(x.left, n), denote_bounded(x.right, n))
    if isinstance(x, Seq):
        return lang_compose("seq", denote_bounded(x.left, n), denote_bounded(x.right, n))
    if isinstance(x, Par):
        return lang_compose("par", denote_bounded(x.left, n), denote_bounded(x.right, n))
    if isinstance(x, Merge):
        return lang_compose("comm", denote_bounded(x.left, n), denote_bounded(x.right, n))
    if isinstance(x, Conc):
        return lang_compose("conc", denote_bounded(x.left, n), denote_bounded(x.right, n))
    if isinstance(x, Star):
        return lang_star_bounded(denote_bounded(x.arg, n), n)
    if isinstance(x, ParStar):
        return lang_parstar_bounded(denote_bounded(x.arg, n), n)
    raise TypeError("not an expression: %r" % (x,))


def _seq_prefix_splits(u):
    """Splits u = v . w along the prime chain, v nonempty."""
    factors = pm.seq_factors(u)
    out = []
    for i in range(1, len(factors) + 1):
        v = pm.EMPTY
        for f in factors[:i]:
            v = pm.compose_seq(v, f)
        w = pm.EMPTY
        for f in factors[i:]:
            w = pm.compose_seq(w, f)
        out.append((v, w))
    return out


def _par_splits(u, proper=False):
    """Splits u = v || w over sub-multisets of the parallel factors; when
    ``proper`` the left part is nonempty."""
    factors = pm.par_factors(u)
    k = len(factors)
    out = []
    seen = set()
    for mask in range(1 if proper else 0, 1 << k):
        left = [factors[i] for i in range(k) if mask >> i & 1]
        key = tuple(sorted(f.sort_key() for f in left))
        if key in seen:
            continue
        seen.add(key)
        v = pm.EMPTY
        for f in left:
            v = pm.compose_par(v, f)
        w = pm.EMPTY
        for i in range(k):
            if not mask >> i & 1:
                w = pm.compose_par(w, factors[i])
        out.append((v, w))
    return out


class _Membership:
    def __init__(self):
        self.memo = {}

    def holds(self, x, u):
        key = (x, u)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = result = self._decide(x, u)
        return result

    def _decide(self, x, u):
        if isinstance(x, Zero):
            return False
        if isinstance(x, One):
            return u.is_empty
        if isinstance(x, (Act, CommAct)):
            return u.n == 1 and u.labels[0] == x.sym()
        if isinstance(x, LMerge):
            raise UnsupportedOperatorError(
                "left parallelism has no language semantics"
            )
        if isinstance(x, Alt):
            return self.holds(x.left, u) or self.holds(x.right, u)
        if isinstance(x, Seq):
            if u.is_empty:
                return nullable(x.left) and nullable(x.right)
            for v, w in _seq_prefix_splits(u):
                if self.holds(x.left, v) and self.holds(x.right, w):
                    return True
            if nullable(x.left) and self.holds(x.right, u):
                return True
            return False
        if isinstance(x, Par):
            for v, w in _par_splits(u):
                if self.holds(x.left, v) and self.holds(x.right, w):
                    return True
            return False
        if isinstance(x, Merge):
            for a_side, b_side in pm.comm_splits(u):
                if self.holds(x.left, pm.induced(u, a_side)) and self.holds(
                    x.right, pm.induced(u, b_side)
                ):
                    return True
            return False
        if isinstance(x, Conc):
            return self.holds(Par(x.left, x.right), u) or self.holds(
                Merge(x.left, x.right), u
            )
        if isinstance(x, Star):
            if u.is_empty:
                return True
            for v, w in _seq_prefix_splits(u):
                if self.holds(x.arg, v) and self.holds(x, w):
                    return True
            return False
        if isinstance(x, ParStar):
            if u.is_empty:
                return True
            for v, w in _par_splits(u, proper=True):
                if self.holds(x.arg, v) and self.holds(x, w):
                    return True
            return False
        raise TypeError("not an expression: %r" % (x,))


def member(x, u):
    """Decide u in [[x]] by factorization-guided recursion."""
    if not pm.is_scp(u):
        raise PreconditionError("membership is decided over SCP pomsets")
    return _Membership().holds(x, u)


def primitive_symbols(x):
    """Symbols whose one-event pomset belongs to the expression's language."""
    if isinstance(x, (Zero, One)):
        return frozenset()
    if isinstance(x, (Act, CommAct)):
        return frozenset({x.sym()})
    if isinstance(x, Alt):
        return primitive_symbols(x.left) | primitive_symbols(x.right)
    if isinstance(x, (Star, ParStar)):
        return primitive_symbols(x.arg)
    if isinstance(x, Merge):
        return frozenset()  # members pair nonempty sides, so never one event
    if isinstance(x, (Seq, Par, Conc)):
        out = set()
        if nullable(x.right):
            out |= primitive_symbols(x.left)
        if nullable(x.left):
            out |= primitive_symbols(x.right)
        return frozenset(out)
    raise TypeError("not an expression: %r" % (x,))


def sync_image_bounded(x, n, table=None):
    """The synchronously translated language, truncated at ``n`` events.

    Exactly the translations of the translatable members: translation
    distributes over every operator except the communication merge, whose
    translatable members pair two single events into one merged action.
    """
    from .comm import active_comm_table

    table = table or active_comm_table()
    if isinstance(x, Zero):
        return PomsetLanguage((), n)
    if isinstance(x, One):
        return PomsetLanguage({pm.EMPTY}, n)
    if isinstance(x, (Act, CommAct)):
        members = {pm.primitive(x.sym())} if n >= 1 else set()
        return PomsetLanguage(members, n)
    if isinstance(x, LMerge):
        raise UnsupportedOperatorError("left parallelism has no language semantics")
    if isinstance(x, Alt):
        return lang_compose(
            "union", sync_image_bounded(x.left, n, table), sync_image_bounded(x.right, n, table)
        )
    if isinstance(x, Seq):
        return lang_compose(
            "seq", sync_image_bounded(x.left, n, table), sync_image_bounded(x.right, n, table)
        )
    if isinstance(x, Par):
        return lang_compose(
            "par", sync_image_bounded(x.left, n, table), sync_image_bounded(x.right, n, table)
        )
    if isinstance(x, Star):
        return lang_star_bounded(sync_image_bounded(x.arg, n, table), n)
    if isinstance(x, ParStar):
        return lang_parstar_bounded(sync_image_bounded(x.arg, n, table), n)
    if isinstance(x, (Merge, Conc)):
        merged = set()
        if n >= 1:
            for p in primitive_symbols(x.left):
                for q in primitive_symbols(x.right):
                    if table.defined(p, q):
                        merged.add(pm.primitive(table.rho(p, q)))
        merged = PomsetLanguage(merged, n)
        if isinstance(x, Merge):
            return merged
        par = lang_compose(
            "par", sync_image_bounded(x.left, n, table), sync_image_bounded(x.right, n, table)
        )
        return lang_compose("union", par, merged)
    raise TypeError("not an expression: %r" % (x,))


def lang_equiv_bounded(x, y, n):
    """Language equality truncated at ``n`` events."""
    return denote_bounded(x, n) == denote_bounded(y, n)
