import random

import pytest

import ckac.expr as ex
from ckac import pomset as pm
from ckac.comm import CommTable, set_comm_table, EMPTY_TABLE


@pytest.fixture(autouse=True)
def comm_table():
    """Every pair over a..d communicates; restored afterwards."""
    table = CommTable.full("abcd")
    set_comm_table(table)
    yield table
    set_comm_table(EMPTY_TABLE)


LETTERS = "abc"


def random_expr(rng, size, letters=LETTERS, stars=True, dagger=False,
                merges=True, star_body=2):
    """Random expression with about ``size`` internal nodes."""
    if size <= 1:
        return rng.choice([ex.ZERO, ex.ONE] + [ex.Act(c) for c in letters])
    ops = ["alt", "seq", "par", "conc"]
    if merges:
        ops.append("merge")
    if stars:
        ops.append("star")
    if dagger:
        ops.append("dagger")
    op = rng.choice(ops)
    if op in ("star", "dagger"):
        body = random_expr(rng, min(size - 1, star_body), letters, stars=False,
                           dagger=False, merges=merges, star_body=star_body)
        return ex.Star(body) if op == "star" else ex.ParStar(body)
    left_size = rng.randint(1, size - 1)
    left = random_expr(rng, left_size, letters, stars, dagger, merges, star_body)
    right = random_expr(rng, size - 1 - left_size, letters, stars, dagger,
                        merges, star_body)
    cons = {"alt": ex.Alt, "seq": ex.Seq, "par": ex.Par, "merge": ex.Merge,
            "conc": ex.Conc}
    return cons[op](left, right)


def rng(seed):
    return random.Random(seed)


def chain(*syms):
    out = pm.EMPTY
    for s in syms:
        out = pm.compose_seq(out, pm.primitive(s))
    return out


def par(*pomsets):
    out = pm.EMPTY
    for p in pomsets:
        out = pm.compose_par(out, p)
    return out


def prim(sym):
    return pm.primitive(sym)


# ---------------------------------------------------------------------------
# independent oracles (kept separate from the implementation paths they check)


def brute_isomorphic(u, v):
    """Exhaustive bijection search on canonical representatives."""
    if u.n != v.n or sorted(u.labels) != sorted(v.labels):
        return False
    import itertools

    for perm in itertools.permutations(range(v.n)):
        if any(u.labels[i] != v.labels[perm[i]] for i in range(u.n)):
            continue
        if {(perm[a], perm[b]) for a, b in u.eo} != v.eo:
            continue
        if {(perm[a], perm[b]) for a, b in u.co} != v.co:
            continue
        return True
    return False


def brute_subsumes(u, v):
    """Exhaustive search for an order-reflecting label bijection (exact on
    the communication relation)."""
    import itertools

    if u.n != v.n or sorted(u.labels) != sorted(v.labels):
        return False
    for perm in itertools.permutations(range(u.n)):
        # perm maps v-events to u-events
        if any(v.labels[i] != u.labels[perm[i]] for i in range(v.n)):
            continue
        if not all((perm[a], perm[b]) in u.eo for a, b in v.eo):
            continue
        if {(perm[a], perm[b]) for a, b in v.co} != u.co:
            continue
        return True
    return False


def all_two_splits(u):
    """Every bipartition realizing u = left . right (brute force)."""
    import itertools

    events = range(u.n)
    out = []
    for k in range(1, u.n):
        for left in itertools.combinations(events, k):
            left = set(left)
            right = set(events) - left
            if all((a, b) in u.eo for a in left for b in right) and not any(
                (a, b) in u.co or (b, a) in u.co for a in left for b in right
            ):
                out.append((frozenset(left), frozenset(right)))
    return out
