import pytest

from ckac import pomset as pm
from ckac.expr import parse
from ckac.errors import UnsupportedOperatorError
from ckac.semantics import (
    denote_bounded,
    lang_equiv_bounded,
    member,
    primitive_symbols,
    sync_image_bounded,
)

from conftest import chain, par, prim, random_expr, rng


class TestDenote:
    def test_constants(self):
        assert denote_bounded(parse("0"), 4).members == set()
        assert denote_bounded(parse("1"), 4).members == {pm.EMPTY}
        assert denote_bounded(parse("a"), 4).members == {prim("a")}

    def test_figure_shape(self):
        got = denote_bounded(parse("a.(b||c).d"), 4)
        want = pm.compose_seq(
            pm.compose_seq(prim("a"), par(prim("b"), prim("c"))), prim("d")
        )
        assert got.members == {want}
        assert len(want.eo) == 5  # a->b, a->c, a->d, b->d, c->d

    def test_comm_with_unit_empty(self):
        assert denote_bounded(parse("a|1"), 4).members == set()
        assert denote_bounded(parse("1|a"), 4).members == set()

    def test_lmerge_rejected(self):
        with pytest.raises(UnsupportedOperatorError):
            denote_bounded(parse("a%b"), 3)

    def test_rho_atom(self):
        assert denote_bounded(parse("rho(a,b)"), 2).members == {prim("rho(a,b)")}


class TestMember:
    def test_star_unrolling(self):
        assert member(parse("a*"), chain("a", "a", "a"))
        assert not member(parse("a*"), chain("a", "b"))

    def test_par_no_exec_edge(self):
        assert not member(parse("a||b"), chain("a", "b"))
        assert member(parse("a||b"), par(prim("a"), prim("b")))

    def test_conc_comm_edge(self):
        assert member(parse("a&b"), pm.compose_comm(prim("a"), prim("b")))

    def test_merge_direction(self):
        assert member(parse("a|b"), pm.compose_comm(prim("a"), prim("b")))
        assert not member(parse("b|a"), pm.compose_comm(prim("a"), prim("b")))

    def test_agrees_with_denote_randomized(self):
        r = rng(9)
        for _ in range(150):
            x = random_expr(r, r.randint(1, 7))
            lang = denote_bounded(x, 4)
            universe = set(lang.members)
            universe.add(prim("a"))
            universe.add(chain("a", "b"))
            universe.add(par(prim("a"), prim("b")))
            for u in universe:
                assert member(x, u) == (u in lang.members), (x, u)

    def test_parstar(self):
        assert member(parse("a^"), par(prim("a"), prim("a"), prim("a")))
        assert member(parse("(a.b)^"), par(chain("a", "b"), chain("a", "b")))
        assert not member(parse("(a.b)^"), chain("a", "b", "a", "b"))


class TestEquiv:
    def test_reflexive(self):
        x = parse("a.(b||c)*")
        assert lang_equiv_bounded(x, x, 5)

    def test_distributivity(self):
        assert lang_equiv_bounded(parse("a.(b+c)"), parse("a.b+a.c"), 4)

    def test_zero_absorption(self):
        assert lang_equiv_bounded(parse("a.0"), parse("0"), 4)

    def test_inequivalent(self):
        assert not lang_equiv_bounded(parse("a||b"), parse("a.b+b.a"), 4)


class TestNullableAgainstDenote:
    def test_randomized(self):
        from ckac.expr import nullable

        r = rng(21)
        for _ in range(300):
            x = random_expr(r, r.randint(1, 12))
            assert nullable(x) == (pm.EMPTY in denote_bounded(x, 0).members)


class TestSyncImage:
    def test_primitive_symbols(self):
        assert primitive_symbols(parse("a+b.c")) == {"a"}
        assert primitive_symbols(parse("a||1")) == {"a"}
        assert primitive_symbols(parse("a|b")) == frozenset()
        assert primitive_symbols(parse("a*")) == {"a"}

    def test_merge_image_is_single_merge_event(self):
        got = sync_image_bounded(parse("(a.c)|b"), 4)
        assert got.members == set()
        got2 = sync_image_bounded(parse("(a+a.c)|b"), 4)
        assert got2.members == {prim("rho(a,b)")}

    def test_matches_slow_translation(self):
        from ckac.comm import active_comm_table
        from ckac.errors import AmbiguityError, CommTableError

        r = rng(33)
        table = active_comm_table()
        for _ in range(120):
            x = random_expr(r, r.randint(1, 7))
            fast = sync_image_bounded(x, 3).members
            slow = set()
            for u in denote_bounded(x, 6):
                try:
                    v = pm.sync_translate(u, table)
                except (AmbiguityError, CommTableError):
                    continue
                if v.n <= 3:
                    slow.add(v)
            assert fast == slow, x
