import pytest

from ckac import pomset as pm
from ckac.language import (
    PomsetLanguage,
    h_closure_bounded,
    lang_compose,
    lang_parstar_bounded,
    lang_star_bounded,
    subsumption_closure,
)
from ckac.expr import parse
from ckac.errors import UnsupportedHypothesisError
from ckac.exchange import Hypothesis

from conftest import chain, par, prim


def L(*members):
    return PomsetLanguage(members)


class TestCompose:
    def test_seq(self):
        assert lang_compose("seq", L(prim("a")), L(prim("b"))) == L(chain("a", "b"))

    def test_comm_excludes_empty_operands(self):
        assert lang_compose("comm", L(prim("a")), L(pm.EMPTY)) == L()
        assert lang_compose("comm", L(pm.EMPTY), L(prim("a"))) == L()

    def test_conc_both_variants(self):
        got = lang_compose("conc", L(prim("a")), L(prim("b")))
        assert got == L(
            pm.compose_par(prim("a"), prim("b")),
            pm.compose_comm(prim("a"), prim("b")),
        )

    def test_conc_with_empty_collapses(self):
        assert lang_compose("conc", L(pm.EMPTY), L(prim("a"))) == L(prim("a"))

    def test_union_and_distributivity_randomized(self):
        import random

        rng = random.Random(3)
        pool = [pm.EMPTY, prim("a"), prim("b"), chain("a", "b"),
                par(prim("a"), prim("b")), pm.compose_comm(prim("a"), prim("b"))]

        def rand_lang():
            return PomsetLanguage(rng.sample(pool, rng.randint(0, 3)))

        for _ in range(100):
            a, b, c = rand_lang(), rand_lang(), rand_lang()
            u = lambda x, y: lang_compose("union", x, y)
            assert u(a, b) == u(b, a)
            assert u(a, u(b, c)) == u(u(a, b), c)
            assert u(a, a) == a
            for op in ("seq", "par", "conc", "comm"):
                assert lang_compose(op, u(a, b), c) == u(
                    lang_compose(op, a, c), lang_compose(op, b, c)
                )
                assert lang_compose(op, a, u(b, c)) == u(
                    lang_compose(op, a, b), lang_compose(op, a, c)
                )

    def test_bound_propagates_min(self):
        a = PomsetLanguage({prim("a")}, event_bound=4)
        b = PomsetLanguage({prim("b")}, event_bound=2)
        assert lang_compose("seq", a, b).event_bound == 2


class TestStars:
    def test_star_unrolls(self):
        got = lang_star_bounded(L(prim("a")), 3)
        assert got.members == {
            pm.EMPTY,
            prim("a"),
            chain("a", "a"),
            chain("a", "a", "a"),
        }

    def test_star_of_empty(self):
        assert lang_star_bounded(L(), 5).members == {pm.EMPTY}

    def test_star_of_unit(self):
        assert lang_star_bounded(L(pm.EMPTY), 5).members == {pm.EMPTY}

    def test_star_fixpoint_equation(self):
        lang = L(prim("a"), chain("b", "b"))
        star = lang_star_bounded(lang, 5)
        unrolled = lang_compose(
            "union", L(pm.EMPTY), lang_compose("seq", lang, star)
        )
        assert PomsetLanguage(unrolled.members, 5) == PomsetLanguage(
            star.members, 5
        )

    def test_parstar_unrolls(self):
        got = lang_parstar_bounded(L(prim("a")), 3)
        assert got.members == {
            pm.EMPTY,
            prim("a"),
            par(prim("a"), prim("a")),
            par(prim("a"), prim("a"), prim("a")),
        }

    def test_parstar_of_unit(self):
        assert lang_parstar_bounded(L(pm.EMPTY), 4).members == {pm.EMPTY}

    def test_parstar_of_chain(self):
        got = lang_parstar_bounded(L(chain("a", "b")), 4)
        assert got.members == {
            pm.EMPTY,
            chain("a", "b"),
            par(chain("a", "b"), chain("a", "b")),
        }


class TestSubsumptionClosure:
    def test_primitive_fixed(self):
        assert subsumption_closure(L(prim("a"))) == L(prim("a"))

    def test_interchange_member(self):
        big = par(chain("a", "b"), chain("c", "d"))
        got = subsumption_closure(L(big))
        assert pm.compose_seq(par(prim("a"), prim("c")), par(prim("b"), prim("d"))) in got

    def test_antichain(self):
        got = subsumption_closure(L(par(prim("a"), prim("b"))))
        assert got.members == {
            par(prim("a"), prim("b")),
            chain("a", "b"),
            chain("b", "a"),
        }

    def test_closure_operator_laws(self):
        langs = [
            L(par(prim("a"), prim("b"))),
            L(chain("a", "b"), prim("c")),
            L(pm.compose_comm(prim("a"), prim("b"))),
        ]
        for lang in langs:
            closed = subsumption_closure(lang)
            assert lang.members <= closed.members  # extensive
            assert subsumption_closure(closed) == closed  # idempotent
        a, b = langs[0], langs[1]
        union = lang_compose("union", a, b)
        assert (
            subsumption_closure(a).members <= subsumption_closure(union).members
        )  # monotone


class TestGroundedClosure:
    def test_empty_hypotheses(self):
        lang = L(chain("a", "b"))
        assert h_closure_bounded(lang, [], 4).members == lang.members

    def test_single_step(self):
        h = Hypothesis(parse("a"), parse("b"))
        got = h_closure_bounded(L(prim("b")), [h], 3)
        assert got.members == {prim("b"), prim("a")}

    def test_pumping(self):
        h = Hypothesis(parse("a.a"), parse("a"))
        got = h_closure_bounded(L(chain("c", "a", "d")), [h], 5)
        assert got.members == {
            chain("c", "a", "d"),
            chain("c", "a", "a", "d"),
            chain("c", "a", "a", "a", "d"),
        }

    def test_parallel_context(self):
        h = Hypothesis(parse("a"), parse("b"))
        got = h_closure_bounded(L(par(prim("b"), prim("e"))), [h], 4)
        assert par(prim("a"), prim("e")) in got

    def test_comm_context_right_side_only(self):
        h = Hypothesis(parse("a"), parse("b"))
        lang = L(pm.compose_comm(prim("c"), prim("b")))
        got = h_closure_bounded(lang, [h], 4)
        assert pm.compose_comm(prim("c"), prim("a")) in got
        # the left operand of a communication is not a rewrite position
        lang2 = L(pm.compose_comm(prim("b"), prim("c")))
        got2 = h_closure_bounded(lang2, [h], 4)
        assert pm.compose_comm(prim("a"), prim("c")) not in got2

    def test_non_grounded_rejected(self):
        with pytest.raises(UnsupportedHypothesisError):
            h_closure_bounded(L(prim("a")), [Hypothesis(parse("a"), parse("b+c"))], 3)
        with pytest.raises(UnsupportedHypothesisError):
            h_closure_bounded(L(prim("a")), [Hypothesis(parse("a"), parse("1"))], 3)

    def test_monotone(self):
        h = [Hypothesis(parse("a"), parse("b"))]
        small = L(prim("b"))
        big = L(prim("b"), prim("c"))
        assert (
            h_closure_bounded(small, h, 3).members
            <= h_closure_bounded(big, h, 3).members
        )
        assert (
            h_closure_bounded(small, [], 3).members
            <= h_closure_bounded(small, h, 3).members
        )


class TestDump:
    def test_sorted_deterministic(self):
        from ckac.language import dump, load

        lang = L(chain("b", "a"), prim("c"), par(prim("a"), prim("b")))
        text = dump(lang)
        assert dump(load(text)) == text
