import pytest

from ckac.bisim import (
    hhp_bisimilar,
    hp_bisimilar,
    pomset_bisimilar_bounded,
    simulates,
    step_bisimilar,
)
from ckac.errors import UnsupportedInputError
from ckac.expr import parse

from conftest import random_expr, rng


class TestStepBisim:
    def test_par_commutes(self):
        assert step_bisimilar(parse("a||b"), parse("b||a"))

    def test_zero_absorption_fails(self):
        rel = step_bisimilar(parse("a.0"), parse("0"))
        assert not rel
        assert rel.counterexample

    def test_left_distributivity_fails(self):
        rel = step_bisimilar(parse("a.(b+c)"), parse("a.b+a.c"))
        assert not rel
        assert rel.counterexample == ("a", "b") or rel.counterexample == ("a", "c")

    def test_witness_replays(self):
        rel = step_bisimilar(parse("(a+a).b"), parse("a.b"))
        assert rel and rel.replay()

    def test_star_axioms(self):
        assert step_bisimilar(parse("1+a.a*"), parse("a*"))
        assert step_bisimilar(parse("(1+a)*"), parse("a*"))

    def test_congruence_spot_checks(self):
        r = rng(5)
        contexts = ["%s.c", "c.%s", "%s+c", "%s||c", "%s|c", "%s&c"]
        for _ in range(40):
            x = random_expr(r, r.randint(1, 4))
            y = random_expr(r, r.randint(1, 4))
            if bool(step_bisimilar(x, y)):
                for ctx in contexts:
                    lhs = parse(ctx % ("(" + str(x) + ")"))
                    rhs = parse(ctx % ("(" + str(y) + ")"))
                    assert step_bisimilar(lhs, rhs), (x, y, ctx)


class TestPomsetBisim:
    def test_reflexive(self):
        x = parse("a.(b||c)")
        assert pomset_bisimilar_bounded(x, x, 3)

    def test_par_vs_merge(self):
        assert not pomset_bisimilar_bounded(parse("a||b"), parse("a|b"), 2)

    def test_continuation_difference(self):
        assert not pomset_bisimilar_bounded(parse("(a.b)||c"), parse("(a||c).b"), 2)

    def test_refines_step_on_random_pairs(self):
        r = rng(12)
        for _ in range(60):
            x = random_expr(r, r.randint(1, 5), stars=False)
            y = random_expr(r, r.randint(1, 5), stars=False)
            if pomset_bisimilar_bounded(x, y, 3):
                assert step_bisimilar(x, y)


class TestHpHhp:
    def test_identity(self):
        assert hp_bisimilar(parse("a||b"), parse("a||b"))
        assert hhp_bisimilar(parse("a&b"), parse("a&b"))

    def test_commuted(self):
        assert hp_bisimilar(parse("a||b"), parse("b||a"))
        assert hhp_bisimilar(parse("a||b"), parse("b||a"))

    def test_distributivity_fails(self):
        assert not hp_bisimilar(parse("a.(b+c)"), parse("a.b+a.c"))

    def test_hhp_refines_hp(self):
        r = rng(31)
        for _ in range(40):
            x = random_expr(r, r.randint(1, 4), stars=False)
            y = random_expr(r, r.randint(1, 4), stars=False)
            if hhp_bisimilar(x, y):
                assert hp_bisimilar(x, y), (x, y)

    def test_starred_needs_unroll(self):
        with pytest.raises(UnsupportedInputError):
            hp_bisimilar(parse("a*"), parse("a*"))
        assert hp_bisimilar(parse("a*"), parse("1+a.a*"), unroll=3)

    def test_counterexample_on_failure(self):
        rel = hhp_bisimilar(parse("a.b"), parse("b.a"))
        assert not rel and rel.counterexample


class TestSimulates:
    def test_step_simulation(self):
        assert simulates("step", parse("a"), parse("a+b"))
        assert not simulates("step", parse("a+b"), parse("a"))

    def test_reflexive(self):
        x = parse("a.(b+c)")
        for kind in ("step", "pomset", "hp", "hhp"):
            assert simulates(kind, x, x)

    def test_hp_simulation(self):
        assert simulates("hp", parse("a"), parse("a+b"))
        assert not simulates("hp", parse("a+b"), parse("b"))

    def test_distributivity_sims_one_way(self):
        # a.(b+c) is simulated by a.b+a.c pointwise but not bisimilar
        assert simulates("step", parse("a.b+a.c"), parse("a.(b+c)"))


class TestRefinementChain:
    def test_chain_on_random_star_free_pairs(self):
        r = rng(77)
        checked = 0
        for _ in range(40):
            x = random_expr(r, r.randint(1, 4), stars=False)
            y = random_expr(r, r.randint(1, 4), stars=False)
            hhp = bool(hhp_bisimilar(x, y))
            hp = bool(hp_bisimilar(x, y))
            pomset = bool(pomset_bisimilar_bounded(x, y, max(x.size(), y.size())))
            step = bool(step_bisimilar(x, y))
            if hhp:
                assert hp
            if hp:
                assert pomset
            if pomset:
                assert step
            checked += 1
        assert checked == 40
