import json

import pytest

import ckac.expr as ex
from ckac import pomset as pm
from ckac.comm import CommTable, using_comm_table
from ckac.errors import CapExceededError
from ckac.expr import parse
from ckac.lts import Multi, Single, Sync, build_lts, steps, terminates, to_dot, to_json
from ckac.semantics import denote_bounded, sync_image_bounded

from conftest import random_expr, rng


class TestSteps:
    def test_action(self):
        assert steps(parse("a")) == {(Single("a"), ex.ONE)}

    def test_zero_one(self):
        assert steps(parse("0")) == frozenset()
        assert steps(parse("1")) == frozenset()

    def test_par_pairs_only(self):
        assert steps(parse("a||b")) == {
            (Multi(("a", "b")), ex.Conc(ex.ONE, ex.ONE))
        }

    def test_merge_sync(self):
        assert steps(parse("a|b")) == {
            (Sync("rho(a,b)"), ex.Conc(ex.ONE, ex.ONE))
        }
        with using_comm_table(CommTable()):
            assert steps(parse("a|b")) == frozenset()

    def test_conc_both_rules(self):
        got = steps(parse("a&b"))
        assert got == {
            (Multi(("a", "b")), ex.Conc(ex.ONE, ex.ONE)),
            (Sync("rho(a,b)"), ex.Conc(ex.ONE, ex.ONE)),
        }

    def test_one_sided_progress_impossible(self):
        assert steps(parse("a||1")) == frozenset()
        assert steps(parse("a&1")) == frozenset()
        assert steps(parse("a|1")) == frozenset()

    def test_lmerge_ordering_side_condition(self):
        assert steps(parse("a%b")) == {
            (Multi(("a", "b")), ex.Conc(ex.ONE, ex.ONE))
        }
        assert steps(parse("b%a")) == frozenset()
        # ties fire
        assert steps(parse("a%a")) == {
            (Multi(("a", "a")), ex.Conc(ex.ONE, ex.ONE))
        }

    def test_seq_raw_target(self):
        assert steps(parse("a.b")) == {(Single("a"), ex.Seq(ex.ONE, ex.Act("b")))}

    def test_star_rule(self):
        a = parse("a")
        assert steps(parse("a*")) == {
            (Single("a"), ex.Seq(ex.ONE, ex.Star(a)))
        }

    def test_parstar_rule_as_printed(self):
        # the printed rule iterates the remainder with the sequential star
        assert steps(parse("a^")) == {
            (Single("a"), ex.Par(ex.ONE, ex.Star(ex.Act("a"))))
        }

    def test_rho_atom_steps_sync(self):
        assert steps(parse("rho(a,b)")) == {(Sync("rho(a,b)"), ex.ONE)}

    def test_nested_par_stuck(self):
        # premises of the pairing rules require single base actions
        assert steps(parse("(a||b)||c")) == frozenset()


class TestTerminates:
    def test_basics(self):
        assert terminates(parse("1"))
        assert not terminates(parse("a"))
        assert terminates(parse("0*"))
        assert terminates(parse("0^"))
        assert not terminates(parse("1|1"))
        assert terminates(parse("1|1"), strict_comm=False)

    def test_agrees_with_nullable(self):
        r = rng(17)
        for _ in range(300):
            x = random_expr(r, r.randint(1, 12), dagger=True)
            assert terminates(x) == ex.nullable(x)


class TestBuildLts:
    def test_seq_chain(self):
        lts = build_lts(parse("a.b"), 16)
        assert len(lts.states) == 3
        assert len(lts.transitions) == 2
        assert lts.terminating == {ex.ONE}

    def test_star_self_loop(self):
        lts = build_lts(parse("a*"), 16)
        names = {ex.to_text(s) for s in lts.states}
        assert names == {"a*", "1.a*"}
        assert lts.terminating == lts.states
        loop_state = parse("1.a*")
        assert (loop_state, Single("a"), loop_state) in lts.transitions

    def test_zero(self):
        lts = build_lts(parse("0"), 16)
        assert len(lts.states) == 1
        assert not lts.transitions
        assert not lts.terminating

    def test_cap(self):
        with pytest.raises(CapExceededError):
            build_lts(parse("(a.b.c)*"), 2)

    def test_deterministic(self):
        a = to_json(build_lts(parse("(a+b)*.c")))
        b = to_json(build_lts(parse("(a+b)*.c")))
        assert a == b
        json.loads(a)

    def test_dot_output(self):
        text = to_dot(build_lts(parse("a|b")))
        assert "rho(a,b)" in text
        assert "doublecircle" in text  # the terminating end state


class TestTracePomsets:
    def test_star_free_traces_match_sync_image(self):
        # maximal-run traces assembled into pomsets reproduce the
        # synchronously translated denotation
        def trace_language(x):
            lts = build_lts(x)
            out = set()

            def walk(state, acc):
                if state in lts.terminating:
                    out.add(acc)
                for lbl, dst in lts.successors(state):
                    if isinstance(lbl, Multi):
                        step = pm.EMPTY
                        for sym in lbl.syms:
                            step = pm.compose_par(step, pm.primitive(sym))
                    else:
                        step = pm.primitive(lbl.sym)
                    walk(dst, pm.compose_seq(acc, step))

            walk(x, pm.EMPTY)
            return out

        r = rng(4)
        for _ in range(60):
            x = random_expr(r, r.randint(1, 6), stars=False)
            got = trace_language(x)
            image = sync_image_bounded(x, 8).members
            # traces are step sequences: every trace subsumes (is an
            # execution-order extension of) an image member
            for t in got:
                assert any(pm.subsumes(t, u) for u in image)
