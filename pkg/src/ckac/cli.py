"""Command-line interface.

Exit status: 0 when the query holds (or the command is informational),
1 when an equivalence/acceptance query fails, 2 on any error (with a
single diagnostic line on stderr).
"""

import argparse
import json
import os
import sys

from . import automata as au
from . import bisim as bs
from . import exchange
from . import expr as ex
from . import language as lg
from . import lts as lt
from . import pomset as pm
from . import semantics as sm
from .comm import CommTable, EMPTY_TABLE, set_comm_table
from .errors import CkacError

RELATIONS = (
    "lang",
    "step",
    "pomset",
    "hp",
    "hhp",
    "exchs",
    "sim-step",
    "sim-pomset",
    "sim-hp",
    "sim-hhp",
)


def _common(parser):
    parser.add_argument(
        "--bound",
        type=int,
        default=5,
        help="event bound for language truncations (default 5)",
    )
    parser.add_argument(
        "--cap",
        type=int,
        default=10000,
        help="state cap for transition-system construction (default 10000)",
    )
    parser.add_argument("--comm", help="communication table file")
    parser.add_argument("--hyp", help="hypothesis file (grounded, plus 'exchs')")
    parser.add_argument(
        "--format", choices=("json", "dot"), default="json", help="export format"
    )


def _build_parser():
    top = argparse.ArgumentParser(prog="ckac")
    sub = top.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("parse", help="parse an expression and print it back")
    p.add_argument("expr")
    _common(p)

    p = sub.add_parser("enum", help="dump the bounded language of an expression")
    p.add_argument("expr")
    _common(p)

    p = sub.add_parser("member", help="decide pomset membership in a language")
    p.add_argument("expr")
    p.add_argument("pomset", help="pomset JSON file")
    _common(p)

    p = sub.add_parser("equiv", help="decide an equivalence between expressions")
    p.add_argument("--rel", choices=RELATIONS, default="lang")
    p.add_argument("left")
    p.add_argument("right")
    _common(p)

    p = sub.add_parser("closure", help="print the exchange-law closure")
    p.add_argument("expr")
    _common(p)

    p = sub.add_parser("pa-build", help="build the syntactic pomset automaton")
    p.add_argument("expr")
    _common(p)

    p = sub.add_parser("pa-accepts", help="decide automaton acceptance")
    p.add_argument("automaton", help="automaton JSON file")
    p.add_argument("state")
    p.add_argument("pomset", help="pomset JSON file")
    _common(p)

    p = sub.add_parser("pa-solve", help="extract an expression for a state")
    p.add_argument("automaton")
    p.add_argument("state")
    _common(p)

    p = sub.add_parser("pa-check", help="report structural predicates")
    p.add_argument("automaton")
    _common(p)

    p = sub.add_parser("lts-export", help="export the transition system")
    p.add_argument("expr")
    _common(p)
    return top


def _load_comm(args):
    path = args.comm or os.environ.get("CKAC_COMM_TABLE")
    set_comm_table(CommTable.load(path) if path else EMPTY_TABLE)


def _load_hypotheses(args):
    if not args.hyp:
        return [], False
    with open(args.hyp) as fh:
        return exchange.parse_hypotheses(fh.read())


def _closed_language(x, args):
    hyps, use_exchs = _load_hypotheses(args)
    if use_exchs:
        x = exchange.closure(x)
    lang = sm.denote_bounded(x, args.bound)
    if hyps:
        lang = lg.h_closure_bounded(lang, hyps, args.bound)
    return lang


def _verdict(holds):
    print("true" if holds else "false")
    return 0 if holds else 1


def _run(args):
    _load_comm(args)
    if args.verb == "parse":
        print(ex.to_text(ex.parse(args.expr)))
        return 0
    if args.verb == "enum":
        print(lg.dump(_closed_language(ex.parse(args.expr), args)))
        return 0
    if args.verb == "member":
        x = ex.parse(args.expr)
        with open(args.pomset) as fh:
            u = pm.loads(fh.read())
        return _verdict(sm.member(x, u))
    if args.verb == "equiv":
        left = ex.parse(args.left)
        right = ex.parse(args.right)
        rel = args.rel
        if rel == "lang":
            if args.hyp:
                return _verdict(
                    _closed_language(left, args) == _closed_language(right, args)
                )
            return _verdict(sm.lang_equiv_bounded(left, right, args.bound))
        if rel == "exchs":
            return _verdict(
                exchange.equiv_modulo_exchs_bounded(left, right, args.bound)
            )
        if rel == "step":
            return _verdict(bool(bs.step_bisimilar(left, right, args.cap)))
        if rel == "pomset":
            return _verdict(
                bool(bs.pomset_bisimilar_bounded(left, right, args.bound, args.cap))
            )
        if rel in ("hp", "hhp"):
            unroll = (
                args.bound
                if ex.has_star(left) or ex.has_star(right)
                else None
            )
            check = bs.hp_bisimilar if rel == "hp" else bs.hhp_bisimilar
            return _verdict(bool(check(left, right, unroll)))
        kind = rel.split("-", 1)[1]
        unroll = args.bound if kind in ("hp", "hhp") else None
        return _verdict(
            bool(bs.simulates(kind, left, right, k=args.bound, cap=args.cap, unroll=unroll))
        )
    if args.verb == "closure":
        print(ex.to_text(exchange.closure(ex.parse(args.expr))))
        return 0
    if args.verb == "pa-build":
        a, _root = au.syntactic_pa(ex.parse(args.expr))
        print(au.dumps(a))
        return 0
    if args.verb == "pa-accepts":
        with open(args.automaton) as fh:
            a = au.loads(fh.read())
        with open(args.pomset) as fh:
            u = pm.loads(fh.read())
        if u.co:
            u = pm.sync_translate(u)
        return _verdict(au.accepts(a, args.state, u))
    if args.verb == "pa-solve":
        with open(args.automaton) as fh:
            a = au.loads(fh.read())
        print(ex.to_text(au.solve(a, args.state)))
        return 0
    if args.verb == "pa-check":
        with open(args.automaton) as fh:
            a = au.loads(fh.read())
        dead = sorted(map(str, au.deadlock_states(a)))
        print("fork-acyclic: %s" % str(au.is_fork_acyclic(a)).lower())
        print("well-nested: %s" % str(au.is_well_nested(a)).lower())
        print("deadlock-states: %s" % json.dumps(dead))
        return 0
    if args.verb == "lts-export":
        system = lt.build_lts(ex.parse(args.expr), args.cap)
        print(lt.to_dot(system) if args.format == "dot" else lt.to_json(system))
        return 0
    raise AssertionError("unhandled verb %r" % args.verb)



def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except CkacError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
