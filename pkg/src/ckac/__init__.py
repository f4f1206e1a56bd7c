"""Pomsets with communications: rational expressions over true concurrency.

The package provides labelled posets with separate execution and
communication orders, their finite languages, series-communication
(-parallel) rational expressions with a small-step semantics, five
equivalence checkers (bounded language equality and step, bounded-pomset,
hp- and hhp-bisimilarity), the exchange-law closure, and pomset automata
with fork and merge transitions realizing both directions of the Kleene
correspondence.
"""

from .comm import (
    CommTable,
    active_comm_table,
    set_comm_table,
    using_comm_table,
)
from .pomset import (
    LabelledPoset,
    Pomset,
    canonicalize,
    compose_comm,
    compose_conc,
    compose_par,
    compose_seq,
    depth,
    empty,
    is_n_free,
    is_scp,
    isomorphic,
    par_factorize,
    primitive,
    seq_factorize,
    subsumes,
    sync_translate,
    width,
)
from .language import (
    PomsetLanguage,
    h_closure_bounded,
    lang_compose,
    lang_parstar_bounded,
    lang_star_bounded,
    subsumption_closure,
)
from .expr import (
    Act,
    Alt,
    CommAct,
    Conc,
    Expr,
    LMerge,
    Merge,
    ONE,
    One,
    Par,
    ParStar,
    Seq,
    Star,
    ZERO,
    Zero,
    conc_depth,
    dagger_depth,
    nullable,
    parse,
    to_text,
)
from .semantics import denote_bounded, lang_equiv_bounded, member
from .lts import Lts, Multi, Single, StepLabel, Sync, build_lts, steps, terminates
from .bisim import (
    Relation,
    hhp_bisimilar,
    hp_bisimilar,
    pomset_bisimilar_bounded,
    simulates,
    step_bisimilar,
)
from .automata import (
    LinearSystem,
    PomsetAutomaton,
    accepts,
    deadlock_states,
    is_fork_acyclic,
    is_well_nested,
    language_bounded,
    restrict,
    solve,
    solve_linear_system,
    support,
    syntactic_pa,
)
from .exchange import (
    Hypothesis,
    SplitPair,
    closure,
    closure_conc,
    equiv_modulo_exchs_bounded,
    par_split,
    preclosure,
    seq_split,
)
from . import errors

__version__ = "0.1.0"
