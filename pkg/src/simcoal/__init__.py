"""Coalgebraic simulations over finite labelled transition systems.

Systems are coalgebras ``X -> P(X)^A``; a functorial order on step functions
selects a notion of simulation through the lax relation lifting.
"""

from .engines import (brute_force_similarity, classical_predicate, greatest_bisimulation,
                      greatest_classical_sim, greatest_coalgebraic_sim, greatest_relation, holds, order_for)
from .lifting import lax_lift_fast, lax_lift_generic, lax_lift_table, rel_lift
from .lts import (ActionPartition, Lts, ParseError, StepFunction, initials, load_lts, parse_aut, parse_native,
                  parse_term, serialize_aut, serialize_native, serialize_term, step_of, unify_alphabets)
from .orders import (CheckReport, Compose, ConfEmpty, ConfNonEmpty, Conformance, CovContra, Equality,
                     FunctorialOrder, Inclusion, Opposite, Product, ReverseInclusion, leq, make_order)
from .relation import Relation
from .stability import (StateMap, check_commute, check_composition_stability, check_factored_lift,
                        check_interchange, check_left_stable, check_op_duality, check_right_stable, check_stable,
                        witness_violates)

__version__ = "0.1.0"

__all__ = [
    "ActionPartition",
    "CheckReport",
    "Compose",
    "ConfEmpty",
    "ConfNonEmpty",
    "Conformance",
    "CovContra",
    "Equality",
    "FunctorialOrder",
    "Inclusion",
    "Lts",
    "Opposite",
    "ParseError",
    "Product",
    "Relation",
    "ReverseInclusion",
    "StateMap",
    "StepFunction",
    "brute_force_similarity",
    "check_commute",
    "check_composition_stability",
    "check_factored_lift",
    "check_interchange",
    "check_left_stable",
    "check_op_duality",
    "check_right_stable",
    "check_stable",
    "classical_predicate",
    "greatest_bisimulation",
    "greatest_classical_sim",
    "greatest_coalgebraic_sim",
    "greatest_relation",
    "holds",
    "initials",
    "lax_lift_fast",
    "lax_lift_generic",
    "lax_lift_table",
    "leq",
    "load_lts",
    "make_order",
    "order_for",
    "parse_aut",
    "parse_native",
    "parse_term",
    "rel_lift",
    "serialize_aut",
    "serialize_native",
    "serialize_term",
    "step_of",
    "unify_alphabets",
    "witness_violates",
]
