"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest.
"""

import random
import sys
import time
from itertools import product

import numpy as np
import pytest

from simcoal.engines import (brute_force_similarity, classical_predicate, greatest_bisimulation,
                             greatest_classical_sim, greatest_coalgebraic_sim, holds, order_for)
from simcoal.generate import exhaustive_pairs, random_lts, random_pairs
from simcoal.lifting import lax_lift_generic
from simcoal.lts import ActionPartition, all_step_functions, parse_term, unify_alphabets
from simcoal.orders import (Compose, ConfEmpty, ConfNonEmpty, Conformance, CovContra, Equality, Inclusion,
                            Opposite, ReverseInclusion, leq_table)
from simcoal.relation import Relation
from simcoal.stability import (check_factored_lift, check_left_stable, check_op_duality, check_right_stable,
                               check_stable, witness_violates)

AB = ("a", "b")
NONE = frozenset()
CC = CovContra(ActionPartition(frozenset("a"), frozenset("b"), NONE), AB)
SEMANTICS = ("plain", "reverse", "cc", "conformance")


def cc_partition(alphabet):
    # first action covariant, second contravariant
    return ActionPartition(frozenset(alphabet[:1]), frozenset(alphabet[1:2]), frozenset(alphabet[2:]))


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line past pytest's output capture."""

    def emit(number, title, ok, started, note=""):
        elapsed = time.perf_counter() - started
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({elapsed:.2f}s)"
        with capsys.disabled():
            print("\n" + line + (f" - {note}" if note else ""))
        return elapsed

    return emit


def test_criterion_1_worked_examples(verdict):
    t0 = time.perf_counter()
    a, ab = unify_alphabets(parse_term("P = a.0;"), parse_term("P = a.0 + b.0;"))
    apaq, ap = unify_alphabets(parse_term("P = a.b.0 + a.c.0;"), parse_term("P = a.b.0;"))
    results = {
        "a < a+b": holds(a, 0, ab, 0, "conformance"),
        "not a+b < a": not holds(ab, 0, a, 0, "conformance"),
        "ap+aq < ap": holds(apaq, 0, ap, 0, "conformance"),
        "not ap < ap+aq": not holds(ap, 0, apaq, 0, "conformance"),
    }
    # the strict converses are confirmed by exhaustive enumeration of relations
    for x, y in ((ab, a), (ap, apaq)):
        oracle = brute_force_similarity(x, y, classical_predicate(x, y, "conformance"))
        results[f"oracle {x.state_count}x{y.state_count}"] = (0, 0) not in oracle
    ok = all(results.values())
    elapsed = verdict(1, "worked conformance examples", ok and time.perf_counter() - t0 < 1.0, t0,
                      ", ".join(k for k, v in results.items() if not v))
    assert ok, results
    assert elapsed < 1.0


def test_criterion_2_engine_oracle_agreement(verdict):
    t0 = time.perf_counter()
    pairs = list(exhaustive_pairs(max_states=2, max_alphabet=2))
    n_exhaustive = len(pairs)
    pairs += list(random_pairs(seed=20240611, count=500, max_states=3, max_alphabet=2))
    mismatches = []
    for sem in SEMANTICS:
        for x, y in pairs:
            part = cc_partition(x.alphabet) if sem == "cc" else None
            order = order_for(sem, x.alphabet, part)
            classical = greatest_classical_sim(x, y, sem, part)
            generic = greatest_coalgebraic_sim(x, y, order, "generic")
            fast = greatest_coalgebraic_sim(x, y, order, "fast")
            brute = brute_force_similarity(x, y, classical_predicate(x, y, sem, part))
            if not classical == generic == fast == brute:
                mismatches.append((sem, x, y))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60
    verdict(2, f"engine/oracle agreement on {n_exhaustive} exhaustive + 500 random pairs x 4 semantics", ok, t0,
            f"{len(mismatches)} mismatches")
    assert not mismatches, mismatches[:3]
    assert elapsed < 60


def test_criterion_3_stability_verdicts(verdict):
    t0 = time.perf_counter()
    checks = {}
    sizes = [(nx, ny, k) for k in (1, 2) for nx in range(1, 4) for ny in range(1, 4)]
    checks["inclusion right-stable"] = all(check_right_stable(Inclusion, *s).passed for s in sizes)
    checks["reverse left-stable"] = all(check_left_stable(ReverseInclusion, *s).passed for s in sizes)
    checks["equality both"] = all(check_right_stable(Equality, *s).passed and check_left_stable(Equality, *s).passed
                                  for s in sizes)
    report = check_right_stable(ReverseInclusion, 1, 2, 1)
    checks["reverse counterexample"] = (report.verdict == "fail" and report.witness["f"] == [0]
                                        and report.witness["u"] == [[0]] and report.witness["v"] == [[0, 1]]
                                        and witness_violates(report, ReverseInclusion))
    for name, order, alphabets in (("cc", CC, (2,)), ("conformance", Conformance, (1, 2))):
        one_sided = [f(order, 1, 2, k) for f in (check_right_stable, check_left_stable) for k in alphabets]
        checks[f"{name} neither side"] = all(r.verdict == "fail" and witness_violates(r, order) for r in one_sided)
        checks[f"{name} stable"] = all(check_stable(order, 2, 2, 2, 2, k).passed for k in alphabets)
    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and elapsed < 120
    verdict(3, "stability suite verdicts", ok, t0, ", ".join(k for k, v in checks.items() if not v))
    assert all(checks.values()), checks
    assert elapsed < 120


def test_criterion_4_decomposition_laws(verdict):
    t0 = time.perf_counter()
    violations = []
    for k in (1, 2):
        for n in range(0, 5):
            target = leq_table(Conformance, n, k)
            for composite in (Compose(ConfEmpty, ConfNonEmpty), Compose(ConfNonEmpty, ConfEmpty)):
                if not np.array_equal(leq_table(composite, n, k), target):
                    violations.append((composite.name, n, k))
    for n in range(0, 4):
        target = leq_table(CC, n, 2)
        for composite in (Compose(CC.lbar(), CC.rbar()), Compose(CC.rbar(), CC.lbar())):
            if not np.array_equal(leq_table(composite, n, 2), target):
                violations.append((composite.name, n, 2))
    forms = [(Inclusion, Equality, Inclusion, (1,)), (CC, CC.lbar(), CC.rbar(), (2,)),
             (Conformance, ConfNonEmpty, ConfEmpty, (1, 2))]
    for order, left, right, alphabets in forms:
        for k in alphabets:
            for nx, ny in product(range(1, 3), repeat=2):
                if not check_factored_lift(order, left, right, (nx, ny, k)).passed:
                    violations.append(("factored", order.name, nx, ny, k))
    ok = not violations
    verdict(4, "decomposition laws and factored liftings", ok, t0, f"{len(violations)} violations")
    assert ok, violations


def test_criterion_5_similarity_is_a_preorder(verdict):
    t0 = time.perf_counter()
    violations = []
    rng = random.Random(77)
    systems = [random_lts(rng, rng.randint(1, 6), AB, rng.choice((0.1, 0.2, 0.35))) for _ in range(100)]
    stable_orders = [Inclusion, ReverseInclusion, Equality, CC, Conformance]
    for lts in systems:
        for order in stable_orders:
            R = greatest_coalgebraic_sim(lts, lts, order, "fast")
            reflexive = Relation.identity(lts.state_count) <= R
            transitive = R.then(R) <= R
            if not (reflexive and transitive):
                violations.append((order.name, lts))
    ok = not violations
    verdict(5, "similarity is reflexive and transitive on 100 random systems x 5 orders", ok, t0,
            f"{len(violations)} violations")
    assert ok, violations[:3]


def test_criterion_6_specialization_collapse(verdict):
    t0 = time.perf_counter()
    mismatches = 0
    for x, y in exhaustive_pairs(max_states=2, max_alphabet=2):
        acts = frozenset(x.alphabet)
        r_all = ActionPartition(acts, NONE, NONE)
        l_all = ActionPartition(NONE, acts, NONE)
        bi_all = ActionPartition(NONE, NONE, acts)
        mismatches += greatest_classical_sim(x, y, "cc", r_all) != greatest_classical_sim(x, y, "plain")
        mismatches += greatest_classical_sim(x, y, "cc", l_all) != greatest_classical_sim(x, y, "reverse")
        mismatches += greatest_classical_sim(x, y, "cc", bi_all) != greatest_bisimulation(x, y)
    ok = mismatches == 0
    verdict(6, "cc specializations collapse to plain / reverse / bisimulation", ok, t0, f"{mismatches} mismatches")
    assert ok


def test_criterion_7_opposite_duality(verdict):
    t0 = time.perf_counter()
    orders = [Inclusion, ReverseInclusion, Equality, Conformance, ConfEmpty, ConfNonEmpty]
    failures = [o.name for o in orders if not check_op_duality(o, (2, 2, 2, 2, 1)).passed]
    # transpose law, evaluated by witness search
    for order in orders:
        for R in Relation.all(2, 2):
            for u in all_step_functions(2, 1):
                for v in all_step_functions(2, 1):
                    if lax_lift_generic(Opposite(order), R, u, v) != lax_lift_generic(order, R.transpose(), v, u):
                        failures.append(("transpose", order.name, R, u, v))
    ok = not failures
    verdict(7, "op-duality and lifting transpose law at (2,2), one action", ok, t0, f"{len(failures)} failures")
    assert ok, failures[:3]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
