import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simcoal._codes import BudgetExceeded
from simcoal.lts import ActionPartition, StepFunction, all_step_functions
from simcoal.orders import (CheckReport, Compose, ConfEmpty, ConfNonEmpty, Conformance, CovContra, Equality,
                            FunctorialOrder, Inclusion, Opposite, Product, ReverseInclusion, check_functorial,
                            check_preorder, leq, leq_table, make_order)
from simcoal.stability import witness_violates

AB = ("a", "b")
CC = CovContra(ActionPartition(frozenset("a"), frozenset("b"), frozenset()), AB)
BUILTINS = [Inclusion, ReverseInclusion, Equality, Conformance, ConfEmpty, ConfNonEmpty]


def sf(n, *sets):
    return StepFunction.of(n, *sets)


def test_conformance_examples():
    assert leq(Conformance, sf(4, set(), {1, 2}), sf(4, {3}, {1}))
    assert not leq(Conformance, sf(2, {1}), sf(2, set()))


def test_cc_example():
    assert leq(CC, sf(3, {1}, {1, 2}), sf(3, {1, 2}, {2}))
    assert not leq(CC, sf(3, {1, 2}, {1, 2}), sf(3, {1}, {2}))


def test_primitive_semantics():
    u, v = sf(3, {0}), sf(3, {0, 1})
    assert leq(Inclusion, u, v) and not leq(Inclusion, v, u)
    assert leq(ReverseInclusion, v, u)
    assert leq(Equality, u, u) and not leq(Equality, u, v)
    # empty left side escapes both conformance components
    assert leq(ConfEmpty, sf(3, set()), v)
    assert not leq(ConfEmpty, u, v)
    assert leq(ConfNonEmpty, v, u)
    assert not leq(ConfNonEmpty, sf(3, set()), v)
    # the reflexive escape keeps the empty set related to itself
    assert leq(ConfNonEmpty, sf(3, set()), sf(3, set()))


def test_mismatched_step_functions():
    with pytest.raises(ValueError):
        leq(Inclusion, sf(2, {0}), sf(3, {0}))
    with pytest.raises(ValueError):
        leq(Inclusion, sf(2, {0}), sf(2, {0}, {1}))


@pytest.mark.parametrize("order, n, k", [(Conformance, 3, 1), (Inclusion, 3, 2), (ConfEmpty, 4, 1)])
def test_check_preorder_examples(order, n, k):
    report = check_preorder(order, n, k)
    assert report.passed, report.witness


@pytest.mark.parametrize("order, nx, ny, k", [(Inclusion, 2, 2, 1), (Conformance, 2, 2, 1), (CC, 2, 2, 2)])
def test_check_functorial_examples(order, nx, ny, k):
    assert check_functorial(order, nx, ny, k).passed


@pytest.mark.parametrize("order", BUILTINS + [CC], ids=str)
def test_builtins_are_functorial_preorders(order):
    ks = (2,) if order is CC else (1, 2)
    for k in ks:
        for n in range(4 if k == 1 else 3):
            assert check_preorder(order, n, k).passed
        for nx in range(1, 4 if k == 1 else 3):
            for ny in range(1, 4 if k == 1 else 3):
                assert check_functorial(order, nx, ny, k).passed


class _Pointwise(FunctorialOrder):
    """An order given only by a predicate, for exercising failures."""

    def __init__(self, name, pred):
        self._name, self._pred = name, pred

    def leq(self, u, v):
        return self._pred(u, v)

    @property
    def name(self):
        return self._name


def test_preorder_failure_has_valid_witness():
    broken = Product(("inclusion",))
    report = check_preorder(Compose(broken, Opposite(broken)), 1, 1)
    assert report.passed  # the composite relates everything, still a preorder
    strict = _Pointwise("strict", lambda u, v: Inclusion.leq(u, v) and u != v)
    report = check_preorder(strict, 1, 1)
    assert report.verdict == "fail"
    assert report.witness["kind"] == "reflexivity"
    assert witness_violates(report, strict)


def test_functorial_failure_has_valid_witness():
    # comparing successor counts is a preorder, but collapsing maps break it
    order = _Pointwise("count", lambda u, v: len(u[0]) <= len(v[0]))
    report = check_functorial(order, 2, 1, 1)
    assert report.verdict == "pass"  # a one-point codomain cannot separate
    report = check_preorder(order, 2, 1)
    assert report.passed
    report = check_functorial(order, 3, 2, 1)
    assert report.verdict == "fail"
    assert witness_violates(report, order)


def test_budget_cap():
    with pytest.raises(BudgetExceeded):
        leq_table(Inclusion, 7, 2)
    assert leq_table(Inclusion, 3, 2, cap=64).shape == (64, 64)
    with pytest.raises(BudgetExceeded):
        leq_table(Inclusion, 3, 2, cap=63)


def test_compose_reads_right_to_left():
    # u (A ∘ B) v iff u B w A v: first a superset step then any subset
    up_then_down = Compose(ReverseInclusion, Inclusion)
    assert leq(up_then_down, sf(2, {0}), sf(2, {1}))
    tight = Compose(Equality, Inclusion)
    assert leq(tight, sf(2, {0}), sf(2, {0, 1}))
    assert not leq(tight, sf(2, {0, 1}), sf(2, {0}))


def test_opposite_involution():
    for order in BUILTINS:
        a = leq_table(Opposite(Opposite(order)), 2, 2)
        assert np.array_equal(a, leq_table(order, 2, 2))
        assert np.array_equal(leq_table(Opposite(order), 2, 2), leq_table(order, 2, 2).T)


def test_cc_specializations():
    for k, alphabet in ((1, ("a",)), (2, AB)):
        acts = frozenset(alphabet)
        none = frozenset()
        for part, expected in ((ActionPartition(acts, none, none), Inclusion),
                               (ActionPartition(none, acts, none), Opposite(Inclusion)),
                               (ActionPartition(none, none, acts), Equality)):
            order = CovContra(part, alphabet)
            for n in range(4 if k == 1 else 3):
                assert np.array_equal(leq_table(order, n, k), leq_table(expected, n, k))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_conformance_is_composite_of_components(n):
    target = leq_table(Conformance, n, 1)
    assert np.array_equal(leq_table(Compose(ConfEmpty, ConfNonEmpty), n, 1), target)
    assert np.array_equal(leq_table(Compose(ConfNonEmpty, ConfEmpty), n, 1), target)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cc_is_composite_of_bars(n):
    target = leq_table(CC, n, 2)
    assert np.array_equal(leq_table(Compose(CC.lbar(), CC.rbar()), n, 2), target)
    assert np.array_equal(leq_table(Compose(CC.rbar(), CC.lbar()), n, 2), target)


def test_cc_bars_with_bisimulation_actions():
    order = CovContra(ActionPartition(frozenset("a"), frozenset("b"), frozenset("c")), ("a", "b", "c"))
    assert order.lbar() == Product(("equality", "reverse", "equality"))
    assert order.rbar() == Product(("inclusion", "equality", "equality"))
    assert order.factors() == (order.lbar(), order.rbar())


def test_factors():
    assert Conformance.factors() == (ConfNonEmpty, ConfEmpty)
    assert Inclusion.factors() == (Equality, Inclusion)
    assert ReverseInclusion.factors() == (ReverseInclusion, Equality)
    left, right = Opposite(Inclusion).factors()
    assert np.array_equal(leq_table(left, 2, 1), leq_table(ReverseInclusion, 2, 1))
    assert np.array_equal(leq_table(right, 2, 1), leq_table(Equality, 2, 1))


def test_pointwise_compose_matches_table():
    order = Compose(ConfEmpty, ConfNonEmpty)
    t = leq_table(order, 2, 1)
    for u in all_step_functions(2, 1):
        for v in all_step_functions(2, 1):
            assert order.leq(u, v) == t[u.code(), v.code()]


def test_make_order_expressions(tmp_path):
    part = tmp_path / "part.json"
    part.write_text(json.dumps({"r": ["a"], "l": ["b"], "bi": []}))
    assert make_order("inclusion") == Inclusion
    assert make_order("op(inclusion)") == Opposite(Inclusion)
    assert make_order(" compose( conf_empty , conf_nonempty ) ") == Compose(ConfEmpty, ConfNonEmpty)
    assert make_order("product(inclusion,reverse)") == Product(("inclusion", "reverse"))
    assert make_order(f"cc({part})", AB) == CC
    assert make_order(f"lbar({part})", AB) == CC.lbar()
    assert make_order(f"rbar({part})", AB) == CC.rbar()
    assert np.array_equal(leq_table(make_order("op(inclusion)"), 2, 1), leq_table(ReverseInclusion, 2, 1))


@pytest.mark.parametrize("expr", ["bogus", "compose(inclusion)", "op(inclusion", "inclusion extra", "product()"])
def test_make_order_rejects(expr):
    with pytest.raises(ValueError):
        make_order(expr)


def test_make_order_invalid_partition(tmp_path):
    part = tmp_path / "part.json"
    part.write_text(json.dumps({"r": ["a"], "l": [], "bi": []}))
    with pytest.raises(ValueError):
        make_order(f"cc({part})", AB)


def test_report_round_trip():
    report = check_preorder(Conformance, 2, 1)
    assert CheckReport.from_json(report.to_json()) == report
    assert report.label == "pass (exhaustive up to sizes [2])"
    with pytest.raises(ValueError):
        CheckReport("x", "fail")
    with pytest.raises(ValueError):
        CheckReport("x", "maybe")


step_functions = st.integers(1, 3).flatmap(
    lambda n: st.tuples(*[st.builds(lambda c: StepFunction.from_code(c, n, 2), st.integers(0, 4 ** n - 1))] * 3))


@settings(max_examples=200, deadline=None)
@given(step_functions)
def test_conformance_transitive_samples(triple):
    u, w, v = triple
    if leq(Conformance, u, w) and leq(Conformance, w, v):
        assert leq(Conformance, u, v)
