"""Exhaustive finite-carrier checkers for the stability laws of an order.

Every checker enumerates maps, relations and step functions over small
carriers, tabulating the orders and liftings involved, and returns a
:class:`~simcoal.orders.CheckReport`.  A failing report carries the first
counterexample in enumeration order: maps and relations ascend
lexicographically, while step functions are visited from the largest code
down.  :func:`witness_violates` re-checks a witness with the pointwise
definitions, independently of the tables.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

import numpy as np

from ._codes import BudgetExceeded, all_maps, bool_compose, image_codes, onehot, space_size
from .lifting import factored_lift_table, lax_lift_generic, lax_lift_table, rel_lift
from .lts import StepFunction, all_step_functions
from .orders import CheckReport, Compose, FunctorialOrder, Opposite, leq_table
from .relation import Relation

DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class StateMap:
    """A function between finite carriers, as a lookup table."""

    domain_size: int
    codomain_size: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.domain_size:
            raise ValueError("table length must equal domain size")
        if any(not 0 <= t < self.codomain_size for t in self.table):
            raise ValueError("table entry outside codomain")

    @classmethod
    def all(cls, domain: int, codomain: int) -> Iterator["StateMap"]:
        for table in all_maps(domain, codomain):
            yield cls(domain, codomain, table)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def image(self, xs) -> frozenset[int]:
        return frozenset(self.table[x] for x in xs)

    def preimage(self, ys) -> frozenset[int]:
        return frozenset(x for x in range(self.domain_size) if self.table[x] in ys)

    def step(self, u: StepFunction) -> StepFunction:
        """``Ff(u)``."""
        if u.carrier_size != self.domain_size:
            raise ValueError("step function not over the map's domain")
        return u.image(self.table, self.codomain_size)


def _sf(code, carrier, k) -> list[list[int]]:
    return StepFunction.from_code(int(code), carrier, k).to_lists()


def _first_desc(mask: np.ndarray) -> tuple[int, int]:
    """First true cell visiting rows, then columns, from the largest index down."""
    hits = np.argwhere(mask)
    i = np.lexsort((-hits[:, 1], -hits[:, 0]))[0]
    return int(hits[i, 0]), int(hits[i, 1])


def _charge(count: int, budget: int, what: str) -> None:
    if count > budget:
        raise BudgetExceeded(f"{what}: {count} instances exceed budget {budget}")


def _params(order, sizes, k, **extra):
    return {"order": order.name, "sizes": list(sizes), "alphabet": k, **extra}


def check_right_stable(order: FunctorialOrder, size_x: int, size_y: int, alphabet_size: int,
                       budget: int = DEFAULT_BUDGET) -> CheckReport:
    """For every ``f: X -> Y`` and ``v ⊑_Y Ff(u)`` some ``u' ⊑_X u`` has ``Ff(u') = v``."""
    return _one_sided(order, size_x, size_y, alphabet_size, budget, right=True)


def check_left_stable(order: FunctorialOrder, size_x: int, size_y: int, alphabet_size: int,
                      budget: int = DEFAULT_BUDGET) -> CheckReport:
    """For every ``f: X -> Y`` and ``Ff(u) ⊑_Y v`` some ``u ⊑_X u'`` has ``Ff(u') = v``."""
    return _one_sided(order, size_x, size_y, alphabet_size, budget, right=False)


def _one_sided(order, nx, ny, k, budget, right):
    law = "right-stable" if right else "left-stable"
    tx, ty = leq_table(order, nx, k), leq_table(order, ny, k)
    total = ny ** nx * tx.shape[0] * ty.shape[0]
    _charge(total, budget, law)
    params = _params(order, (nx, ny), k)
    for f in all_maps(nx, ny):
        img = image_codes(f, ny, k)
        hit = onehot(img, ty.shape[0])          # hit[u', v] iff Ff(u') = v
        if right:
            premise = ty[:, img].T              # [u, v]: v ⊑ Ff(u)
            reach = bool_compose(tx.T, hit)     # [u, v]: some u' ⊑ u with Ff(u') = v
        else:
            premise = ty[img, :]                # [u, v]: Ff(u) ⊑ v
            reach = bool_compose(tx, hit)       # [u, v]: some u ⊑ u' with Ff(u') = v
        bad = premise & ~reach
        if bad.any():
            u, v = _first_desc(bad)
            return CheckReport(law, "fail", params, {
                "carriers": [nx, ny], "alphabet": k, "f": list(f),
                "u": _sf(u, nx, k), "v": _sf(v, ny, k)}, total)
    return CheckReport(law, "pass", params, None, total)


def _stable_instances(order, nx, ny, nz, nw, k, budget, sample, seed):
    per = space_size(nx, k) * space_size(ny, k)
    n_maps = nz ** nx * nw ** ny
    n_rel = 1 << (nz * nw)
    total = n_maps * n_rel * per
    if total <= budget:
        combos = ((f, g, code) for f in all_maps(nx, nz) for g in all_maps(ny, nw) for code in range(n_rel))
        return combos, total, True
    if not sample:
        raise BudgetExceeded(f"stable: {total} instances exceed budget {budget}; enable sampling")
    rng = random.Random(seed)
    draws = max(1, budget // per)
    combos = ((tuple(rng.randrange(nz) for _ in range(nx)), tuple(rng.randrange(nw) for _ in range(ny)),
               rng.randrange(n_rel)) for _ in range(draws))
    return combos, draws * per, False


def _stable_tables(order, f, g, R, k):
    nx, ny = len(f), len(g)
    lhs = lax_lift_table(order, R.preimage(f, g), k)
    img_f, img_g = image_codes(f, R.rows, k), image_codes(g, R.cols, k)
    rhs = lax_lift_table(order, R, k)[np.ix_(img_f, img_g)]
    assert lhs.shape == (space_size(nx, k), space_size(ny, k))
    return lhs, rhs


def check_stable(order: FunctorialOrder, size_x: int, size_y: int, size_z: int, size_w: int,
                 alphabet_size: int, budget: int = DEFAULT_BUDGET, sample: bool = False,
                 seed: int = 0) -> CheckReport:
    """``Rel_⊑((f×g)^{-1} R) = (Ff × Fg)^{-1} Rel_⊑(R)`` for every ``f, g, R``.

    The inclusion ``⊆`` is expected to always hold and is checked as well.
    Above ``budget`` instances, ``sample=True`` draws ``(f, g, R)`` uniformly
    with ``seed`` instead of raising.
    """
    k = alphabet_size
    sizes = (size_x, size_y, size_z, size_w)
    combos, total, exhaustive = _stable_instances(order, *sizes, k, budget, sample, seed)
    params = _params(order, sizes, k)
    report_seed = None if exhaustive else seed
    for f, g, code in combos:
        R = Relation.from_code(code, size_z, size_w)
        lhs, rhs = _stable_tables(order, f, g, R, k)
        for kind, bad in (("inclusion", lhs & ~rhs), ("substitution", rhs & ~lhs)):
            if bad.any():
                u, v = _first_desc(bad)
                return CheckReport("stable", "fail", params, {
                    "kind": kind, "carriers": list(sizes), "alphabet": k, "f": list(f), "g": list(g),
                    "R": [list(p) for p in R.pairs()], "u": _sf(u, size_x, k), "v": _sf(v, size_y, k)},
                    total, exhaustive, report_seed)
    return CheckReport("stable", "pass", params, None, total, exhaustive, report_seed)


def check_interchange(order: FunctorialOrder, size_x: int, size_y: int, alphabet_size: int,
                      budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Inclusion ``Rel(R) ∘ ⊑_X ⊆ ⊑_Y ∘ Rel(R)`` and equality
    ``⊑_Y ∘ Rel(R) ∘ ⊑_X = ⊑_Y ∘ Rel(R)``, reported separately in ``details``."""
    from .lifting import rel_lift_table

    k = alphabet_size
    tx, ty = leq_table(order, size_x, k), leq_table(order, size_y, k)
    total = (1 << (size_x * size_y)) * tx.shape[0] * ty.shape[0]
    _charge(total, budget, "interchange")
    params = _params(order, (size_x, size_y), k)
    details = {"inclusion": True, "equality": True}
    witness = None
    for R in Relation.all(size_x, size_y):
        rl = rel_lift_table(R, k)
        left_then = bool_compose(tx, rl)       # u ⊑ u' Rel v
        then_right = bool_compose(rl, ty)      # u Rel v' ⊑ v
        both = bool_compose(left_then, ty)
        if details["inclusion"] and (left_then & ~then_right).any():
            details["inclusion"] = False
            u, v = _first_desc(left_then & ~then_right)
            witness = {"kind": "inclusion", "carriers": [size_x, size_y], "alphabet": k, "R": [list(p) for p in R.pairs()],
                       "u": _sf(u, size_x, k), "v": _sf(v, size_y, k)}
        if details["equality"] and (both != then_right).any():
            details["equality"] = False
            u, v = _first_desc(both != then_right)
            details["equality_witness"] = {"R": [list(p) for p in R.pairs()], "u": _sf(u, size_x, k), "v": _sf(v, size_y, k)}
            if witness is None:
                witness = {"kind": "equality", "carriers": [size_x, size_y], "alphabet": k, "R": [list(p) for p in R.pairs()],
                           "u": _sf(u, size_x, k), "v": _sf(v, size_y, k)}
    verdict = "pass" if details["inclusion"] and details["equality"] else "fail"
    return CheckReport("interchange", verdict, params, witness, total, details=details)


def check_commute(order_a: FunctorialOrder, order_b: FunctorialOrder, carrier_size: int,
                  alphabet_size: int) -> CheckReport:
    """``order_a ∘ order_b = order_b ∘ order_a`` pointwise."""
    k = alphabet_size
    ab = leq_table(Compose(order_a, order_b), carrier_size, k)
    ba = leq_table(Compose(order_b, order_a), carrier_size, k)
    params = {"orders": [order_a.name, order_b.name], "sizes": [carrier_size], "alphabet": k}
    diff = ab != ba
    if diff.any():
        u, v = _first_desc(diff)
        return CheckReport("commute", "fail", params, {
            "carriers": [carrier_size], "alphabet": k, "u": _sf(u, carrier_size, k), "v": _sf(v, carrier_size, k),
            "a_after_b": bool(ab[u, v]), "b_after_a": bool(ba[u, v])}, ab.size)
    return CheckReport("commute", "pass", params, None, ab.size)


def check_factored_lift(order: FunctorialOrder, left_factor: FunctorialOrder, right_factor: FunctorialOrder,
                        sizes: Sequence[int], budget: int = DEFAULT_BUDGET) -> CheckReport:
    """``⊑_Y ∘ Rel(R) ∘ ⊑_X = right_Y ∘ Rel(R) ∘ left_X`` for every ``R``.

    ``sizes`` is ``(x, y, alphabet)``.
    """
    size_x, size_y, k = sizes
    total = (1 << (size_x * size_y)) * space_size(size_x, k) * space_size(size_y, k)
    _charge(total, budget, "factored lift")
    params = {"order": order.name, "left": left_factor.name, "right": right_factor.name,
              "sizes": [size_x, size_y], "alphabet": k}
    for R in Relation.all(size_x, size_y):
        full = lax_lift_table(order, R, k)
        factored = factored_lift_table(left_factor, right_factor, R, k)
        diff = full != factored
        if diff.any():
            u, v = _first_desc(diff)
            return CheckReport("factored-lift", "fail", params, {
                "carriers": [size_x, size_y], "alphabet": k, "R": [list(p) for p in R.pairs()],
                "u": _sf(u, size_x, k), "v": _sf(v, size_y, k),
                "full": bool(full[u, v]), "factored": bool(factored[u, v])}, total)
    return CheckReport("factored-lift", "pass", params, None, total)


def _carrier_pairs(sizes: Sequence[int]):
    values = sorted(set(sizes))
    return [(a, b) for a in values for b in values]


def check_composition_stability(order_a: FunctorialOrder, order_b: FunctorialOrder, sizes: Sequence[int],
                                law: str = "right", budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Composite of two stable-ish orders, after verifying the hypotheses.

    ``law='right'`` / ``'left'``: both orders right- (left-) stable, sizes
    ``(x, y, alphabet)``; the composite must be right- (left-) stable.
    ``law='stable'``: one order right-stable, the other left-stable, and the two
    commute; sizes ``(x, y, z, w, alphabet)``; the composite must be stable.
    A failed hypothesis gives an ``inconclusive`` report.
    """
    *carriers, k = sizes
    composite = Compose(order_a, order_b)
    params = {"orders": [order_a.name, order_b.name], "law": law, "sizes": list(carriers), "alphabet": k}
    pairs = _carrier_pairs(carriers)

    def holds_everywhere(order, one_sided):
        return all(one_sided(order, p, q, k, budget).passed for p, q in pairs)

    if law in ("right", "left"):
        one_sided = check_right_stable if law == "right" else check_left_stable
        failed = [o.name for o in (order_a, order_b) if not holds_everywhere(o, one_sided)]
        if failed:
            return CheckReport("composition-" + law, "inconclusive", params,
                               details={"precondition": f"not {law}-stable: {failed}"})
        size_x, size_y = carriers
        inner = one_sided(composite, size_x, size_y, k, budget)
    elif law == "stable":
        rs = [holds_everywhere(o, check_right_stable) for o in (order_a, order_b)]
        ls = [holds_everywhere(o, check_left_stable) for o in (order_a, order_b)]
        mixed = (rs[0] and ls[1]) or (ls[0] and rs[1])
        commute = all(check_commute(order_a, order_b, n, k).passed for n in sorted(set(carriers)))
        if not (mixed and commute):
            return CheckReport("composition-stable", "inconclusive", params, details={
                "precondition": "need one right-stable and one left-stable order that commute",
                "right_stable": rs, "left_stable": ls, "commute": commute})
        inner = check_stable(composite, *carriers, k, budget)
    else:
        raise ValueError(f"unknown composition law {law!r}")
    return CheckReport("composition-" + law, inner.verdict, params, inner.witness, inner.instances,
                       inner.exhaustive, inner.seed, {"composite": composite.name})


def check_op_duality(order: FunctorialOrder, sizes: Sequence[int], budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Stability of ``order`` and of its opposite agree instance by instance.

    Instance ``(f, g, R)`` of ``order`` over ``(X, Y, Z, W)`` corresponds to
    ``(g, f, R^T)`` of the opposite over ``(Y, X, W, Z)``.  ``sizes`` is
    ``(x, y, z, w, alphabet)``.
    """
    nx, ny, nz, nw, k = sizes
    opposite = Opposite(order)
    total = nz ** nx * nw ** ny * (1 << (nz * nw)) * space_size(nx, k) * space_size(ny, k)
    _charge(2 * total, budget, "op duality")
    params = _params(order, sizes[:4], k)
    verdicts = {"order": True, "opposite": True}
    for f in all_maps(nx, nz):
        for g in all_maps(ny, nw):
            for R in Relation.all(nz, nw):
                lhs, rhs = _stable_tables(order, f, g, R, k)
                lhs_op, rhs_op = _stable_tables(opposite, g, f, R.transpose(), k)
                ok, ok_op = bool((lhs == rhs).all()), bool((lhs_op == rhs_op).all())
                verdicts["order"] &= ok
                verdicts["opposite"] &= ok_op
                if ok != ok_op:
                    return CheckReport("op-duality", "fail", params, {
                        "carriers": [nx, ny, nz, nw], "alphabet": k, "f": list(f), "g": list(g), "R": [list(p) for p in R.pairs()],
                        "order_stable": ok, "opposite_stable": ok_op}, 2 * total, details=verdicts)
    return CheckReport("op-duality", "pass", params, None, 2 * total, details=verdicts)


# -- independent re-evaluation of witnesses ----------------------------------------

def _step(lists, carrier) -> StepFunction:
    return StepFunction(carrier, tuple(frozenset(s) for s in lists))


def witness_violates(report: CheckReport, order: FunctorialOrder,
                     other: Optional[FunctorialOrder] = None) -> bool:
    """Re-check a failing report's witness with pointwise definitions only.

    ``order`` is the order the report was produced for; ``other`` is the second
    order of a commutation or the (left, right) factors of a factored lift.
    """
    w = report.witness
    if w is None:
        return False
    law = report.law
    if law in ("right-stable", "left-stable") or law.startswith("composition-") and "f" in w and "g" not in w:
        nx, ny = w["carriers"]
        f = StateMap(nx, ny, w["f"])
        u, v = _step(w["u"], nx), _step(w["v"], ny)
        k = u.alphabet_size
        if law == "right-stable" or law == "composition-right":
            return order.leq(v, f.step(u)) and not any(
                f.step(u2) == v and order.leq(u2, u) for u2 in all_step_functions(nx, k))
        return order.leq(f.step(u), v) and not any(
            f.step(u2) == v and order.leq(u, u2) for u2 in all_step_functions(nx, k))
    if law == "stable" or law == "composition-stable":
        nx, ny, nz, nw = w["carriers"]
        f, g = StateMap(nx, nz, w["f"]), StateMap(ny, nw, w["g"])
        R = Relation.from_pairs(nz, nw, map(tuple, w["R"]))
        u, v = _step(w["u"], nx), _step(w["v"], ny)
        return lax_lift_generic(order, R.preimage(f.table, g.table), u, v) != \
            lax_lift_generic(order, R, f.step(u), g.step(v))
    if law == "interchange":
        nx, ny = w["carriers"]
        R = Relation.from_pairs(nx, ny, map(tuple, w["R"]))
        u, v = _step(w["u"], nx), _step(w["v"], ny)
        k = u.alphabet_size
        left_then = any(order.leq(u, u2) and rel_lift(R, u2, v) for u2 in all_step_functions(nx, k))
        then_right = any(rel_lift(R, u, v2) and order.leq(v2, v) for v2 in all_step_functions(ny, k))
        if w["kind"] == "inclusion":
            return left_then and not then_right
        return lax_lift_generic(order, R, u, v) != then_right
    if law == "commute":
        (n,) = w["carriers"]
        u, v = _step(w["u"], n), _step(w["v"], n)
        return Compose(order, other).leq(u, v) != Compose(other, order).leq(u, v)
    if law == "factored-lift":
        left, right = other
        nx, ny = w["carriers"]
        R = Relation.from_pairs(nx, ny, map(tuple, w["R"]))
        u, v = _step(w["u"], nx), _step(w["v"], ny)
        k = u.alphabet_size
        factored = any(left.leq(u, u2) and right.leq(v2, v) and rel_lift(R, u2, v2)
                       for u2 in all_step_functions(nx, k) for v2 in all_step_functions(ny, k))
        return lax_lift_generic(order, R, u, v) != factored
    if law == "op-duality":
        nx, ny, nz, nw = w["carriers"]
        k = report.params["alphabet"]
        R = Relation.from_pairs(nz, nw, map(tuple, w["R"]))

        def instance_ok(o, f, g, rel, cx, cy):
            fm, gm = StateMap(cx, rel.rows, f), StateMap(cy, rel.cols, g)
            pre = rel.preimage(f, g)
            return all(lax_lift_generic(o, pre, u, v) == lax_lift_generic(o, rel, fm.step(u), gm.step(v))
                       for u, v in product(all_step_functions(cx, k), all_step_functions(cy, k)))

        return instance_ok(order, w["f"], w["g"], R, nx, ny) != \
            instance_ok(Opposite(order), w["g"], w["f"], R.transpose(), ny, nx)
    if law == "preorder":
        n = w["carrier"]
        u = _step(w["u"], n)
        if w["kind"] == "reflexivity":
            return not order.leq(u, u)
        m, v = _step(w["w"], n), _step(w["v"], n)
        return order.leq(u, m) and order.leq(m, v) and not order.leq(u, v)
    if law == "functorial":
        nx, ny = w["carriers"]
        f = StateMap(nx, ny, w["f"])
        u, u2 = _step(w["u"], nx), _step(w["u2"], nx)
        return order.leq(u, u2) and not order.leq(f.step(u), f.step(u2))
    raise ValueError(f"no re-evaluation for law {law!r}")
