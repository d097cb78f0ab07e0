"""Greatest simulations by monotone refinement, plus a brute-force oracle.

All engines start from the full relation ``X × Y`` and delete every pair
violating its step condition against the current relation, sweep after sweep,
until nothing changes.  Because each step condition is monotone in the
relation, the result is the greatest post-fixed point, i.e. the similarity.
"""

from __future__ import annotations

import logging
from typing import Callable, Optional, Union

from .lifting import lax_lift_table, lift_by_modes, semantic_modes
from .lts import ActionPartition, Lts, mask_members
from .orders import (Conformance, CovContra, Equality, FunctorialOrder, Inclusion, ReverseInclusion,
                     Uniform)
from .relation import Relation

log = logging.getLogger(__name__)

SEMANTICS = ("plain", "reverse", "cc", "conformance", "bisim")
BRUTE_FORCE_CAP = 16

StepPredicate = Callable[[Relation, int, int], bool]


def _require_shared_alphabet(lts_x: Lts, lts_y: Lts) -> None:
    if lts_x.alphabet != lts_y.alphabet:
        raise ValueError(f"alphabets differ: {list(lts_x.alphabet)} vs {list(lts_y.alphabet)}; unify them first")


def refine(rows: int, cols: int, step_ok: StepPredicate,
           history: Optional[list] = None) -> Relation:
    """Greatest relation closed under ``step_ok`` by pair deletion.

    If ``history`` is a list, every intermediate relation (starting with the
    full one) is appended to it.
    """
    current = Relation.full(rows, cols)
    if history is not None:
        history.append(current)
    while True:
        keep = list(current.row_masks())
        for x, row in enumerate(keep):
            for y in mask_members(row):
                if not step_ok(current, x, y):
                    keep[x] &= ~(1 << y)
        nxt = Relation.from_rows(keep, cols)
        if nxt == current:
            return current
        current = nxt
        if history is not None:
            history.append(current)


def order_for(semantics: str, alphabet=None, partition: Optional[ActionPartition] = None) -> FunctorialOrder:
    """The functorial order whose coalgebraic simulations are ``semantics``."""
    if semantics == "plain":
        return Inclusion
    if semantics == "reverse":
        return ReverseInclusion
    if semantics == "conformance":
        return Conformance
    if semantics == "bisim":
        return Equality
    if semantics == "cc":
        if partition is None or alphabet is None:
            raise ValueError("cc semantics needs a partition")
        return CovContra(partition, tuple(alphabet))
    raise ValueError(f"unknown semantics {semantics!r}")


def semantics_for(order: FunctorialOrder) -> Optional[Union[str, CovContra]]:
    """Inverse of :func:`order_for` on built-in orders, else ``None``."""
    if isinstance(order, CovContra):
        return order
    if isinstance(order, Uniform):
        return {"inclusion": "plain", "reverse": "reverse", "conformance": "conformance",
                "equality": "bisim"}.get(order.kind)
    return None


def classical_predicate(lts_x: Lts, lts_y: Lts, semantics: str,
                        partition: Optional[ActionPartition] = None) -> StepPredicate:
    """Transfer conditions of the concrete (transition-level) definitions."""
    _require_shared_alphabet(lts_x, lts_y)
    if semantics == "cc" and partition is None:
        raise ValueError("cc semantics needs a partition")
    k = len(lts_x.alphabet)
    modes = semantic_modes(semantics, k, partition, lts_x.alphabet)

    forward = [modes is not None and modes[a] in ("r", "bi") for a in range(k)]
    backward = [modes is None or modes[a] in ("l", "bi") for a in range(k)]
    succ_x, succ_y = lts_x.steps, lts_y.steps

    def sim_step(R: Relation, x: int, y: int) -> bool:
        rows = R.row_masks()
        ux, vy = succ_x[x], succ_y[y]
        for a in range(k):
            xs, ys = ux.per_action[a], vy.per_action[a]
            if modes is None:
                # I(x) ⊆ I(y), and where x moves every y-move is answered.
                if not xs:
                    continue
                if not ys:
                    return False
            if forward[a]:
                my = vy.masks()[a]
                for x2 in xs:
                    if not rows[x2] & my:
                        return False
            if backward[a]:
                for y2 in ys:
                    if not any(rows[x2] >> y2 & 1 for x2 in xs):
                        return False
        return True

    return sim_step


def greatest_classical_sim(lts_x: Lts, lts_y: Lts, semantics: str,
                           partition: Optional[ActionPartition] = None,
                           history: Optional[list] = None) -> Relation:
    return refine(lts_x.state_count, lts_y.state_count,
                  classical_predicate(lts_x, lts_y, semantics, partition), history)


def greatest_bisimulation(lts_x: Lts, lts_y: Lts) -> Relation:
    """Greatest relation whose pairs match every move in both directions."""
    _require_shared_alphabet(lts_x, lts_y)
    k = len(lts_x.alphabet)

    def both_ways(R: Relation, x: int, y: int) -> bool:
        for a in range(k):
            xs, ys = lts_x.succ(x, a), lts_y.succ(y, a)
            mx, my = lts_x.succ_mask(x, a), lts_y.succ_mask(y, a)
            if any(not R.row_mask(x2) & my for x2 in xs):
                return False
            if any(not R.col_mask(y2) & mx for y2 in ys):
                return False
        return True

    return refine(lts_x.state_count, lts_y.state_count, both_ways)


def greatest_coalgebraic_sim(lts_x: Lts, lts_y: Lts, order: FunctorialOrder, mode: str = "fast",
                             history: Optional[list] = None) -> Relation:
    """Greatest ``R`` with ``(c(x), d(y))`` in the lax lifting of ``R`` for all pairs.

    ``generic`` mode evaluates the lax lifting by exhaustive witness search
    (tabulated once per sweep); ``fast`` mode uses the clause-level decision for
    built-in orders and falls back to ``generic`` for anything else.
    """
    _require_shared_alphabet(lts_x, lts_y)
    k = len(lts_x.alphabet)
    steps_x, steps_y = lts_x.steps, lts_y.steps
    if mode == "fast":
        semantics = semantics_for(order)
        if semantics is not None:
            modes = semantic_modes(semantics, k)

            def fast_ok(R, x, y):
                return lift_by_modes(modes, R, steps_x[x], steps_y[y])
            return refine(lts_x.state_count, lts_y.state_count, fast_ok, history)
        log.info("no clause-level lifting for %s, using witness search", order.name)
    elif mode != "generic":
        raise ValueError(f"unknown mode {mode!r}")

    codes_x = [s.code() for s in steps_x]
    codes_y = [s.code() for s in steps_y]

    def generic_ok(R, x, y):
        return bool(lax_lift_table(order, R, k)[codes_x[x], codes_y[y]])

    return refine(lts_x.state_count, lts_y.state_count, generic_ok, history)


def brute_force_similarity(lts_x: Lts, lts_y: Lts, step_predicate: StepPredicate,
                           cap: int = BRUTE_FORCE_CAP) -> Relation:
    """Union of every relation closed under ``step_predicate``, by enumeration."""
    nx, ny = lts_x.state_count, lts_y.state_count
    if nx * ny > cap:
        raise ValueError(f"brute force limited to |X|·|Y| <= {cap}, got {nx * ny}")
    union = 0  # code of the union so far
    for code in range(1 << (nx * ny)):
        if code & ~union == 0:
            continue  # adds nothing to the union
        R = Relation.from_code(code, nx, ny)
        rows = R.row_masks()
        if all(step_predicate(R, x, y) for x in range(nx) for y in mask_members(rows[x])):
            union |= code
    union = Relation.from_code(union, nx, ny)
    result = union
    if not all(step_predicate(result, x, y) for x, y in result.pairs()):
        raise AssertionError("union of closed relations is not closed; predicate is not monotone")
    return result


def greatest_relation(lts_x: Lts, lts_y: Lts, semantics_or_order: Union[str, FunctorialOrder],
                      partition: Optional[ActionPartition] = None, mode: str = "fast") -> Relation:
    if isinstance(semantics_or_order, FunctorialOrder):
        return greatest_coalgebraic_sim(lts_x, lts_y, semantics_or_order, mode)
    if semantics_or_order == "bisim":
        return greatest_bisimulation(lts_x, lts_y)
    return greatest_classical_sim(lts_x, lts_y, semantics_or_order, partition)


def holds(lts_x: Lts, x: int, lts_y: Lts, y: int, semantics_or_order: Union[str, FunctorialOrder],
          partition: Optional[ActionPartition] = None, mode: str = "fast") -> bool:
    """Whether ``x`` is simulated by ``y`` in the given semantics."""
    for lts, s in ((lts_x, x), (lts_y, y)):
        if not 0 <= s < lts.state_count:
            raise IndexError(f"state {s} out of range")
    return (x, y) in greatest_relation(lts_x, lts_y, semantics_or_order, partition, mode)
