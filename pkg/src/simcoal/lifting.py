"""Relation lifting for ``P^A`` and the lax lifting ``⊑_Y ∘ Rel(F)(R) ∘ ⊑_X``.

``rel_lift`` is the per-action Egli-Milner condition.  ``lax_lift_generic``
searches the witnesses ``u ⊑ u'`` and ``v' ⊑ v`` over the whole finite
``FX`` and ``FY``; ``lax_lift_fast`` decides the built-in semantics by their
step clauses without any search.  The ``*_table`` variants tabulate a lifting
over every pair of step functions for the exhaustive checkers.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from ._codes import BudgetExceeded, bool_compose, code_masks, require, space_size
from .lts import ActionPartition, StepFunction, all_step_functions
from .orders import DEFAULT_SPACE_CAP, CovContra, FunctorialOrder, leq_table
from .relation import Relation

DEFAULT_WITNESS_CAP = 1 << 16

FAST_SEMANTICS = ("plain", "reverse", "cc", "conformance", "bisim")


def _check_dims(R: Relation, u: StepFunction, v: StepFunction) -> None:
    if u.carrier_size != R.rows or v.carrier_size != R.cols:
        raise ValueError(f"dimension mismatch: relation is {R.rows}x{R.cols}, "
                         f"step functions over {u.carrier_size} and {v.carrier_size}")
    if u.alphabet_size != v.alphabet_size:
        raise ValueError("step functions over different alphabets")


def _forward(R: Relation, xs, ymask: int) -> bool:
    # every x has an R-partner among the ys
    return all(R.row_mask(x) & ymask for x in xs)


def _backward(R: Relation, xmask: int, ys) -> bool:
    # every y has an R-partner among the xs
    return all(R.col_mask(y) & xmask for y in ys)


def rel_lift(R: Relation, u: StepFunction, v: StepFunction) -> bool:
    """``(u, v) ∈ Rel(P^A)(R)``."""
    _check_dims(R, u, v)
    return all(_forward(R, xs, my) and _backward(R, mx, ys)
               for xs, ys, mx, my in zip(u.per_action, v.per_action, u.masks(), v.masks()))


def lax_lift_generic(order: FunctorialOrder, R: Relation, u: StepFunction, v: StepFunction,
                     cap: int = DEFAULT_WITNESS_CAP) -> bool:
    """``∃ u', v'``: ``u ⊑_X u'``, ``(u', v') ∈ Rel(F)(R)``, ``v' ⊑_Y v``."""
    _check_dims(R, u, v)
    k = u.alphabet_size
    require(space_size(R.rows, k) * space_size(R.cols, k), cap, "lax lifting witness space")
    lefts = [u2 for u2 in all_step_functions(R.rows, k) if order.leq(u, u2)]
    rights = [v2 for v2 in all_step_functions(R.cols, k) if order.leq(v2, v)]
    return any(rel_lift(R, u2, v2) for u2 in lefts for v2 in rights)


def lax_lift_fast(semantics: Union[str, CovContra], R: Relation, u: StepFunction, v: StepFunction,
                  partition: Optional[ActionPartition] = None,
                  alphabet: Optional[Sequence[str]] = None) -> bool:
    """Clause-level decision of the lax lifting for a built-in semantics.

    ``semantics`` is ``plain``, ``reverse``, ``conformance``, ``bisim`` or
    ``cc``; for ``cc`` pass ``partition`` and ``alphabet``, or pass a
    :class:`CovContra` order directly.
    """
    _check_dims(R, u, v)
    return lift_by_modes(semantic_modes(semantics, u.alphabet_size, partition, alphabet), R, u, v)


def lift_by_modes(modes: Optional[Sequence[str]], R: Relation, u: StepFunction, v: StepFunction) -> bool:
    """:func:`lax_lift_fast` with the per-action modes already resolved
    (``None`` for conformance); dimensions are not re-checked."""
    if modes is None:
        for mx, ys in zip(u.masks(), v.per_action):
            if mx and not (ys and _backward(R, mx, ys)):
                return False
        return True
    for mode, xs, ys, mx, my in zip(modes, u.per_action, v.per_action, u.masks(), v.masks()):
        if mode in ("r", "bi") and not _forward(R, xs, my):
            return False
        if mode in ("l", "bi") and not _backward(R, mx, ys):
            return False
    return True


def semantic_modes(semantics, alphabet_size: int, partition=None, alphabet=None) -> Optional[tuple[str, ...]]:
    """Per-action ``r``/``l``/``bi`` directions, or ``None`` for conformance."""
    if isinstance(semantics, CovContra):
        if len(semantics.alphabet) != alphabet_size:
            raise ValueError("partition alphabet does not match the step functions")
        return semantics.modes()
    if semantics == "plain":
        return ("r",) * alphabet_size
    if semantics == "reverse":
        return ("l",) * alphabet_size
    if semantics == "bisim":
        return ("bi",) * alphabet_size
    if semantics == "conformance":
        return None
    if semantics == "cc":
        if partition is None or alphabet is None:
            raise ValueError("cc semantics needs a partition and an alphabet")
        if len(alphabet) != alphabet_size:
            raise ValueError("partition alphabet does not match the step functions")
        return partition.modes(alphabet)
    raise ValueError(f"unknown semantics {semantics!r}")


# -- tabulated forms -------------------------------------------------------------

def _preimage_masks(R: Relation, forward: bool) -> np.ndarray:
    # forward: for every subset of Y, the x related to some member.
    if forward:
        n_src, cols = R.cols, [R.col_mask(y) for y in range(R.cols)]
    else:
        n_src, cols = R.rows, list(R.row_masks())
    out = np.zeros(1 << n_src, dtype=np.int64)
    for m in range(1, 1 << n_src):
        low = (m & -m).bit_length() - 1
        out[m] = out[m & (m - 1)] | cols[low]
    return out


@lru_cache(maxsize=4096)
def _rel_lift_table(masks: tuple[int, ...], cols: int, alphabet: int) -> np.ndarray:
    R = Relation.from_rows(masks, cols)
    rows = R.rows
    pre = _preimage_masks(R, True)    # subset of Y -> related xs
    post = _preimage_masks(R, False)  # subset of X -> related ys
    mx = np.arange(1 << rows)
    my = np.arange(1 << cols)
    fwd = (mx[:, None] & ~pre[None, my]) == 0
    bwd = (my[None, :] & ~post[mx][:, None]) == 0
    em = fwd & bwd
    ax, ay = code_masks(rows, alphabet), code_masks(cols, alphabet)
    out = np.ones((ax.shape[0], ay.shape[0]), dtype=bool)
    for a in range(alphabet):
        out &= em[np.ix_(ax[:, a], ay[:, a])]
    out.setflags(write=False)
    return out


def rel_lift_table(R: Relation, alphabet: int, cap: int = DEFAULT_SPACE_CAP) -> np.ndarray:
    require(max(space_size(R.rows, alphabet), space_size(R.cols, alphabet)), cap, "step-function space")
    return _rel_lift_table(R.row_masks(), R.cols, alphabet)


def factored_lift_table(left: FunctorialOrder, right: FunctorialOrder, R: Relation, alphabet: int,
                        cap: int = DEFAULT_SPACE_CAP) -> np.ndarray:
    """``T[u, v]`` iff ``u left u' Rel(F)(R) v' right v`` for some ``u', v'``."""
    tl = leq_table(left, R.rows, alphabet, cap)
    tr = leq_table(right, R.cols, alphabet, cap)
    return bool_compose(bool_compose(tl, rel_lift_table(R, alphabet, cap)), tr)


def lax_lift_table(order: FunctorialOrder, R: Relation, alphabet: int, cap: int = DEFAULT_SPACE_CAP) -> np.ndarray:
    return _lax_lift_table_cached(order, R.row_masks(), R.cols, alphabet, cap)


@lru_cache(maxsize=8192)
def _lax_lift_table_cached(order, masks, cols, alphabet, cap):
    R = Relation.from_rows(masks, cols)
    out = factored_lift_table(order, order, R, alphabet, cap)
    out.setflags(write=False)
    return out


__all__ = [
    "BudgetExceeded", "FAST_SEMANTICS", "factored_lift_table", "lax_lift_fast", "lax_lift_generic",
    "lax_lift_table", "rel_lift", "rel_lift_table", "semantic_modes",
]
