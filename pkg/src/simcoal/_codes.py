"""Dense integer codes for step functions, used by the exhaustive checkers.

A step function over carrier ``n`` and ``k`` actions is coded as
``sum(mask[a] << (n * a))`` where ``mask[a]`` is its successor bitmask.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np


class BudgetExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its configured cap."""


def space_size(carrier: int, alphabet: int) -> int:
    return 1 << (carrier * alphabet)


def require(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise BudgetExceeded(f"{what}: {count} exceeds budget {cap}")


@lru_cache(maxsize=None)
def code_masks(carrier: int, alphabet: int) -> np.ndarray:
    """``(N, k)`` array: column ``a`` holds the action-``a`` mask of every code."""
    codes = np.arange(space_size(carrier, alphabet), dtype=np.int64)
    full = (1 << carrier) - 1
    out = np.stack([(codes >> (carrier * a)) & full for a in range(alphabet)], axis=1) if alphabet else \
        np.zeros((len(codes), 0), dtype=np.int64)
    out.setflags(write=False)
    return out


def mask_image(table: Sequence[int], codomain: int) -> np.ndarray:
    """Image bitmask of every subset of the domain under ``x -> table[x]``."""
    n = len(table)
    out = np.zeros(1 << n, dtype=np.int64)
    for m in range(1, 1 << n):
        low = (m & -m).bit_length() - 1
        out[m] = out[m & (m - 1)] | (1 << table[low])
    return out


@lru_cache(maxsize=None)
def _image_codes(table: tuple[int, ...], codomain: int, alphabet: int) -> np.ndarray:
    masks = code_masks(len(table), alphabet)
    img = mask_image(table, codomain)
    out = np.zeros(masks.shape[0], dtype=np.int64)
    for a in range(alphabet):
        out |= img[masks[:, a]] << (codomain * a)
    out.setflags(write=False)
    return out


def image_codes(table: Sequence[int], codomain: int, alphabet: int) -> np.ndarray:
    """Code of ``Ff(u)`` for every code ``u``."""
    return _image_codes(tuple(table), codomain, alphabet)


def all_maps(domain: int, codomain: int) -> Iterator[tuple[int, ...]]:
    """Every function ``domain -> codomain`` as a table, lexicographically."""
    return product(range(codomain), repeat=domain)


def onehot(codes: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros((len(codes), width), dtype=bool)
    out[np.arange(len(codes)), codes] = True
    return out


def bool_compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Boolean matrix product: ``out[i, j] = any_k a[i, k] & b[k, j]``."""
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0.5
