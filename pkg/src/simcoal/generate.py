"""LTS families for exhaustive and randomized testing."""

from __future__ import annotations

import random
from typing import Iterator, Sequence

from .lts import Lts


def all_lts(state_count: int, alphabet: Sequence[str]) -> Iterator[Lts]:
    """Every LTS on ``state_count`` states over ``alphabet`` (initial state 0)."""
    k = len(alphabet)
    slots = [(s, a, t) for s in range(state_count) for a in range(k) for t in range(state_count)]
    for bits in range(1 << len(slots)):
        trans: dict[tuple[int, int], set[int]] = {}
        for i, (s, a, t) in enumerate(slots):
            if bits >> i & 1:
                trans.setdefault((s, a), set()).add(t)
        yield Lts(state_count, tuple(alphabet), {key: frozenset(v) for key, v in trans.items()}, 0)


def exhaustive_pairs(max_states: int = 2, max_alphabet: int = 2) -> Iterator[tuple[Lts, Lts]]:
    """All pairs of LTSs with at most ``max_states`` states over a shared
    alphabet of size ``1..max_alphabet``."""
    for k in range(1, max_alphabet + 1):
        alphabet = tuple(chr(ord("a") + i) for i in range(k))
        family = [lts for n in range(1, max_states + 1) for lts in all_lts(n, alphabet)]
        for x in family:
            for y in family:
                yield x, y


def random_lts(rng: random.Random, state_count: int, alphabet: Sequence[str], density: float = 0.3) -> Lts:
    triples = [(s, a, t) for s in range(state_count) for a in alphabet for t in range(state_count)
               if rng.random() < density]
    return Lts.from_triples(state_count, triples, alphabet=tuple(alphabet), initial=0)


def random_pairs(seed: int, count: int, max_states: int = 3, max_alphabet: int = 2) -> Iterator[tuple[Lts, Lts]]:
    rng = random.Random(seed)
    for _ in range(count):
        k = rng.randint(1, max_alphabet)
        alphabet = tuple(chr(ord("a") + i) for i in range(k))
        density = rng.choice((0.15, 0.3, 0.5))
        yield (random_lts(rng, rng.randint(1, max_states), alphabet, density),
               random_lts(rng, rng.randint(1, max_states), alphabet, density))
