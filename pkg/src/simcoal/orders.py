"""Functorial orders on ``F X = P(X)^A``.

An order is an immutable descriptor.  Pointwise ``leq`` follows the
definitions literally (``Compose`` searches for a middle element over the
whole carrier); :func:`leq_table` tabulates an order over every step function
of a carrier and is what the exhaustive checkers use.

Composition is read right to left: ``u Compose(A, B) v`` iff there is ``w``
with ``u B w`` and ``w A v``.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from ._codes import BudgetExceeded, all_maps, bool_compose, code_masks, image_codes, require, space_size
from .lts import ActionPartition, StepFunction, all_step_functions, load_partition

__all__ = [
    "BudgetExceeded", "CheckReport", "Compose", "ConfEmpty", "ConfNonEmpty", "Conformance", "CovContra",
    "Equality", "Factors", "FunctorialOrder", "Inclusion", "Opposite", "Product", "ReverseInclusion",
    "Uniform", "check_functorial", "check_preorder", "default_alphabet", "leq", "leq_table", "make_order",
]

DEFAULT_SPACE_CAP = 4096


def _subset(x: int, y: int) -> bool:
    return x & ~y == 0


# Orders on P(X), on bitmasks.
PRIMITIVES: dict[str, Callable[[int, int], bool]] = {
    "inclusion": _subset,
    "reverse": lambda x, y: _subset(y, x),
    "equality": lambda x, y: x == y,
    "conformance": lambda x, y: x == 0 or (_subset(y, x) and y != 0),
    "conf_empty": lambda x, y: x == 0 or x == y,
    "conf_nonempty": lambda x, y: (_subset(y, x) and y != 0) or x == y,
}

# (left-stable factor, right-stable factor) of each primitive.  Equality is
# parked on whichever side leaves the other factor intact.
_SPLIT = {
    "inclusion": ("equality", "inclusion"),
    "reverse": ("reverse", "equality"),
    "equality": ("equality", "equality"),
    "conformance": ("conf_nonempty", "conf_empty"),
    "conf_empty": ("equality", "conf_empty"),
    "conf_nonempty": ("conf_nonempty", "equality"),
}


@lru_cache(maxsize=None)
def _primitive_table(kind: str, carrier: int) -> np.ndarray:
    rel = PRIMITIVES[kind]
    n = 1 << carrier
    return np.array([[rel(x, y) for y in range(n)] for x in range(n)], dtype=bool)


def _check_pair(u: StepFunction, v: StepFunction) -> None:
    if u.carrier_size != v.carrier_size:
        raise ValueError(f"carrier mismatch: {u.carrier_size} vs {v.carrier_size}")
    if u.alphabet_size != v.alphabet_size:
        raise ValueError(f"alphabet mismatch: {u.alphabet_size} vs {v.alphabet_size}")


class Factors(NamedTuple):
    """``left`` is applied on the simulated side, ``right`` on the simulating side."""

    left: "FunctorialOrder"
    right: "FunctorialOrder"


class FunctorialOrder:
    """Base class.  Subclasses are frozen dataclasses, hence hashable."""

    def per_action(self, alphabet_size: int) -> Optional[tuple[str, ...]]:
        """Primitive kind per action if the order is a per-action product."""
        return None

    def leq(self, u: StepFunction, v: StepFunction) -> bool:
        raise NotImplementedError

    def factors(self) -> Factors:
        raise ValueError(f"{self.name} has no left/right-stable decomposition")

    @property
    def name(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Uniform(FunctorialOrder):
    """The same primitive order on every action."""

    kind: str

    def __post_init__(self):
        if self.kind not in PRIMITIVES:
            raise ValueError(f"unknown order kind {self.kind!r}")

    def per_action(self, alphabet_size):
        return (self.kind,) * alphabet_size

    def leq(self, u, v):
        _check_pair(u, v)
        rel = PRIMITIVES[self.kind]
        return all(rel(x, y) for x, y in zip(u.masks(), v.masks()))

    def factors(self):
        left, right = _SPLIT[self.kind]
        return Factors(Uniform(left), Uniform(right))

    @property
    def name(self):
        return self.kind


@dataclass(frozen=True)
class Product(FunctorialOrder):
    """Action-distributive order with an explicit primitive per action."""

    kinds: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(self.kinds))
        for k in self.kinds:
            if k not in PRIMITIVES:
                raise ValueError(f"unknown order kind {k!r}")

    def per_action(self, alphabet_size):
        if alphabet_size != len(self.kinds):
            raise ValueError(f"product order has {len(self.kinds)} factors, alphabet has {alphabet_size}")
        return self.kinds

    def leq(self, u, v):
        _check_pair(u, v)
        kinds = self.per_action(u.alphabet_size)
        return all(PRIMITIVES[k](x, y) for k, x, y in zip(kinds, u.masks(), v.masks()))

    def factors(self):
        split = [_SPLIT[k] for k in self.kinds]
        return Factors(Product(tuple(s[0] for s in split)), Product(tuple(s[1] for s in split)))

    @property
    def name(self):
        return f"product({','.join(self.kinds)})"


_CC_KIND = {"r": "inclusion", "l": "reverse", "bi": "equality"}


@dataclass(frozen=True)
class CovContra(FunctorialOrder):
    """Covariant on ``r``, contravariant on ``l``, equality on ``bi``."""

    partition: ActionPartition
    alphabet: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        self.partition.validate(self.alphabet)

    def per_action(self, alphabet_size):
        if alphabet_size != len(self.alphabet):
            raise ValueError(f"partition covers {len(self.alphabet)} actions, step functions have {alphabet_size}")
        return tuple(_CC_KIND[m] for m in self.partition.modes(self.alphabet))

    def leq(self, u, v):
        _check_pair(u, v)
        kinds = self.per_action(u.alphabet_size)
        return all(PRIMITIVES[k](x, y) for k, x, y in zip(kinds, u.masks(), v.masks()))

    def modes(self) -> tuple[str, ...]:
        return self.partition.modes(self.alphabet)

    def lbar(self) -> Product:
        """Reverse inclusion on ``l``, equality elsewhere (left-stable)."""
        return Product(tuple("reverse" if m == "l" else "equality" for m in self.modes()))

    def rbar(self) -> Product:
        """Inclusion on ``r``, equality elsewhere; ``bi`` lives here (right-stable)."""
        return Product(tuple("inclusion" if m == "r" else "equality" for m in self.modes()))

    def factors(self):
        return Factors(self.lbar(), self.rbar())

    @property
    def name(self):
        p = self.partition
        return f"cc(r={sorted(p.r)},l={sorted(p.l)},bi={sorted(p.bi)})"


@dataclass(frozen=True)
class Compose(FunctorialOrder):
    """``u (first ∘ second) v`` iff ``u second w`` and ``w first v`` for some ``w``."""

    first: FunctorialOrder
    second: FunctorialOrder

    def leq(self, u, v):
        _check_pair(u, v)
        return any(self.second.leq(u, w) and self.first.leq(w, v)
                   for w in all_step_functions(u.carrier_size, u.alphabet_size))

    @property
    def name(self):
        return f"compose({self.first.name},{self.second.name})"


@dataclass(frozen=True)
class Opposite(FunctorialOrder):
    inner: FunctorialOrder

    def leq(self, u, v):
        return self.inner.leq(v, u)

    def factors(self):
        left, right = self.inner.factors()
        return Factors(Opposite(right), Opposite(left))

    @property
    def name(self):
        return f"op({self.inner.name})"


Inclusion = Uniform("inclusion")
ReverseInclusion = Uniform("reverse")
Equality = Uniform("equality")
Conformance = Uniform("conformance")
ConfEmpty = Uniform("conf_empty")
ConfNonEmpty = Uniform("conf_nonempty")


def leq(order: FunctorialOrder, u: StepFunction, v: StepFunction) -> bool:
    return order.leq(u, v)


def leq_table(order: FunctorialOrder, carrier: int, alphabet: int, cap: int = DEFAULT_SPACE_CAP) -> np.ndarray:
    """``T[u, v] = u ⊑ v`` over all codes of ``P(carrier)^alphabet``."""
    require(space_size(carrier, alphabet), cap, f"step-function space (2^{carrier})^{alphabet}")
    return _leq_table(order, carrier, alphabet)


@lru_cache(maxsize=512)
def _leq_table(order: FunctorialOrder, carrier: int, alphabet: int) -> np.ndarray:
    kinds = order.per_action(alphabet)
    if kinds is not None:
        masks = code_masks(carrier, alphabet)
        out = np.ones((masks.shape[0], masks.shape[0]), dtype=bool)
        for a, kind in enumerate(kinds):
            col = masks[:, a]
            out &= _primitive_table(kind, carrier)[np.ix_(col, col)]
    elif isinstance(order, Compose):
        out = bool_compose(_leq_table(order.second, carrier, alphabet), _leq_table(order.first, carrier, alphabet))
    elif isinstance(order, Opposite):
        out = _leq_table(order.inner, carrier, alphabet).T.copy()
    else:
        # any other order: evaluate pointwise
        space = list(all_step_functions(carrier, alphabet))
        out = np.array([[order.leq(u, v) for v in space] for u in space], dtype=bool).reshape(len(space), len(space))
    out.setflags(write=False)
    return out


def default_alphabet(size: int) -> tuple[str, ...]:
    return tuple(chr(ord("a") + i) for i in range(size))


# -- check reports --------------------------------------------------------------

@dataclass
class CheckReport:
    """Verdict of one law on one configuration, with a counterexample on failure."""

    law: str
    verdict: str
    params: dict = field(default_factory=dict)
    witness: Optional[dict] = None
    instances: int = 0
    exhaustive: bool = True
    seed: Optional[int] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in ("pass", "fail", "inconclusive"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "fail" and self.witness is None:
            raise ValueError("a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def label(self) -> str:
        if self.verdict != "pass":
            return self.verdict
        scope = "exhaustive" if self.exhaustive else f"sampled, seed {self.seed}"
        sizes = self.params.get("sizes")
        return f"pass ({scope} up to sizes {sizes})" if sizes is not None else f"pass ({scope})"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CheckReport":
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CheckReport":
        return cls.from_dict(json.loads(text))


def _sf(code: int, carrier: int, alphabet: int) -> list[list[int]]:
    return StepFunction.from_code(int(code), carrier, alphabet).to_lists()


def check_preorder(order: FunctorialOrder, carrier_size: int, alphabet_size: int,
                   cap: int = DEFAULT_SPACE_CAP) -> CheckReport:
    t = leq_table(order, carrier_size, alphabet_size, cap)
    params = {"order": order.name, "sizes": [carrier_size], "alphabet": alphabet_size}
    n = t.shape[0]
    law = "preorder"
    bad = np.nonzero(~np.diag(t))[0]
    if len(bad):
        u = int(bad[0])
        return CheckReport(law, "fail", params, {"kind": "reflexivity", "carrier": carrier_size,
                                                 "u": _sf(u, carrier_size, alphabet_size)}, n)
    viol = bool_compose(t, t) & ~t
    if viol.any():
        u, v = (int(i) for i in np.argwhere(viol)[0])
        w = int(np.nonzero(t[u] & t[:, v])[0][0])
        return CheckReport(law, "fail", params, {
            "kind": "transitivity", "carrier": carrier_size,
            "u": _sf(u, carrier_size, alphabet_size), "w": _sf(w, carrier_size, alphabet_size),
            "v": _sf(v, carrier_size, alphabet_size)}, n ** 3)
    return CheckReport(law, "pass", params, None, n ** 3)


def check_functorial(order: FunctorialOrder, carrier_x: int, carrier_y: int, alphabet_size: int,
                     cap: int = DEFAULT_SPACE_CAP) -> CheckReport:
    tx = leq_table(order, carrier_x, alphabet_size, cap)
    ty = leq_table(order, carrier_y, alphabet_size, cap)
    params = {"order": order.name, "sizes": [carrier_x, carrier_y], "alphabet": alphabet_size}
    count = 0
    for f in all_maps(carrier_x, carrier_y):
        img = image_codes(f, carrier_y, alphabet_size)
        viol = tx & ~ty[np.ix_(img, img)]
        count += tx.size
        if viol.any():
            u, u2 = (int(i) for i in np.argwhere(viol)[0])
            return CheckReport("functorial", "fail", params, {
                "carriers": [carrier_x, carrier_y], "f": list(f),
                "u": _sf(u, carrier_x, alphabet_size), "u2": _sf(u2, carrier_x, alphabet_size)}, count)
    return CheckReport("functorial", "pass", params, None, count)


# -- order expressions ------------------------------------------------------------

_SIMPLE = {
    "inclusion": Inclusion, "reverse": ReverseInclusion, "equality": Equality,
    "conformance": Conformance, "conf_empty": ConfEmpty, "conf_nonempty": ConfNonEmpty,
}
_WORD = re.compile(r"\s*([A-Za-z_]+)\s*")


def make_order(expr: str, alphabet: Optional[Sequence[str]] = None,
               partition_loader: Callable[[str], ActionPartition] = load_partition) -> FunctorialOrder:
    """Build an order from ``inclusion``, ``reverse``, ``equality``, ``conformance``,
    ``conf_empty``, ``conf_nonempty``, ``cc(FILE)``, ``lbar(FILE)``, ``rbar(FILE)``,
    ``product(KIND,...)``, ``op(E)`` and ``compose(E,E)``.

    ``alphabet`` is required for the partition-based forms.
    """
    order, pos = _parse_order(expr, 0, alphabet, partition_loader)
    if expr[pos:].strip():
        raise ValueError(f"trailing input in order expression at {pos}: {expr[pos:]!r}")
    return order


def _parse_order(text, pos, alphabet, loader):
    m = _WORD.match(text, pos)
    if not m:
        raise ValueError(f"expected an order name at {pos} in {text!r}")
    word, pos = m.group(1), m.end()
    if word in _SIMPLE:
        return _SIMPLE[word], pos
    if not text.startswith("(", pos):
        raise ValueError(f"unknown order {word!r}")
    pos += 1
    if word in ("cc", "lbar", "rbar"):
        close = text.index(")", pos)
        arg = text[pos:close].strip()
        if alphabet is None:
            raise ValueError(f"{word}(...) needs an alphabet")
        cc = CovContra(loader(arg), tuple(alphabet))
        return {"cc": cc, "lbar": cc.lbar(), "rbar": cc.rbar()}[word], close + 1
    if word == "product":
        close = text.index(")", pos)
        return Product(tuple(k.strip() for k in text[pos:close].split(","))), close + 1
    if word == "op":
        inner, pos = _parse_order(text, pos, alphabet, loader)
        return Opposite(inner), _expect(text, pos, ")")
    if word == "compose":
        first, pos = _parse_order(text, pos, alphabet, loader)
        pos = _expect(text, pos, ",")
        second, pos = _parse_order(text, pos, alphabet, loader)
        return Compose(first, second), _expect(text, pos, ")")
    raise ValueError(f"unknown order constructor {word!r}")


def _expect(text, pos, ch):
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if not text.startswith(ch, pos):
        raise ValueError(f"expected {ch!r} at {pos} in {text!r}")
    return pos + 1
