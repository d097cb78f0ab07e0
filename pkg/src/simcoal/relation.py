"""Binary relations between finite carriers as boolean matrices.

Rows are stored as integer bitmasks (bit ``y`` of row ``x`` is the pair
``(x, y)``); a numpy view is built on demand for matrix work.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from .lts import mask_members


class Relation:
    """``R ⊆ X × Y`` with ``|X| = rows`` and ``|Y| = cols``."""

    __slots__ = ("_masks", "_ncols", "_colmasks", "_bits")

    def __init__(self, bits):
        bits = np.array(bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("relation bits must be a 2-d matrix")
        masks = tuple(sum(1 << int(y) for y in np.nonzero(r)[0]) for r in bits)
        self._init(masks, bits.shape[1])
        bits.setflags(write=False)
        self._bits = bits

    def _init(self, masks: tuple[int, ...], ncols: int) -> None:
        self._masks = masks
        self._ncols = ncols
        self._colmasks = None
        self._bits = None

    @classmethod
    def from_rows(cls, masks: Sequence[int], cols: int) -> "Relation":
        """Build from one bitmask per row."""
        full = (1 << cols) - 1
        masks = tuple(masks)
        if any(m & ~full for m in masks):
            raise ValueError("row mask exceeds column count")
        return cls._raw(masks, cols)

    @classmethod
    def _raw(cls, masks: tuple[int, ...], cols: int) -> "Relation":
        rel = cls.__new__(cls)
        rel._masks = masks
        rel._ncols = cols
        rel._colmasks = None
        rel._bits = None
        return rel

    @classmethod
    def empty(cls, rows: int, cols: int) -> "Relation":
        return cls.from_rows((0,) * rows, cols)

    @classmethod
    def full(cls, rows: int, cols: int) -> "Relation":
        return cls.from_rows(((1 << cols) - 1,) * rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Relation":
        return cls.from_rows(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_pairs(cls, rows: int, cols: int, pairs: Iterable[tuple[int, int]]) -> "Relation":
        masks = [0] * rows
        for x, y in pairs:
            if not (0 <= x < rows and 0 <= y < cols):
                raise ValueError(f"pair {(x, y)} outside {rows}x{cols}")
            masks[x] |= 1 << y
        return cls.from_rows(masks, cols)

    @classmethod
    def from_code(cls, code: int, rows: int, cols: int) -> "Relation":
        """Bit ``x * cols + y`` of ``code`` is the pair ``(x, y)``."""
        full = (1 << cols) - 1
        return cls._raw(tuple((code >> (x * cols)) & full for x in range(rows)), cols)

    @classmethod
    def all(cls, rows: int, cols: int) -> Iterator["Relation"]:
        for code in range(1 << (rows * cols)):
            yield cls.from_code(code, rows, cols)

    @property
    def rows(self) -> int:
        return len(self._masks)

    @property
    def cols(self) -> int:
        return self._ncols

    @property
    def bits(self) -> np.ndarray:
        if self._bits is None:
            bits = np.zeros((self.rows, self.cols), dtype=bool)
            for x, m in enumerate(self._masks):
                bits[x, mask_members(m)] = True
            bits.setflags(write=False)
            self._bits = bits
        return self._bits

    def row_mask(self, x: int) -> int:
        return self._masks[x]

    def col_mask(self, y: int) -> int:
        if self._colmasks is None:
            cm = [0] * self._ncols
            for x, m in enumerate(self._masks):
                for yy in mask_members(m):
                    cm[yy] |= 1 << x
            self._colmasks = tuple(cm)
        return self._colmasks[y]

    def row_masks(self) -> tuple[int, ...]:
        return self._masks

    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self._masks[x] >> y & 1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x, m in enumerate(self._masks) for y in mask_members(m)]

    def code(self) -> int:
        return sum(m << (x * self._ncols) for x, m in enumerate(self._masks))

    def transpose(self) -> "Relation":
        return Relation.from_rows(tuple(self.col_mask(y) for y in range(self._ncols)), self.rows)

    def then(self, other: "Relation") -> "Relation":
        """Diagrammatic composite: ``x (R;S) z`` iff ``x R y S z`` for some ``y``."""
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in composition")
        out = []
        for m in self._masks:
            acc = 0
            for y in mask_members(m):
                acc |= other._masks[y]
            out.append(acc)
        return Relation.from_rows(out, other.cols)

    def preimage(self, f: Sequence[int], g: Sequence[int]) -> "Relation":
        """``(f × g)^{-1}(R)``: relate ``x, y`` iff ``f(x) R g(y)``."""
        return Relation.from_pairs(len(f), len(g), ((x, y) for x in range(len(f)) for y in range(len(g))
                                                    if (f[x], g[y]) in self))

    def image(self, f: Sequence[int], g: Sequence[int], rows: int, cols: int) -> "Relation":
        """Direct image of ``R`` along ``f × g``."""
        return Relation.from_pairs(rows, cols, ((f[x], g[y]) for x, y in self.pairs()))

    def issubset(self, other: "Relation") -> bool:
        return self.shape == other.shape and all(a & ~b == 0 for a, b in zip(self._masks, other._masks))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __le__(self, other):
        return self.issubset(other)

    def __and__(self, other):
        return Relation.from_rows(tuple(a & b for a, b in zip(self._masks, other._masks)), self.cols)

    def __or__(self, other):
        return Relation.from_rows(tuple(a | b for a, b in zip(self._masks, other._masks)), self.cols)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self._ncols == other._ncols and self._masks == other._masks

    def __hash__(self):
        return hash((self._ncols, self._masks))

    def __len__(self):
        return sum(bin(m).count("1") for m in self._masks)

    def __repr__(self):
        return f"Relation({self.rows}x{self.cols}, {self.pairs()})"

    def matrix_str(self) -> str:
        return "\n".join("".join("1" if m >> y & 1 else "." for y in range(self.cols)) for m in self._masks)
