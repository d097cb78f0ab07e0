"""Finite labelled transition systems viewed as coalgebras ``X -> P(X)^A``.

States are dense integer indices; names are optional metadata.  Three input
formats are supported: Aldebaran ``.aut``, a native JSON document and a small
process-term language (``0``, prefix ``a.P``, choice ``P + Q`` and named
constants).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence


class ParseError(ValueError):
    """Malformed input document.  ``line`` / ``pos`` locate the problem."""

    def __init__(self, message: str, line: Optional[int] = None, pos: Optional[int] = None):
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif pos is not None:
            where = f"position {pos}: "
        super().__init__(where + message)
        self.line = line
        self.pos = pos


@dataclass(frozen=True)
class StepFunction:
    """An element of ``P(X)^A``: one successor set per action index."""

    carrier_size: int
    per_action: tuple[frozenset[int], ...]
    _masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "per_action", tuple(frozenset(s) for s in self.per_action))
        for succ in self.per_action:
            for x in succ:
                if not 0 <= x < self.carrier_size:
                    raise ValueError(f"state {x} outside carrier of size {self.carrier_size}")
        object.__setattr__(self, "_masks", tuple(members_mask(s) for s in self.per_action))

    @classmethod
    def of(cls, carrier_size: int, *sets: Iterable[int]) -> "StepFunction":
        return cls(carrier_size, tuple(frozenset(s) for s in sets))

    @classmethod
    def from_masks(cls, carrier_size: int, masks: Sequence[int]) -> "StepFunction":
        return cls(carrier_size, tuple(frozenset(mask_members(m)) for m in masks))

    @classmethod
    def from_code(cls, code: int, carrier_size: int, alphabet_size: int) -> "StepFunction":
        return cls.from_masks(carrier_size, split_code(code, carrier_size, alphabet_size))

    @property
    def alphabet_size(self) -> int:
        return len(self.per_action)

    def __getitem__(self, a: int) -> frozenset[int]:
        return self.per_action[a]

    def masks(self) -> tuple[int, ...]:
        return self._masks

    def code(self) -> int:
        """Dense index of this step function among all of ``P(X)^A``."""
        return join_code(self.masks(), self.carrier_size)

    def image(self, table: Sequence[int], codomain_size: int) -> "StepFunction":
        """Elementwise image ``Ff(u)`` along the map ``x -> table[x]``."""
        return StepFunction(codomain_size, tuple(frozenset(table[x] for x in s) for s in self.per_action))

    def to_lists(self) -> list[list[int]]:
        return [sorted(s) for s in self.per_action]

    def __str__(self):
        body = ", ".join(f"{a}:{{{','.join(map(str, sorted(s)))}}}" for a, s in enumerate(self.per_action))
        return f"[{body}]"


def _members_slow(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


_SMALL = tuple(tuple(_members_slow(m)) for m in range(1 << 10))


def mask_members(mask: int) -> tuple[int, ...]:
    """Indices of the set bits of ``mask``, ascending."""
    if mask < 1024:
        return _SMALL[mask]
    return tuple(_members_slow(mask))


def members_mask(members: Iterable[int]) -> int:
    m = 0
    for x in members:
        m |= 1 << x
    return m


def split_code(code: int, carrier_size: int, alphabet_size: int) -> tuple[int, ...]:
    full = (1 << carrier_size) - 1
    return tuple((code >> (carrier_size * a)) & full for a in range(alphabet_size))


def join_code(masks: Sequence[int], carrier_size: int) -> int:
    code = 0
    for a, m in enumerate(masks):
        code |= m << (carrier_size * a)
    return code


def all_step_functions(carrier_size: int, alphabet_size: int) -> Iterable[StepFunction]:
    """Every element of ``P(X)^A`` in code order."""
    for code in range(1 << (carrier_size * alphabet_size)):
        yield StepFunction.from_code(code, carrier_size, alphabet_size)


@dataclass(frozen=True)
class ActionPartition:
    """Split of an alphabet into covariant ``r``, contravariant ``l`` and
    bisimulation-like ``bi`` actions."""

    r: frozenset[str] = frozenset()
    l: frozenset[str] = frozenset()  # noqa: E741
    bi: frozenset[str] = frozenset()

    def __post_init__(self):
        for name in ("r", "l", "bi"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.r & self.l or self.r & self.bi or self.l & self.bi:
            raise ValueError("partition blocks r, l, bi must be pairwise disjoint")

    @property
    def actions(self) -> frozenset[str]:
        return self.r | self.l | self.bi

    def validate(self, alphabet: Sequence[str]) -> None:
        if self.actions != set(alphabet):
            missing = sorted(set(alphabet) - self.actions)
            extra = sorted(self.actions - set(alphabet))
            raise ValueError(f"invalid partition for alphabet {list(alphabet)}: missing {missing}, unknown {extra}")

    def modes(self, alphabet: Sequence[str]) -> tuple[str, ...]:
        """Per action index: ``'r'``, ``'l'`` or ``'bi'``."""
        self.validate(alphabet)
        return tuple("r" if a in self.r else "l" if a in self.l else "bi" for a in alphabet)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ActionPartition":
        unknown = set(data) - {"r", "l", "bi"}
        if unknown:
            raise ValueError(f"unknown partition fields {sorted(unknown)}")
        return cls(frozenset(data.get("r", ())), frozenset(data.get("l", ())), frozenset(data.get("bi", ())))

    def to_dict(self) -> dict:
        return {"r": sorted(self.r), "l": sorted(self.l), "bi": sorted(self.bi)}


def load_partition(path: str) -> ActionPartition:
    with open(path) as fh:
        return ActionPartition.from_dict(json.load(fh))


@dataclass(frozen=True, eq=False)
class Lts:
    """Finite LTS.  ``transitions`` maps ``(state, action index)`` to the
    successor set; absent keys mean no successors."""

    state_count: int
    alphabet: tuple[str, ...]
    transitions: Mapping[tuple[int, int], frozenset[int]] = field(default_factory=dict)
    initial: Optional[int] = None
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet contains duplicate actions")
        if self.state_count < 0:
            raise ValueError("negative state count")
        clean = {}
        for (s, a), succ in self.transitions.items():
            succ = frozenset(succ)
            if not 0 <= s < self.state_count:
                raise ValueError(f"source state {s} out of range")
            if not 0 <= a < len(self.alphabet):
                raise ValueError(f"action index {a} out of range")
            for t in succ:
                if not 0 <= t < self.state_count:
                    raise ValueError(f"target state {t} out of range")
            if succ:
                clean[(s, a)] = succ
        object.__setattr__(self, "transitions", clean)
        if self.initial is not None and not 0 <= self.initial < self.state_count:
            raise ValueError(f"initial state {self.initial} out of range")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != self.state_count:
                raise ValueError("names must label every state")
        object.__setattr__(self, "_succ_masks", {k: members_mask(v) for k, v in clean.items()})

    @classmethod
    def from_triples(cls, state_count: int, triples: Iterable[tuple[int, str, int]],
                     alphabet: Optional[Sequence[str]] = None, initial: Optional[int] = 0,
                     names: Optional[Sequence[str]] = None) -> "Lts":
        triples = list(triples)
        if alphabet is None:
            alphabet = sorted({lab for _, lab, _ in triples})
        index = {a: i for i, a in enumerate(alphabet)}
        trans: dict[tuple[int, int], set[int]] = {}
        for s, lab, t in triples:
            if lab not in index:
                raise ValueError(f"label {lab!r} not in alphabet")
            trans.setdefault((s, index[lab]), set()).add(t)
        return cls(state_count, tuple(alphabet), {k: frozenset(v) for k, v in trans.items()},
                   initial, tuple(names) if names is not None else None)

    def succ(self, s: int, a: int) -> frozenset[int]:
        return self.transitions.get((s, a), frozenset())

    def succ_mask(self, s: int, a: int) -> int:
        return self._succ_masks.get((s, a), 0)

    @cached_property
    def steps(self) -> tuple["StepFunction", ...]:
        """``step_of`` for every state, computed once."""
        k = len(self.alphabet)
        return tuple(StepFunction(self.state_count, tuple(self.succ(s, a) for a in range(k)))
                     for s in range(self.state_count))

    def triples(self) -> list[tuple[int, str, int]]:
        return sorted((s, self.alphabet[a], t) for (s, a), succ in self.transitions.items() for t in succ)

    def state_label(self, s: int) -> str:
        if self.names is not None:
            return self.names[s]
        return str(s)

    def find_state(self, ref: str) -> int:
        """Resolve a state given by index or by name; digits always mean an index."""
        if not ref.isdigit():
            if self.names is not None and ref in self.names:
                return self.names.index(ref)
            raise ValueError(f"unknown state {ref!r}")
        s = int(ref)
        if not 0 <= s < self.state_count:
            raise ValueError(f"state index {s} out of range")
        return s

    def with_alphabet(self, alphabet: Sequence[str]) -> "Lts":
        """Re-index onto a larger alphabet; new actions have no transitions."""
        missing = set(self.alphabet) - set(alphabet)
        if missing:
            raise ValueError(f"target alphabet lacks {sorted(missing)}")
        return Lts.from_triples(self.state_count, self.triples(), alphabet, self.initial, self.names)

    def __eq__(self, other):
        if not isinstance(other, Lts):
            return NotImplemented
        return (self.state_count == other.state_count and self.alphabet == other.alphabet
                and self.transitions == other.transitions and self.initial == other.initial)

    def __hash__(self):
        return hash((self.state_count, self.alphabet, frozenset(self.transitions.items()), self.initial))

    def __repr__(self):
        return f"Lts(states={self.state_count}, alphabet={list(self.alphabet)}, transitions={self.triples()}, initial={self.initial})"


def unify_alphabets(*systems: Lts) -> tuple[Lts, ...]:
    alphabet = sorted(set().union(*(s.alphabet for s in systems)))
    return tuple(s if list(s.alphabet) == alphabet else s.with_alphabet(alphabet) for s in systems)


def _check_state(lts: Lts, s: int) -> None:
    if not 0 <= s < lts.state_count:
        raise IndexError(f"state {s} out of range for LTS with {lts.state_count} states")


def step_of(lts: Lts, s: int) -> StepFunction:
    """The coalgebra structure at ``s``: action index -> successor set."""
    _check_state(lts, s)
    return lts.steps[s]


def initials(lts: Lts, s: int) -> set[str]:
    _check_state(lts, s)
    return {lts.alphabet[a] for a in range(len(lts.alphabet)) if lts.succ(s, a)}


# -- Aldebaran --------------------------------------------------------------

_HEADER = re.compile(r"^\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_EDGE = re.compile(r'^\s*\(\s*(\d+)\s*,\s*(?:"((?:[^"\\]|\\.)*)"|([A-Za-z0-9_]+))\s*,\s*(\d+)\s*\)\s*$')


def parse_aut(text: str) -> Lts:
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]
    if not lines:
        raise ParseError("empty document, expected 'des (I, T, N)' header", line=1)
    lineno, header = lines[0]
    m = _HEADER.match(header)
    if not m:
        raise ParseError("malformed header, expected 'des (I, T, N)'", line=lineno)
    initial, n_trans, n_states = map(int, m.groups())
    if n_states == 0:
        raise ParseError("state count must be positive", line=lineno)
    if initial >= n_states:
        raise ParseError(f"initial state {initial} out of range", line=lineno)
    triples = []
    for lineno, ln in lines[1:]:
        m = _EDGE.match(ln)
        if not m:
            raise ParseError(f"malformed transition {ln.strip()!r}", line=lineno)
        src, quoted, bare, dst = m.groups()
        src, dst = int(src), int(dst)
        label = bare if quoted is None else re.sub(r"\\(.)", r"\1", quoted)
        for s in (src, dst):
            if s >= n_states:
                raise ParseError(f"state index out of range: {s} >= {n_states}", line=lineno)
        triples.append((src, label, dst))
    if len(triples) != n_trans:
        raise ParseError(f"transition count mismatch: header declares {n_trans}, found {len(triples)}",
                         line=lines[0][0])
    return Lts.from_triples(n_states, triples, initial=initial)


def serialize_aut(lts: Lts) -> str:
    triples = lts.triples()
    initial = lts.initial if lts.initial is not None else 0
    out = [f"des ({initial}, {len(triples)}, {lts.state_count})"]
    for s, lab, t in triples:
        escaped = lab.replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'({s}, "{escaped}", {t})')
    return "\n".join(out) + "\n"


# -- native JSON --------------------------------------------------------------

def parse_native(text: str) -> Lts:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    try:
        triples = [(int(s), str(lab), int(t)) for s, lab, t in doc["transitions"]]
        return Lts.from_triples(int(doc["states"]), triples, alphabet=doc.get("alphabet"),
                                initial=doc.get("initial", 0), names=doc.get("names"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad native document: {exc}") from None


def serialize_native(lts: Lts) -> str:
    doc = {
        "states": lts.state_count,
        "initial": lts.initial,
        "alphabet": list(lts.alphabet),
        "transitions": [list(t) for t in lts.triples()],
    }
    if lts.names is not None:
        doc["names"] = list(lts.names)
    return json.dumps(doc, indent=2) + "\n"


# -- process terms ------------------------------------------------------------

@dataclass(frozen=True)
class Nil:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Prefix:
    action: str
    body: "Term"

    def __str__(self):
        body = f"({self.body})" if isinstance(self.body, Sum) else str(self.body)
        return f"{self.action}.{body}"


@dataclass(frozen=True)
class Sum:
    summands: tuple["Term", ...]

    def __str__(self):
        return " + ".join(map(str, self.summands))


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Nil | Prefix | Sum | Const

_TOKEN = re.compile(r"\s*(?:(?P<num>0)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>[=;.+()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos < len(text) and text[pos] == "#":
            while pos < len(text) and text[pos] != "\n":
                pos += 1
            continue
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos=pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _TermParser:
    # Names start upper-case; actions start lower-case.

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None, kind=None):
        tok = self.tokens[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", pos=tok[2])
        self.i += 1
        return tok

    def defs(self) -> list[tuple[str, Term, int]]:
        out = []
        while self.peek()[0] != "eof":
            kind, name, pos = self.take(kind="ident")
            if not name[0].isupper():
                raise ParseError(f"process names must start upper-case: {name!r}", pos=pos)
            self.take("=")
            body = self.sum()
            self.take(";")
            out.append((name, body, pos))
        if not out:
            raise ParseError("no definitions", pos=0)
        return out

    def sum(self) -> Term:
        parts = [self.prefix()]
        while self.peek()[1] == "+":
            self.take("+")
            parts.append(self.prefix())
        flat: list[Term] = []
        for p in parts:
            flat.extend(p.summands if isinstance(p, Sum) else (p,))
        return flat[0] if len(flat) == 1 else Sum(tuple(flat))

    def prefix(self) -> Term:
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return Nil()
        if value == "(":
            self.take("(")
            inner = self.sum()
            self.take(")")
            return inner
        if kind == "ident":
            self.take()
            if value[0].isupper():
                return Const(value)
            self.take(".")
            return Prefix(value, self.prefix())
        raise ParseError(f"expected a process, found {value or 'end of input'!r}", pos=pos)


def _guard_check(env: Mapping[str, Term]) -> None:
    # A constant must not reach itself without passing a prefix.
    def unguarded(t: Term) -> set[str]:
        if isinstance(t, Const):
            return {t.name}
        if isinstance(t, Sum):
            return set().union(*(unguarded(s) for s in t.summands))
        return set()

    edges = {name: unguarded(body) for name, body in env.items()}
    for start in env:
        seen, stack = set(), list(edges[start])
        while stack:
            n = stack.pop()
            if n == start:
                raise ParseError(f"unguarded recursion through {start}")
            if n not in seen:
                seen.add(n)
                stack.extend(edges[n])


def _moves(t: Term, env: Mapping[str, Term]) -> list[tuple[str, Term]]:
    if isinstance(t, Nil):
        return []
    if isinstance(t, Prefix):
        return [(t.action, t.body)]
    if isinstance(t, Sum):
        return [m for s in t.summands for m in _moves(s, env)]
    return _moves(env[t.name], env)


def parse_term(defs: str) -> Lts:
    """Reachable-state LTS of the first definition."""
    parsed = _TermParser(defs).defs()
    env: dict[str, Term] = {}
    for name, body, pos in parsed:
        if name in env:
            raise ParseError(f"duplicate definition of {name}", pos=pos)
        env[name] = body

    def check_names(t: Term):
        if isinstance(t, Const) and t.name not in env:
            raise ParseError(f"undefined name {t.name}")
        for child in (t.summands if isinstance(t, Sum) else (t.body,) if isinstance(t, Prefix) else ()):
            check_names(child)

    for body in env.values():
        check_names(body)
    _guard_check(env)

    root: Term = Const(parsed[0][0])
    index = {root: 0}
    order = [root]
    triples = []
    i = 0
    while i < len(order):
        t = order[i]
        for action, nxt in _moves(t, env):
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            triples.append((i, action, index[nxt]))
        i += 1
    return Lts.from_triples(len(order), sorted(set(triples)), initial=0, names=[str(t) for t in order])


def serialize_term(lts: Lts) -> str:
    """One constant per state; the initial state's constant comes first."""
    start = lts.initial if lts.initial is not None else 0
    order = [start] + [s for s in range(lts.state_count) if s != start]
    lines = []
    for s in order:
        moves = [f"{lts.alphabet[a]}.S{t}" for a in range(len(lts.alphabet)) for t in sorted(lts.succ(s, a))]
        lines.append(f"S{s} = {' + '.join(moves) if moves else '0'};")
    return "\n".join(lines) + "\n"


def load_lts(path: str) -> Lts:
    """Read an LTS choosing the format by extension (.aut, .term, else native)."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".aut"):
        return parse_aut(text)
    if path.endswith(".term"):
        return parse_term(text)
    return parse_native(text)


def dump_lts(lts: Lts, path: str) -> None:
    if path.endswith(".aut"):
        text = serialize_aut(lts)
    elif path.endswith(".term"):
        text = serialize_term(lts)
    else:
        text = serialize_native(lts)
    with open(path, "w") as fh:
        fh.write(text)
