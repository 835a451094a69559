"""Formulas, atoms, multisets and sequents for intuitionistic linear logic."""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Any, Generic, Iterable, Iterator, Mapping, TypeVar

T = TypeVar("T")

USER = "user"
UNIT = "unit"
FLAT = "flat"
_NS_RANK = {USER: 0, UNIT: 1, FLAT: 2}
_USER_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
_UNIT_NAMES = ("top", "0", "1")
KEYWORDS = frozenset({"top"})


class AtomId:
    """A propositional atom. Flattened atoms print as ``#k``; unit mirrors as ``top``, ``0``, ``1``."""

    __slots__ = ("name", "namespace", "_key", "_hash")

    def __init__(self, name: str, namespace: str = USER):
        if namespace == USER:
            if not _USER_RE.match(name) or name in KEYWORDS:
                raise ValueError(f"invalid atom name {name!r}")
        elif namespace == FLAT:
            if not name.isdigit():
                raise ValueError(f"flattened atom index must be numeric, got {name!r}")
        elif namespace == UNIT:
            if name not in _UNIT_NAMES:
                raise ValueError(f"unknown unit atom {name!r}")
        else:
            raise ValueError(f"unknown namespace {namespace!r}")
        self.name = name
        self.namespace = namespace
        sub = (int(name), name) if namespace == FLAT else (0, name)
        self._key = (_NS_RANK[namespace], sub)
        self._hash = hash((namespace, name))

    @classmethod
    def parse(cls, text: str) -> "AtomId":
        if text.startswith("#"):
            return cls(text[1:], FLAT)
        if text in _UNIT_NAMES:
            return cls(text, UNIT)
        return cls(text, USER)

    def __eq__(self, other):
        return isinstance(other, AtomId) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "AtomId"):
        return self._key < other._key

    def __le__(self, other: "AtomId"):
        return self._key <= other._key

    def __str__(self):
        return "#" + self.name if self.namespace == FLAT else self.name

    def __repr__(self):
        return f"AtomId({str(self)!r})"


TOP_ATOM = AtomId("top", UNIT)
ZERO_ATOM = AtomId("0", UNIT)
ONE_ATOM = AtomId("1", UNIT)


def atom(name: str) -> AtomId:
    return AtomId.parse(name)


# ---------------------------------------------------------------- multisets


class Multiset(Generic[T]):
    """Immutable finite multiset stored as a sorted tuple of (item, count) pairs."""

    __slots__ = ("_items", "_size", "_hash")

    def __init__(self, elements: Iterable[T] = ()):
        counts = Counter(elements)
        self._set(tuple(sorted(counts.items())))

    def _set(self, items):
        self._items = items
        self._size = sum(c for _, c in items)
        self._hash = hash(items)

    @classmethod
    def from_counts(cls, counts: Mapping[T, int] | Iterable[tuple[T, int]]) -> "Multiset[T]":
        pairs = counts.items() if isinstance(counts, Mapping) else counts
        acc: Counter = Counter()
        for item, n in pairs:
            if n < 0:
                raise ValueError("negative multiplicity")
            acc[item] += n
        ms = cls.__new__(cls)
        ms._set(tuple(sorted((k, v) for k, v in acc.items() if v > 0)))
        return ms

    @classmethod
    def _raw(cls, items: tuple) -> "Multiset[T]":
        # items already sorted with positive counts
        ms = cls.__new__(cls)
        ms._set(items)
        return ms

    @classmethod
    def of(cls, *elements: T) -> "Multiset[T]":
        return cls(elements)

    def items(self) -> tuple[tuple[T, int], ...]:
        return self._items

    def distinct(self) -> list[T]:
        return [x for x, _ in self._items]

    def count(self, x: T) -> int:
        for y, n in self._items:
            if y == x:
                return n
        return 0

    def counter(self) -> Counter:
        return Counter(dict(self._items))

    def __len__(self):
        return self._size

    def __bool__(self):
        return self._size > 0

    def __iter__(self) -> Iterator[T]:
        for x, n in self._items:
            for _ in range(n):
                yield x

    def __contains__(self, x):
        return self.count(x) > 0

    def __eq__(self, other):
        return isinstance(other, Multiset) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Multiset"):
        return self._items < other._items

    def __add__(self, other: "Multiset[T]") -> "Multiset[T]":
        if not other:
            return self
        if not self:
            return other
        c = dict(self._items)
        for x, n in other._items:
            c[x] = c.get(x, 0) + n
        return Multiset._raw(tuple(sorted(c.items())))

    def __sub__(self, other: "Multiset[T]") -> "Multiset[T]":
        if not other:
            return self
        c = dict(self._items)
        for x, n in other._items:
            have = c.get(x, 0)
            if have < n:
                raise ValueError(f"difference undefined: {x} not contained {n} times")
            c[x] = have - n
        return Multiset._raw(tuple((x, c[x]) for x, _ in self._items if c[x] > 0))

    def __le__(self, other: "Multiset[T]") -> bool:
        oc = dict(other._items)
        return all(oc.get(x, 0) >= n for x, n in self._items)

    def add(self, x: T, n: int = 1) -> "Multiset[T]":
        return self + Multiset._raw(((x, n),))

    def submultisets(self) -> Iterator["Multiset[T]"]:
        """Every sub-multiset, smallest counts first."""
        hit = _SUB_CACHE.get(self)
        if hit is None:
            keys = [x for x, _ in self._items]
            hit = tuple(
                Multiset._raw(tuple((k, c) for k, c in zip(keys, combo) if c))
                for combo in itertools.product(*(range(n + 1) for _, n in self._items))
            )
            if len(_SUB_CACHE) > 100_000:
                _SUB_CACHE.clear()
            _SUB_CACHE[self] = hit
        return iter(hit)

    def __repr__(self):
        return "{" + ", ".join(str(x) for x in self) + "}"


EMPTY: Multiset = Multiset()
_SUB_CACHE: dict = {}


def mset_union(a: Multiset[T], b: Multiset[T]) -> Multiset[T]:
    return a + b


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    # weak compositions of n into k parts, first part ascending
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def enumerate_partitions(m: Multiset[T], k: int) -> Iterator[tuple[Multiset[T], ...]]:
    """Every ordered k-tuple of multisets whose union is ``m``, each exactly once."""
    if k < 1:
        raise ValueError("k must be positive")
    items = m.items()
    per_item = [list(_compositions(n, k)) for _, n in items]
    for choice in itertools.product(*per_item):
        yield tuple(
            Multiset.from_counts((items[j][0], choice[j][i]) for j in range(len(items)))
            for i in range(k)
        )


def partition_count(m: Multiset, k: int) -> int:
    total = 1
    for _, n in m.items():
        total *= comb(n + k - 1, k - 1)
    return total


# ---------------------------------------------------------------- formulas

_PREC = {"lolli": 1, "plus": 2, "with": 3, "tensor": 4, "bang": 5}
_OPS = {"lolli": "-o", "plus": "+", "with": "&", "tensor": "*"}


class Formula:
    __slots__ = ()
    kind: str = ""
    _text: str
    _hash: int
    _degree: int

    def _finish(self, text: str, degree: int):
        object.__setattr__(self, "_text", text)
        object.__setattr__(self, "_hash", hash(text))
        object.__setattr__(self, "_degree", degree)

    def __eq__(self, other):
        return isinstance(other, Formula) and self._text == other._text

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Formula"):
        return self._text < other._text

    def __le__(self, other: "Formula"):
        return self._text <= other._text

    def __str__(self):
        return self._text

    @property
    def degree(self) -> int:
        return self._degree

    def children(self) -> tuple["Formula", ...]:
        return ()


def _wrap(f: Formula, need: bool) -> str:
    return f"({f._text})" if need else f._text


def _prec(f: Formula) -> int:
    return _PREC.get(f.kind, 6)


@dataclass(frozen=True, eq=False, slots=True)
class Atom(Formula):
    atom: AtomId
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "atom"

    def __post_init__(self):
        if self.atom.namespace == UNIT:
            raise ValueError("unit mirror atoms are not formulas; use Top/Zero/One")
        self._finish(str(self.atom), 1)


@dataclass(frozen=True, eq=False, slots=True)
class Top(Formula):
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "top"

    def __post_init__(self):
        self._finish("top", 2)


@dataclass(frozen=True, eq=False, slots=True)
class Zero(Formula):
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "zero"

    def __post_init__(self):
        self._finish("0", 2)


@dataclass(frozen=True, eq=False, slots=True)
class One(Formula):
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "one"

    def __post_init__(self):
        self._finish("1", 2)


class Binary(Formula):
    __slots__ = ()
    left: Formula
    right: Formula

    def __post_init__(self):
        p = _PREC[self.kind]
        if self.kind == "lolli":
            lneed, rneed = _prec(self.left) <= p, _prec(self.right) < p
        else:
            lneed, rneed = _prec(self.left) < p, _prec(self.right) <= p
        text = f"{_wrap(self.left, lneed)} {_OPS[self.kind]} {_wrap(self.right, rneed)}"
        self._finish(text, self.left.degree + self.right.degree + 1)

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, slots=True)
class Lolli(Binary):
    left: Formula
    right: Formula
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "lolli"


@dataclass(frozen=True, eq=False, slots=True)
class Tensor(Binary):
    left: Formula
    right: Formula
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "tensor"


@dataclass(frozen=True, eq=False, slots=True)
class With(Binary):
    left: Formula
    right: Formula
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "with"


@dataclass(frozen=True, eq=False, slots=True)
class Plus(Binary):
    left: Formula
    right: Formula
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "plus"


@dataclass(frozen=True, eq=False, slots=True)
class Bang(Formula):
    body: Formula
    _text: str = field(init=False, repr=False)
    _hash: int = field(init=False, repr=False)
    _degree: int = field(init=False, repr=False)
    kind = "bang"

    def __post_init__(self):
        self._finish("!" + _wrap(self.body, _prec(self.body) < 5), self.body.degree + 1)

    def children(self):
        return (self.body,)


TOP, ZERO, ONE = Top(), Zero(), One()
BINARY = {"lolli": Lolli, "tensor": Tensor, "with": With, "plus": Plus}


def degree(f: Formula) -> int:
    return f.degree


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in f.children():
        yield from subformulas(c)


def formula_atoms(f: Formula) -> set[AtomId]:
    return {g.atom for g in subformulas(f) if isinstance(g, Atom)}


def is_bang(f: Formula) -> bool:
    return isinstance(f, Bang)


def split_bang_context(gamma: Multiset[Formula]) -> tuple[Multiset[Formula], Multiset[Formula]]:
    bangs = [(f, n) for f, n in gamma.items() if isinstance(f, Bang)]
    rest = [(f, n) for f, n in gamma.items() if not isinstance(f, Bang)]
    return Multiset.from_counts(bangs), Multiset.from_counts(rest)


# ---------------------------------------------------------------- sequents


@dataclass(frozen=True, slots=True)
class Sequent:
    context: Multiset
    conclusion: Formula

    def __str__(self):
        ctx = ", ".join(str(f) for f in self.context)
        return f"{ctx} |- {self.conclusion}" if ctx else f"|- {self.conclusion}"

    def formulas(self) -> list[Formula]:
        return list(self.context.distinct()) + [self.conclusion]


# ---------------------------------------------------------------- parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN_RE = re.compile(r"\s*(?:(-o)|(\|-)|([*&+!(),])|(#\d+)|([a-z][a-zA-Z0-9_]*)|([01]))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unknown token {text[pos:].strip()[:1]!r}", pos)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    # binding power of the binary operators; ! is handled as a prefix
    LEVELS = [("-o", Lolli, "right"), ("+", Plus, "left"), ("&", With, "left"), ("*", Tensor, "left")]

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def pos(self) -> int:
        return self.toks[self.i][1]

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def formula(self, level: int = 0) -> Formula:
        if level == len(self.LEVELS):
            return self.prefix()
        op, ctor, assoc = self.LEVELS[level]
        left = self.formula(level + 1)
        if assoc == "right":
            if self.peek() == op:
                self.take()
                return ctor(left, self.formula(level))
            return left
        while self.peek() == op:
            self.take()
            left = ctor(left, self.formula(level + 1))
        return left

    def prefix(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Bang(self.prefix())
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok == "top":
            self.take()
            return TOP
        if tok == "1":
            self.take()
            return ONE
        if tok == "0":
            self.take()
            return ZERO
        if tok.startswith("#"):
            self.take()
            return Atom(AtomId(tok[1:], FLAT))
        if tok[:1].isalpha() and tok[:1].islower():
            self.take()
            return Atom(AtomId(tok))
        raise FormulaSyntaxError(f"unexpected token {tok!r}", self.pos())

    def end(self):
        if self.peek() != "<eof>":
            raise FormulaSyntaxError(f"unexpected token {self.peek()!r}", self.pos())


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.end()
    return f


def parse_sequent(text: str) -> Sequent:
    """Parse ``f1, f2 |- g``. A bare formula is read as a sequent with empty context."""
    p = _Parser(text)
    ctx: list[Formula] = []
    if p.peek() == "|-":
        p.take()
        concl = p.formula()
    else:
        first = p.formula()
        if p.peek() == "<eof>":
            p.end()
            return Sequent(EMPTY, first)
        ctx.append(first)
        while p.peek() == ",":
            p.take()
            ctx.append(p.formula())
        p.take("|-")
        concl = p.formula()
    p.end()
    return Sequent(Multiset(ctx), concl)


def parse_atoms(text: str) -> Multiset[AtomId]:
    parts = [s.strip() for s in text.split(",") if s.strip()]
    return Multiset(AtomId.parse(s) for s in parts)


# ---------------------------------------------------------------- JSON


def formula_to_json(f: Formula) -> dict:
    if isinstance(f, Atom):
        return {"k": "atom", "name": str(f.atom)}
    if isinstance(f, Bang):
        return {"k": "bang", "body": formula_to_json(f.body)}
    if isinstance(f, Binary):
        return {"k": f.kind, "l": formula_to_json(f.left), "r": formula_to_json(f.right)}
    return {"k": f.kind}


def formula_from_json(obj: Any) -> Formula:
    if isinstance(obj, str):
        return parse_formula(obj)
    if not isinstance(obj, dict) or "k" not in obj:
        raise ValueError(f"malformed formula object: {obj!r}")
    k = obj["k"]
    if k == "atom":
        a = AtomId.parse(obj["name"])
        return Atom(a)
    if k == "top":
        return TOP
    if k == "zero":
        return ZERO
    if k == "one":
        return ONE
    if k == "bang":
        return Bang(formula_from_json(obj["body"]))
    if k in BINARY:
        return BINARY[k](formula_from_json(obj["l"]), formula_from_json(obj["r"]))
    raise ValueError(f"unknown formula kind {k!r}")


def multiset_to_json(m: Multiset, item_to_json=lambda x: x) -> list:
    return [[item_to_json(x), n] for x, n in m.items()]


def multiset_from_json(obj: Any, item_from_json=lambda x: x) -> Multiset:
    """Accepts ``[[item, count], ...]`` or a flat list of items."""
    if not isinstance(obj, list):
        raise ValueError(f"multiset must be a list, got {obj!r}")
    pairs = []
    for entry in obj:
        if isinstance(entry, list) and len(entry) == 2 and isinstance(entry[1], int):
            pairs.append((item_from_json(entry[0]), entry[1]))
        else:
            pairs.append((item_from_json(entry), 1))
    return Multiset.from_counts(pairs)


def sequent_to_json(s: Sequent) -> dict:
    return {"ctx": multiset_to_json(s.context, formula_to_json), "concl": formula_to_json(s.conclusion)}


def sequent_from_json(obj: dict) -> Sequent:
    return Sequent(multiset_from_json(obj["ctx"], formula_from_json), formula_from_json(obj["concl"]))
