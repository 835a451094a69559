"""Intuitionistic propositional formulas and their embedding into linear logic."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import ZERO, Atom, AtomId, Bang, Formula, FormulaSyntaxError, Lolli, Multiset, Plus, Sequent, With


class IPLFormula:
    __slots__ = ()


@dataclass(frozen=True)
class IAtom(IPLFormula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class IBottom(IPLFormula):
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class IBinary(IPLFormula):
    left: IPLFormula
    right: IPLFormula
    symbol = "?"
    prec = 0

    def __str__(self):
        def wrap(f, tighter_ok):
            p = getattr(f, "prec", 9)
            return f"({f})" if p < self.prec or (p == self.prec and not tighter_ok) else str(f)

        right_assoc = isinstance(self, IImplies)
        return f"{wrap(self.left, not right_assoc)} {self.symbol} {wrap(self.right, right_assoc)}"


class IAnd(IBinary):
    symbol = "/\\"
    prec = 3


class IOr(IBinary):
    symbol = "\\/"
    prec = 2


class IImplies(IBinary):
    symbol = "->"
    prec = 1


IBOT = IBottom()

_TOKEN = re.compile(r"\s*(?:(/\\)|(\\/)|(->)|([()])|(bot)\b|([a-z][a-zA-Z0-9_]*))")


def _tokens(text: str) -> list[tuple[str, int]]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos:].strip()[:1]!r}", pos)
        out.append((m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    out.append(("<end>", len(text)))
    return out


def parse_ipl(text: str) -> IPLFormula:
    """Parse ``/\\``, ``\\/``, ``->`` (right-associative), ``bot`` and lower-case atoms."""
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i][0]

    def take(expected=None):
        nonlocal i
        tok, pos = toks[i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", pos)
        i += 1
        return tok, pos

    def implication():
        left = disjunction()
        if peek() == "->":
            take()
            return IImplies(left, implication())
        return left

    def disjunction():
        left = conjunction()
        while peek() == "\\/":
            take()
            left = IOr(left, conjunction())
        return left

    def conjunction():
        left = primary()
        while peek() == "/\\":
            take()
            left = IAnd(left, primary())
        return left

    def primary():
        tok, pos = take()
        if tok == "(":
            f = implication()
            take(")")
            return f
        if tok == "bot":
            return IBOT
        if re.fullmatch(r"[a-z][a-zA-Z0-9_]*", tok) and tok != "top":
            return IAtom(tok)
        raise FormulaSyntaxError(f"unexpected {tok!r}", pos)

    f = implication()
    take("<end>")
    return f


def girard_translate(f: IPLFormula) -> Formula:
    if isinstance(f, IAtom):
        return Atom(AtomId(f.name))
    if isinstance(f, IBottom):
        return ZERO
    if isinstance(f, IAnd):
        return With(girard_translate(f.left), girard_translate(f.right))
    if isinstance(f, IOr):
        return Plus(Bang(girard_translate(f.left)), Bang(girard_translate(f.right)))
    if isinstance(f, IImplies):
        return Lolli(Bang(girard_translate(f.left)), girard_translate(f.right))
    raise TypeError(f"not an IPL formula: {f!r}")


def translate_sequent(hyps: list[IPLFormula], goal: IPLFormula) -> Sequent:
    """Hypotheses become banged translations; the goal is translated as is."""
    return Sequent(Multiset(Bang(girard_translate(h)) for h in hyps), girard_translate(goal))
