"""Shared sequent corpus and the small rule universe used by several test modules."""

import itertools

from illbes.base import Base, box, rule, seq
from illbes.core import atom

POSITIVE = [
    "|- a -o a",
    "a, b |- a * b",
    "a * b |- b * a",
    "a & b |- a",
    "a |- a + b",
    "|- 1",
    "1, a |- a",
    "0 |- c",
    "|- top",
    "!a |- a",
    "!a |- a * a",
    "!a |- !!a",
    "!(a & b) |- !a * !b",
]

NEGATIVE = [
    "a |- a * a",
    "a + b |- a",
    "a |- !a",
    "|- 0",
    "a * b |- a",
]

# further provable and unprovable sequents, so the golden corpus has 30 entries
EXTRA_POSITIVE = [
    "a -o b, a |- b",
    "a |- b -o a * b",
    "a & b |- b & a",
    "a + b |- b + a",
    "!a, !b |- !(a * b)",
    "!a |- 1",
    "!a |- !a * !a",
    "0, a |- b",
    "a, b |- top",
    "a * (b + c) |- a * b + a * c",
]
EXTRA_NEGATIVE = [
    "a, b |- a",
    "!a |- b",
]

CORPUS = POSITIVE + NEGATIVE + EXTRA_POSITIVE + EXTRA_NEGATIVE
PROVABLE = set(POSITIVE + EXTRA_POSITIVE)

P, Q = atom("p"), atom("q")
ALPHABET = [P, Q]

# six rules over {p, q} with boxes of at most two sequents
CANDIDATES = [
    rule([], None, P),
    rule([box(seq([], P)), box(seq([], P))], None, Q),
    rule([box(seq([], P), seq([], Q))], None, Q),
    rule([], box(seq([], P)), Q),
    rule([box(seq([P], Q))], None, P),
    rule([box(seq([], Q)), box(seq([Q], P))], None, P),
]


def all_bases() -> list[Base]:
    return [Base(sub) for k in range(len(CANDIDATES) + 1) for sub in itertools.combinations(CANDIDATES, k)]
