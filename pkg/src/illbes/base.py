"""Atomic sequents, additive boxes, atomic rules and bases, with a JSON file format."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

from .core import EMPTY, AtomId, Multiset, multiset_from_json, multiset_to_json

log = logging.getLogger(__name__)


class BaseFormatError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class AtomicSequent:
    premises: Multiset
    conclusion: AtomId

    def __str__(self):
        prem = ", ".join(str(a) for a in self.premises)
        return f"{prem} => {self.conclusion}" if prem else f"=> {self.conclusion}"


def seq(premises: Iterable[AtomId] | Multiset, conclusion: AtomId) -> AtomicSequent:
    if not isinstance(premises, Multiset):
        premises = Multiset(premises)
    return AtomicSequent(premises, conclusion)


@dataclass(frozen=True, order=True)
class AdditiveBox:
    sequents: Multiset

    def __len__(self):
        return len(self.sequents)

    def __iter__(self) -> Iterator[AtomicSequent]:
        return iter(self.sequents)

    def __str__(self):
        return "{" + "; ".join(str(s) for s in self.sequents) + "}"


def box(*sequents: AtomicSequent) -> AdditiveBox:
    return AdditiveBox(Multiset(sequents))


EMPTY_BOX = AdditiveBox(EMPTY)


@dataclass(frozen=True)
class AtomicRule:
    """⟨A, S, p⟩: additive boxes A, modal box S, conclusion p."""

    boxes: Multiset
    modal: AdditiveBox
    conclusion: AtomId
    _key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_key", (self.conclusion, self.boxes, self.modal))

    def __lt__(self, other: "AtomicRule"):
        return self._key < other._key

    def box_list(self) -> list[AdditiveBox]:
        """Boxes with multiplicity, in canonical order."""
        return list(self.boxes)

    def atoms(self) -> set[AtomId]:
        out = {self.conclusion}
        for b in list(self.boxes) + [self.modal]:
            for s in b:
                out.add(s.conclusion)
                out.update(s.premises.distinct())
        return out

    def __str__(self):
        boxes = ", ".join(str(b) for b in self.boxes)
        return f"<[{boxes}], {self.modal}, {self.conclusion}>"


def rule(boxes: Iterable[AdditiveBox], modal: AdditiveBox | None, conclusion: AtomId) -> AtomicRule:
    return AtomicRule(Multiset(boxes), modal if modal is not None else EMPTY_BOX, conclusion)


class Base:
    """A finite set of atomic rules indexed by conclusion."""

    def __init__(self, rules: Iterable[AtomicRule] = ()):
        rules = list(rules)
        self.rules = frozenset(rules)
        if len(self.rules) != len(rules):
            log.info("collapsed %d duplicate rule(s)", len(rules) - len(self.rules))
        self._by_concl: dict[AtomId, list[AtomicRule]] = {}
        for r in sorted(self.rules):
            self._by_concl.setdefault(r.conclusion, []).append(r)
        self._persistent = frozenset(
            r.conclusion for r in self.rules if not r.boxes and len(r.modal) > 0
        )
        self._hash = hash(self.rules)

    def __contains__(self, r: AtomicRule) -> bool:
        return r in self.rules

    def __iter__(self) -> Iterator[AtomicRule]:
        return iter(sorted(self.rules))

    def __len__(self):
        return len(self.rules)

    def __eq__(self, other):
        return isinstance(other, Base) and type(other) is type(self) and self.rules == other.rules

    def __hash__(self):
        return self._hash

    def __le__(self, other: "Base") -> bool:
        return all(r in other for r in self.rules)

    def rules_for(self, goal: AtomId, ctx: Multiset) -> Iterable[AtomicRule]:
        """Candidate rules whose conclusion is ``goal``."""
        return self._by_concl.get(goal, ())

    def plan(self, r: AtomicRule, ctx: Multiset) -> list[Multiset] | None:
        """A fixed context split for ``r`` at ``ctx``, or None to search all splits."""
        return None

    def persistent_needs_context(self, r: AtomicRule) -> bool:
        """Whether persistent items with an empty context may be skipped at ``r``."""
        return False

    def persistent_atoms(self) -> frozenset[AtomId]:
        return self._persistent

    def is_persistent(self, a: AtomId) -> bool:
        return a in self._persistent

    def extend(self, extra: Iterable[AtomicRule]) -> "Base":
        return Base(list(self.rules) + list(extra))

    def atoms(self) -> set[AtomId]:
        out: set[AtomId] = set()
        for r in self.rules:
            out |= r.atoms()
        return out

    def __repr__(self):
        return "Base(" + ", ".join(str(r) for r in self) + ")"


def persistent_atoms(b: Base) -> frozenset[AtomId]:
    return b.persistent_atoms()


# ---------------------------------------------------------------- serialization


def _atom_from_json(x: Any) -> AtomId:
    if not isinstance(x, str):
        raise BaseFormatError(f"atom must be a string, got {x!r}")
    try:
        return AtomId.parse(x)
    except ValueError as e:
        raise BaseFormatError(f"not an atom: {x!r} ({e})") from None


def sequent_to_json(s: AtomicSequent) -> dict:
    return {"prem": multiset_to_json(s.premises, str), "concl": str(s.conclusion)}


def sequent_from_json(obj: Any) -> AtomicSequent:
    if not isinstance(obj, dict) or "concl" not in obj:
        raise BaseFormatError(f"malformed atomic sequent {obj!r}")
    return AtomicSequent(multiset_from_json(obj.get("prem", []), _atom_from_json), _atom_from_json(obj["concl"]))


def rule_to_json(r: AtomicRule) -> dict:
    return {
        "boxes": [[sequent_to_json(s) for s in b] for b in r.boxes],
        "modal": [sequent_to_json(s) for s in r.modal],
        "concl": str(r.conclusion),
    }


def rule_from_json(obj: Any) -> AtomicRule:
    if not isinstance(obj, dict) or "concl" not in obj:
        raise BaseFormatError(f"malformed rule {obj!r}")
    boxes = obj.get("boxes", [])
    if not isinstance(boxes, list) or not all(isinstance(b, list) for b in boxes):
        raise BaseFormatError("rule boxes must be a list of lists of sequents")
    return rule(
        [box(*[sequent_from_json(s) for s in b]) for b in boxes],
        box(*[sequent_from_json(s) for s in obj.get("modal", [])]),
        _atom_from_json(obj["concl"]),
    )


def base_to_json(b: Base) -> dict:
    return {"rules": [rule_to_json(r) for r in b]}


def base_from_json(obj: Any) -> Base:
    if not isinstance(obj, dict) or not isinstance(obj.get("rules"), list):
        raise BaseFormatError('base file must be an object with a "rules" list')
    return Base(rule_from_json(r) for r in obj["rules"])


def validate_base(b: Base) -> None:
    """Raise :class:`BaseFormatError` if an atom lies outside the known namespaces."""
    for a in b.atoms():
        if not isinstance(a, AtomId):
            raise BaseFormatError(f"not an atom: {a!r}")


def load_base(path: str | Path) -> Base:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise BaseFormatError(f"malformed JSON in {path}: {e}") from None
    b = base_from_json(obj)
    validate_base(b)
    return b


def save_base(b: Base, path: str | Path) -> None:
    Path(path).write_text(json.dumps(base_to_json(b), indent=1) + "\n")
