"""Derivability in a base: proof objects, checker, bounded search, cut composition and weakening."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .base import AtomicRule, Base, rule_from_json, rule_to_json
from .core import EMPTY, AtomId, Multiset, multiset_from_json, multiset_to_json

Endsequent = tuple[Multiset, AtomId]


class AtomicCheckError(ValueError):
    """Raised by :func:`check_atomic`. ``kind`` is one of
    rule-not-in-base, persistence, context-mismatch, subderivation-mismatch, shape."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class CutError(ValueError):
    pass


class AtomicDerivation:
    __slots__ = ()

    def endsequent(self) -> Endsequent:
        raise NotImplementedError

    def rules(self) -> set[AtomicRule]:
        raise NotImplementedError

    def height(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Ref(AtomicDerivation):
    atom: AtomId

    def endsequent(self) -> Endsequent:
        return Multiset.of(self.atom), self.atom

    def rules(self):
        return set()

    def height(self):
        return 0


@dataclass(frozen=True)
class BoxUse:
    context: Multiset
    subs: tuple[AtomicDerivation, ...]


@dataclass(frozen=True)
class PersistentUse:
    atom: AtomId
    context: Multiset
    sub: AtomicDerivation


@dataclass(frozen=True)
class App(AtomicDerivation):
    """An application of ``rule``.

    ``boxes`` follows ``rule.box_list()`` and each box's ``subs`` follow the box's sequents in
    canonical order. ``persistent`` lists the elements of D with their contexts, and ``modal``
    holds one derivation per sequent of the modal box.
    """

    rule: AtomicRule
    boxes: tuple[BoxUse, ...]
    persistent: tuple[PersistentUse, ...] = ()
    modal: tuple[AtomicDerivation, ...] = ()
    _end: list = field(default_factory=list, init=False, repr=False, compare=False, hash=False)

    def endsequent(self) -> Endsequent:
        if not self._end:
            ctx = EMPTY
            for b in self.boxes:
                ctx = ctx + b.context
            for u in self.persistent:
                ctx = ctx + u.context
            self._end.append((ctx, self.rule.conclusion))
        return self._end[0]

    def d_multiset(self) -> Multiset:
        return Multiset(u.atom for u in self.persistent)

    def children(self) -> list[AtomicDerivation]:
        out = [s for b in self.boxes for s in b.subs]
        out += [u.sub for u in self.persistent]
        return out + list(self.modal)

    def rules(self):
        out = {self.rule}
        for c in self.children():
            out |= c.rules()
        return out

    def height(self):
        return 1 + max((c.height() for c in self.children()), default=0)


# ---------------------------------------------------------------- checking


def check_atomic(base: Base, d: AtomicDerivation) -> Endsequent:
    """Verify ``d`` against the Ref/App clauses in ``base`` and return its endsequent."""
    if isinstance(d, Ref):
        return d.endsequent()
    if not isinstance(d, App):
        raise AtomicCheckError("shape", f"not a derivation node: {d!r}")
    r = d.rule
    if r not in base:
        raise AtomicCheckError("rule-not-in-base", str(r))
    boxes = r.box_list()
    if len(boxes) != len(d.boxes):
        raise AtomicCheckError("shape", f"rule has {len(boxes)} boxes, node has {len(d.boxes)}")
    for b, use in zip(boxes, d.boxes):
        seqs = list(b)
        if not seqs and use.context:
            raise AtomicCheckError("context-mismatch", "an empty box must have an empty context")
        if len(seqs) != len(use.subs):
            raise AtomicCheckError("shape", f"box {b} needs {len(seqs)} subderivations")
        for s, sub in zip(seqs, use.subs):
            got = check_atomic(base, sub)
            want = (use.context + s.premises, s.conclusion)
            if got != want:
                raise AtomicCheckError("subderivation-mismatch", f"{_show(got)} where {_show(want)} is required")
    for u in d.persistent:
        if not base.is_persistent(u.atom):
            raise AtomicCheckError("persistence", f"{u.atom} is not persistent in the base")
        got = check_atomic(base, u.sub)
        if got != (u.context, u.atom):
            raise AtomicCheckError("subderivation-mismatch", f"{_show(got)} where {_show((u.context, u.atom))} is required")
    modal = list(r.modal)
    if len(modal) != len(d.modal):
        raise AtomicCheckError("shape", f"modal box needs {len(modal)} subderivations")
    dm = d.d_multiset()
    for s, sub in zip(modal, d.modal):
        got = check_atomic(base, sub)
        want = (dm + s.premises, s.conclusion)
        if got != want:
            raise AtomicCheckError("subderivation-mismatch", f"modal {_show(got)} where {_show(want)} is required")
    return d.endsequent()


def _show(e: Endsequent) -> str:
    return f"{e[0]} |- {e[1]}"


def weaken_base(d: AtomicDerivation, c: Base) -> AtomicDerivation:
    """The same derivation, re-verified in the larger base ``c``."""
    missing = [r for r in d.rules() if r not in c]
    if missing:
        raise ValueError(f"target base lacks rule {missing[0]}")
    check_atomic(c, d)
    return d


# ---------------------------------------------------------------- search


class _Search:
    def __init__(self, base: Base, max_context: int | None, d_cap: int):
        self.base = base
        self.max_context = max_context
        self.d_cap = d_cap
        self.persistent = sorted(base.persistent_atoms())
        self.failed: dict[tuple[Multiset, AtomId], int] = {}
        self.found: dict[tuple[Multiset, AtomId], tuple[AtomicDerivation, int]] = {}

    def solve(self, ctx: Multiset, goal: AtomId, depth: int) -> AtomicDerivation | None:
        if len(ctx) == 1 and goal in ctx:
            return Ref(goal)
        if depth <= 0:
            return None
        if self.max_context is not None and len(ctx) > self.max_context:
            return None
        key = (ctx, goal)
        hit = self.found.get(key)
        if hit is not None and hit[1] <= depth:
            return hit[0]
        if self.failed.get(key, 0) >= depth:
            return None
        for r in self.base.rules_for(goal, ctx):
            res = self.apply(r, ctx, depth)
            if res is not None:
                self.found[key] = (res, res.height())
                return res
        self.failed[key] = depth
        return None

    def _d_candidates(self, r: AtomicRule, ctx: Multiset) -> Iterable[tuple[AtomId, ...]]:
        cap = self.d_cap
        if self.max_context is not None:
            cap = min(cap, self.max_context)
        if len(r.modal) == 0 or self.base.persistent_needs_context(r):
            # without a modal box an element of D with an empty context can simply be dropped
            cap = min(cap, len(ctx))
        if not self.persistent:
            cap = 0
        for k in range(cap + 1):
            yield from itertools.combinations_with_replacement(self.persistent, k)

    def apply(self, r: AtomicRule, ctx: Multiset, depth: int) -> App | None:
        sub_depth = depth - 1
        boxes = r.box_list()
        plan = self.base.plan(r, ctx)
        if plan is not None:
            return self._follow(r, boxes, plan, sub_depth)
        modal = list(r.modal)
        for ds in self._d_candidates(r, ctx):
            dm = Multiset(ds)
            modal_subs = []
            for s in modal:
                sub = self.solve(dm + s.premises, s.conclusion, sub_depth)
                if sub is None:
                    break
                modal_subs.append(sub)
            else:
                blocks: list[tuple[str, Any]] = [("box", b) for b in boxes if len(b)]
                blocks += [("pers", a) for a in ds]
                need_nonempty = len(modal) == 0 or self.base.persistent_needs_context(r)
                found = self._assign(ctx, blocks, 0, sub_depth, need_nonempty, None)
                if found is None:
                    continue
                it = iter(found)
                uses = []
                for b in boxes:
                    uses.append(next(it) if len(b) else BoxUse(EMPTY, ()))
                pers = list(it)
                return App(r, tuple(uses), tuple(pers), tuple(modal_subs))
        return None

    def _follow(self, r: AtomicRule, boxes, plan, depth: int) -> App | None:
        uses = []
        for b, c in zip(boxes, plan):
            subs = []
            for s in b:
                sub = self.solve(c + s.premises, s.conclusion, depth)
                if sub is None:
                    return None
                subs.append(sub)
            uses.append(BoxUse(c, tuple(subs)))
        return App(r, tuple(uses), (), ())

    def _assign(self, remaining: Multiset, blocks, j: int, depth: int, need_nonempty: bool, prev):
        if j == len(blocks):
            return [] if not remaining else None
        kind, what = blocks[j]
        last = j == len(blocks) - 1
        choices = [remaining] if last else remaining.submultisets()
        for c in choices:
            if kind == "pers":
                if need_nonempty and not c:
                    continue
                # contexts of equal D elements are kept in non-decreasing order
                if prev is not None and prev[0] == what and c < prev[1]:
                    continue
                sub = self.solve(c, what, depth)
                if sub is None:
                    continue
                rest = self._assign(remaining - c, blocks, j + 1, depth, need_nonempty, (what, c))
                if rest is not None:
                    return [PersistentUse(what, c, sub)] + rest
            else:
                subs = []
                for s in what:
                    sub = self.solve(c + s.premises, s.conclusion, depth)
                    if sub is None:
                        break
                    subs.append(sub)
                else:
                    rest = self._assign(remaining - c, blocks, j + 1, depth, need_nonempty, None)
                    if rest is not None:
                        return [BoxUse(c, tuple(subs))] + rest
        return None


def derive(
    base: Base,
    ctx: Multiset,
    goal: AtomId,
    depth_bound: int,
    max_context: int | None = None,
    max_persistent: int | None = None,
) -> AtomicDerivation | None:
    """Search for a derivation of ``ctx ⊢ goal`` with rule nesting at most ``depth_bound``.

    ``max_context`` optionally caps the context size of every node. Multisets D of persistent
    atoms are limited to ``max_persistent`` elements, by default the larger of the current
    deepening level and the size of ``ctx``. ``None`` means nothing was found within these limits.
    """
    if depth_bound < 1:
        raise ValueError("depth bound must be positive")
    for k in range(1, depth_bound + 1):
        # the cap grows with the level, so failures memoized at one level do not carry over
        d_cap = max_persistent if max_persistent is not None else max(k, len(ctx))
        d = _Search(base, max_context, d_cap).solve(ctx, goal, k)
        if d is not None:
            return d
    return None


# ---------------------------------------------------------------- fixpoint oracle


def multisets_upto(alphabet: Sequence[AtomId], n: int) -> list[Multiset]:
    alphabet = sorted(alphabet)
    out = []
    for k in range(n + 1):
        out.extend(Multiset(c) for c in itertools.combinations_with_replacement(alphabet, k))
    return out


def enumerate_derivable(
    base: Base, alphabet: Iterable[AtomId], max_context: int, max_depth: int
) -> set[tuple[Multiset, AtomId]]:
    """Pairs derivable with rule nesting ≤ ``max_depth`` using only contexts of size ≤ ``max_context``.

    Computed by forward saturation, level by level, independently of :func:`derive`.
    """
    alphabet = sorted(set(alphabet))
    all_ms = multisets_upto(alphabet, max_context)
    pers = sorted(base.persistent_atoms())
    d_all = multisets_upto(pers, max_context) if pers else [EMPTY]
    level = {(Multiset.of(a), a) for a in alphabet}
    for _ in range(max_depth):
        by_concl: dict[AtomId, list[Multiset]] = {}
        for c, a in level:
            by_concl.setdefault(a, []).append(c)
        nxt = set(level)
        for r in base:
            box_opts = []
            for b in r.box_list():
                if not len(b):
                    box_opts.append([EMPTY])
                    continue
                box_opts.append([c for c in all_ms if all((c + s.premises, s.conclusion) in level for s in b)])
            for dm in d_all:
                if not all((dm + s.premises, s.conclusion) in level for s in r.modal):
                    continue
                item_opts = [by_concl.get(a, []) for a in dm]
                for combo in itertools.product(*box_opts, *item_opts):
                    total = sum(len(c) for c in combo)
                    if total > max_context:
                        continue
                    ctx = EMPTY
                    for c in combo:
                        ctx = ctx + c
                    nxt.add((ctx, r.conclusion))
        if nxt == level:
            break
        level = nxt
    return level


# ---------------------------------------------------------------- cut


def cut_compose(host: AtomicDerivation, plugs: Sequence[AtomicDerivation], base: Base | None = None) -> AtomicDerivation:
    """Replace hypotheses of ``host`` by the plug derivations.

    The plug conclusions form the cut multiset P, which must be contained in the host's context.
    The result derives T₁ ⊎ … ⊎ Tₙ ⊎ S ⊢ q, where S is the rest of the host's context and Tᵢ the
    plug contexts. When ``base`` is given the result is checked in it.
    """
    ctx, _ = host.endsequent()
    cut = Multiset(p.endsequent()[1] for p in plugs)
    if not cut <= ctx:
        raise CutError(f"plug conclusions {cut} are not contained in the host context {ctx}")
    out = _cut(host, list(plugs))
    if base is not None:
        check_atomic(base, out)
    return out


def _take(context: Multiset, plugs: list[AtomicDerivation]) -> tuple[list, list]:
    avail = context.counter()
    mine, rest = [], []
    for p in plugs:
        a = p.endsequent()[1]
        if avail[a] > 0:
            avail[a] -= 1
            mine.append(p)
        else:
            rest.append(p)
    return mine, rest


def _replaced(context: Multiset, plugs: list[AtomicDerivation]) -> Multiset:
    out = context - Multiset(p.endsequent()[1] for p in plugs)
    for p in plugs:
        out = out + p.endsequent()[0]
    return out


def _cut(d: AtomicDerivation, plugs: list[AtomicDerivation]) -> AtomicDerivation:
    if not plugs:
        return d
    if isinstance(d, Ref):
        if len(plugs) == 1 and plugs[0].endsequent()[1] == d.atom:
            return plugs[0]
        raise CutError("plugs do not match a hypothesis leaf")
    assert isinstance(d, App)
    remaining = plugs
    boxes = []
    for use in d.boxes:
        mine, remaining = _take(use.context, remaining)
        boxes.append(BoxUse(_replaced(use.context, mine), tuple(_cut(s, mine) for s in use.subs)))
    pers = []
    for u in d.persistent:
        mine, remaining = _take(u.context, remaining)
        pers.append(PersistentUse(u.atom, _replaced(u.context, mine), _cut(u.sub, mine)))
    if remaining:
        raise CutError("plugs left over after distributing along the partition")
    return App(d.rule, tuple(boxes), tuple(pers), d.modal)


# ---------------------------------------------------------------- JSON


def derivation_to_json(d: AtomicDerivation, base: Base | None = None) -> dict:
    index = {r: i for i, r in enumerate(base)} if base is not None else {}
    return _to_json(d, index)


def _to_json(d: AtomicDerivation, index: dict) -> dict:
    if isinstance(d, Ref):
        return {"node": "ref", "atom": str(d.atom)}
    assert isinstance(d, App)
    return {
        "node": "app",
        "rule": index[d.rule] if d.rule in index else rule_to_json(d.rule),
        "boxes": [{"ctx": multiset_to_json(b.context, str), "subs": [_to_json(s, index) for s in b.subs]}
                  for b in d.boxes],
        "persistent": [{"atom": str(u.atom), "ctx": multiset_to_json(u.context, str), "sub": _to_json(u.sub, index)}
                       for u in d.persistent],
        "modal": [_to_json(s, index) for s in d.modal],
    }


def derivation_from_json(obj: Any, base: Base | None = None) -> AtomicDerivation:
    rules = list(base) if base is not None else []
    return _from_json(obj, rules)


def _from_json(obj: Any, rules: list[AtomicRule]) -> AtomicDerivation:
    if not isinstance(obj, dict):
        raise ValueError("malformed derivation node")
    if obj.get("node") == "ref":
        return Ref(AtomId.parse(obj["atom"]))
    if obj.get("node") != "app":
        raise ValueError(f"unknown node kind {obj.get('node')!r}")
    r = obj["rule"]
    if isinstance(r, int):
        if not 0 <= r < len(rules):
            raise ValueError(f"rule index {r} out of range")
        r = rules[r]
    else:
        r = rule_from_json(r)
    return App(
        r,
        tuple(BoxUse(multiset_from_json(b["ctx"], AtomId.parse), tuple(_from_json(s, rules) for s in b["subs"]))
              for b in obj.get("boxes", [])),
        tuple(PersistentUse(AtomId.parse(u["atom"]), multiset_from_json(u["ctx"], AtomId.parse),
                            _from_json(u["sub"], rules)) for u in obj.get("persistent", [])),
        tuple(_from_json(s, rules) for s in obj.get("modal", [])),
    )
