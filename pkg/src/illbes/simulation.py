"""Completeness pipeline: flattening, the simulation base, validity search and de-flattening."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable

from .atomic import (
    App,
    AtomicDerivation,
    BoxUse,
    PersistentUse,
    Ref,
    check_atomic,
    cut_compose,
    derive,
    multisets_upto,
    weaken_base,
)
from .base import AdditiveBox, AtomicRule, Base, box, rule, seq
from .core import (
    EMPTY,
    FLAT,
    ONE,
    ONE_ATOM,
    TOP,
    TOP_ATOM,
    UNIT,
    ZERO,
    ZERO_ATOM,
    Atom,
    AtomId,
    Bang,
    Formula,
    Lolli,
    Multiset,
    One,
    Plus,
    Sequent,
    Tensor,
    Top,
    With,
    Zero,
    subformulas,
)
from .nill import (
    NILLDerivation,
    StarBang,
    StarBox,
    StarDerivation,
    StarRef,
    check_nill,
    check_star,
    instantiate_schema,
    nill_of_star,
    star_app,
)

_UNIT_ATOM = {"top": TOP_ATOM, "zero": ZERO_ATOM, "one": ONE_ATOM}
_ATOM_UNIT = {TOP_ATOM: TOP, ZERO_ATOM: ZERO, ONE_ATOM: ONE}


class FlatteningError(ValueError):
    pass


def subformula_closure(s: Sequent) -> frozenset[Formula]:
    out: set[Formula] = set()
    for f in s.formulas():
        out.update(subformulas(f))
    return frozenset(out)


def _is_flat_target(f: Formula) -> bool:
    return not isinstance(f, (Atom, Top, Zero, One))


@dataclass(frozen=True)
class FlatteningMap:
    domain: frozenset
    forward: dict
    inverse: dict

    def __hash__(self):
        return hash(self.domain)

    def flatten(self, f: Formula) -> AtomId:
        if isinstance(f, Atom):
            return f.atom
        if f.kind in _UNIT_ATOM:
            return _UNIT_ATOM[f.kind]
        try:
            return self.forward[f]
        except KeyError:
            raise FlatteningError(f"{f} is outside the flattening domain") from None

    def deflatten(self, a: AtomId) -> Formula:
        if a in self.inverse:
            return self.inverse[a]
        if a.namespace == UNIT:
            return _ATOM_UNIT[a]
        if a.namespace == FLAT and Atom(a) not in self.domain:
            raise FlatteningError(f"{a} is not in the image of the flattening map")
        return Atom(a)

    def flatten_all(self, fs: Multiset) -> Multiset:
        return Multiset.from_counts((self.flatten(f), n) for f, n in fs.items())

    def deflatten_all(self, atoms: Multiset) -> Multiset:
        return Multiset.from_counts((self.deflatten(a), n) for a, n in atoms.items())


def make_flattening(xi: Iterable[Formula]) -> FlatteningMap:
    """Name the non-atomic formulas of ``xi`` ``#1, #2, …`` in canonical order, skipping taken names."""
    xi = frozenset(xi)
    taken = {f.atom.name for f in xi if isinstance(f, Atom) and f.atom.namespace == FLAT}
    forward, inverse = {}, {}
    k = 0
    for f in sorted(g for g in xi if _is_flat_target(g)):
        k += 1
        while str(k) in taken:
            k += 1
        a = AtomId(str(k), FLAT)
        forward[f] = a
        inverse[a] = f
    return FlatteningMap(xi, forward, inverse)


def flatten(m: FlatteningMap, f: Formula) -> AtomId:
    return m.flatten(f)


def deflatten(m: FlatteningMap, a: AtomId) -> Formula:
    return m.deflatten(a)


# ---------------------------------------------------------------- the simulation base


class SimulationBase(Base):
    """The flattened natural-deduction rules for a fixed domain, plus optional extra rules.

    Rules whose conclusion is an arbitrary atom, and the unit families with any number of
    boxes, are instantiated on demand for the goal at hand.
    """

    def __init__(self, m: FlatteningMap, extra: Iterable[AtomicRule] = ()):
        self.m = m
        self.labels: dict[AtomicRule, tuple[str, dict]] = {}
        self.families: list[tuple[str, dict, Callable[[AtomId], AtomicRule]]] = []
        f = m.flatten
        explicit: list[AtomicRule] = []

        def add(r: AtomicRule, name: str, inst: dict):
            self.labels.setdefault(r, (name, inst))
            explicit.append(r)

        add(rule([], None, ONE_ATOM), "1I", {})
        self.families.append(("1E", {}, lambda p: rule([box(seq([], ONE_ATOM)), box(seq([], p))], None, p)))
        for x in sorted(m.domain):
            if isinstance(x, Lolli):
                a, b = x.left, x.right
                add(rule([box(seq([f(a)], f(b)))], None, f(x)), "-oI", {"phi": a, "psi": b})
                add(rule([box(seq([], f(x))), box(seq([], f(a)))], None, f(b)), "-oE", {"phi": a, "psi": b})
            elif isinstance(x, Tensor):
                a, b = x.left, x.right
                add(rule([box(seq([], f(a))), box(seq([], f(b)))], None, f(x)), "*I", {"phi": a, "psi": b})
                self.families.append(("*E", {"phi": a, "psi": b}, _tensor_elim(f(x), f(a), f(b))))
            elif isinstance(x, With):
                a, b = x.left, x.right
                add(rule([box(seq([], f(a)), seq([], f(b)))], None, f(x)), "&I", {"phi": a, "psi": b})
                add(rule([box(seq([], f(x)))], None, f(a)), "&E1", {"phi": a, "psi": b})
                add(rule([box(seq([], f(x)))], None, f(b)), "&E2", {"phi": a, "psi": b})
            elif isinstance(x, Plus):
                a, b = x.left, x.right
                add(rule([box(seq([], f(a)))], None, f(x)), "+I1", {"phi": a, "psi": b})
                add(rule([box(seq([], f(b)))], None, f(x)), "+I2", {"phi": a, "psi": b})
                self.families.append(("+E", {"phi": a, "psi": b}, _plus_elim(f(x), f(a), f(b))))
            elif isinstance(x, Bang):
                a = x.body
                add(rule([], box(seq([], f(a))), f(x)), "Prom", {"phi": a})
                for y in sorted(m.domain):
                    add(rule([box(seq([], f(x))), box(seq([f(a)], f(y)))], None, f(y)), "Der", {"phi": a, "psi": y})
                self.families.append(("Wk", {"phi": a}, _weakening(f(x))))
                self.families.append(("Ctr", {"phi": a}, _contraction(f(x))))
        self.explicit = frozenset(explicit)
        self.extra = frozenset(r for r in extra if r not in self.explicit)
        super().__init__(list(self.explicit) + list(self.extra))
        self.search_shortcuts = True
        self._family_cache: dict[AtomId, list[AtomicRule]] = {}
        self._plans: dict[tuple[AtomicRule, Multiset], list[Multiset]] = {}

    def __eq__(self, other):
        return isinstance(other, SimulationBase) and self.m.domain == other.m.domain and self.rules == other.rules

    def __hash__(self):
        return hash((self.m.domain, self.rules))

    def extend(self, extra: Iterable[AtomicRule]) -> "SimulationBase":
        return SimulationBase(self.m, list(self.extra) + list(extra))

    def __contains__(self, r: AtomicRule) -> bool:
        return r in self.rules or self.classify(r) is not None

    def rules_for(self, goal: AtomId, ctx: Multiset) -> list[AtomicRule]:
        out = list(self._by_concl.get(goal, ()))
        fam = self._family_cache.get(goal)
        if fam is None:
            fam = [make(goal) for _, _, make in self.families]
            self._family_cache[goal] = fam
        out += fam
        if goal == TOP_ATOM:
            r = _top_rule(list(ctx))
            self._plans[(r, ctx)] = [Multiset.of(b.sequents.distinct()[0].conclusion) for b in r.box_list()]
            out.append(r)
        for z in ctx.submultisets():
            r = _zero_rule(list(ctx - z), goal)
            contexts, placed = [], False
            for b in r.box_list():
                q = b.sequents.distinct()[0].conclusion
                if q == ZERO_ATOM and not placed:
                    contexts.append(z)
                    placed = True
                else:
                    contexts.append(Multiset.of(q))
            self._plans[(r, ctx)] = contexts
            out.append(r)
        return out

    def persistent_needs_context(self, r: AtomicRule) -> bool:
        # an item proved from no hypotheses can be cut into the modal premise instead
        return self.search_shortcuts

    def plan(self, r: AtomicRule, ctx: Multiset) -> list[Multiset] | None:
        return self._plans.get((r, ctx))

    def classify(self, r: AtomicRule) -> tuple[str, dict] | None:
        """Name and formula instantiation of the flattened schema ``r`` comes from."""
        hit = self.labels.get(r)
        if hit is not None:
            return hit
        if r in self.extra:
            return None
        for name, inst, make in self.families:
            if make(r.conclusion) == r:
                if name in ("1E", "*E", "+E", "Wk", "Ctr"):
                    inst = dict(inst)
                    key = "chi" if name in ("1E", "*E", "+E") else "psi"
                    inst[key] = self.m.deflatten(r.conclusion)
                return name, inst
        if len(r.modal) or not all(len(b) == 1 and not b.sequents.distinct()[0].premises for b in r.box_list()):
            return None
        qs = [b.sequents.distinct()[0].conclusion for b in r.box_list()]
        try:
            if r.conclusion == TOP_ATOM:
                return "topI", {"phis": [self.m.deflatten(q) for q in qs]}
            if ZERO_ATOM in qs:
                qs.remove(ZERO_ATOM)
                return "0E", {"phis": [self.m.deflatten(q) for q in qs], "chi": self.m.deflatten(r.conclusion)}
        except FlatteningError:
            return None
        return None


def _tensor_elim(t: AtomId, a: AtomId, b: AtomId):
    return lambda p: rule([box(seq([], t)), box(seq([a, b], p))], None, p)


def _plus_elim(s: AtomId, a: AtomId, b: AtomId):
    return lambda p: rule([box(seq([], s)), box(seq([a], p), seq([b], p))], None, p)


def _weakening(bang: AtomId):
    return lambda p: rule([box(seq([], bang)), box(seq([], p))], None, p)


def _contraction(bang: AtomId):
    return lambda p: rule([box(seq([], bang)), box(seq([bang, bang], p))], None, p)


def _top_rule(qs: list[AtomId]) -> AtomicRule:
    return rule([box(seq([], q)) for q in qs], None, TOP_ATOM)


def _zero_rule(qs: list[AtomId], p: AtomId) -> AtomicRule:
    return rule([box(seq([], q)) for q in qs] + [box(seq([], ZERO_ATOM))], None, p)


def build_simulation_base(xi: Iterable[Formula], m: FlatteningMap) -> SimulationBase:
    xi = frozenset(xi)
    if xi != m.domain:
        raise FlatteningError("flattening map domain differs from the given formula set")
    for f in xi:
        for g in f.children():
            if g not in xi:
                raise FlatteningError(f"formula set is not closed under subformulas: {g} missing")
    return SimulationBase(m)


def prom_rule(m: FlatteningMap, phi: Formula) -> AtomicRule:
    return rule([], box(seq([], m.flatten(phi))), m.flatten(Bang(phi)))


def axiom_rule(a: AtomId) -> AtomicRule:
    return rule([], None, a)


# ---------------------------------------------------------------- de-flattening


def deflat_star(m: FlatteningMap, n: SimulationBase, d: AtomicDerivation) -> StarDerivation:
    """Read an atomic derivation in the simulation base as a schematic derivation."""
    if isinstance(d, Ref):
        return StarRef(m.deflatten(d.atom))
    assert isinstance(d, App)
    label = n.classify(d.rule)
    if label is None:
        raise FlatteningError(f"rule {d.rule} is not a flattened schema instance")
    name, inst = label
    shape = instantiate_schema(name, inst)
    atomic = list(zip(d.rule.box_list(), d.boxes))
    used = [False] * len(atomic)
    boxes = []
    for sb in shape.boxes:
        flat_box = box(*[seq(m.flatten_all(c), m.flatten(g)) for c, g in sb])
        j = next(i for i, (b, _) in enumerate(atomic) if not used[i] and b == flat_box)
        used[j] = True
        b, use = atomic[j]
        order = list(b)
        taken = [False] * len(order)
        subs = []
        for c, g in sb:
            s = seq(m.flatten_all(c), m.flatten(g))
            k = next(i for i, t in enumerate(order) if not taken[i] and t == s)
            taken[k] = True
            subs.append(deflat_star(m, n, use.subs[k]))
        boxes.append(StarBox(m.deflatten_all(use.context), tuple(subs)))
    bangs = [StarBang(m.deflatten_all(u.context), m.deflatten(u.atom), deflat_star(m, n, u.sub)) for u in d.persistent]
    modal = [deflat_star(m, n, s) for s in d.modal]
    return star_app(name, inst, boxes, bangs, modal)


def deflat_derivation(m: FlatteningMap, n: SimulationBase, d: AtomicDerivation) -> NILLDerivation:
    return nill_of_star(deflat_star(m, n, d))


def _setup(s: Sequent):
    xi = subformula_closure(s)
    m = make_flattening(xi)
    return m, build_simulation_base(xi, m)


def prove_star(s: Sequent, depth_bound: int) -> StarDerivation | None:
    """Schematic derivation of ``s`` found by atomic search in the simulation base."""
    m, n = _setup(s)
    d = derive(n, m.flatten_all(s.context), m.flatten(s.conclusion), depth_bound)
    if d is None:
        return None
    out = deflat_star(m, n, d)
    if check_star(out) != s:
        raise AssertionError("de-flattened derivation has the wrong endsequent")
    return out


def check_validity(s: Sequent, depth_bound: int) -> NILLDerivation | None:
    """Search the simulation base for ``s`` and return a kernel-checked natural deduction proof."""
    m, n = _setup(s)
    d = derive(n, m.flatten_all(s.context), m.flatten(s.conclusion), depth_bound)
    if d is None:
        return None
    check_atomic(n, d)
    out = deflat_derivation(m, n, d)
    if check_nill(out) != s:
        raise AssertionError("de-flattened proof has the wrong endsequent")
    return out


# ---------------------------------------------------------------- structural cut


def app_of(r: AtomicRule, pieces: list[tuple[AdditiveBox, BoxUse]], persistent=(), modal=()) -> App:
    """Build an App node, placing box uses into the rule's canonical box order."""
    pool = list(pieces)
    uses = []
    for b in r.box_list():
        j = next(i for i, (pb, _) in enumerate(pool) if pb == b)
        uses.append(pool.pop(j)[1])
    return App(r, tuple(uses), tuple(persistent), tuple(modal))


def _wk(m: FlatteningMap, phi: Formula, p: AtomId, sub: AtomicDerivation, ctx: Multiset) -> App:
    bang = m.flatten(Bang(phi))
    r = _weakening(bang)(p)
    return app_of(r, [(box(seq([], bang)), BoxUse(Multiset.of(bang), (Ref(bang),))),
                      (box(seq([], p)), BoxUse(ctx, (sub,)))])


def _ctr_once(m: FlatteningMap, phi: Formula, d: AtomicDerivation) -> App:
    bang = m.flatten(Bang(phi))
    ctx, p = d.endsequent()
    r = _contraction(bang)(p)
    return app_of(r, [(box(seq([], bang)), BoxUse(Multiset.of(bang), (Ref(bang),))),
                      (box(seq([bang, bang], p)), BoxUse(ctx - Multiset.of(bang, bang), (d,)))])


def cut_closed_premise(m: FlatteningMap, phi: Formula, host: AtomicDerivation, closed: AtomicDerivation,
                       b: Base, c: Base) -> AtomicDerivation:
    """From m(!φ) ⊎ K ⊢_B p and ∅ ⊢_C m(φ) build K ⊢_C p."""
    bang = m.flatten(Bang(phi))
    ctx, _ = check_atomic(b, host)
    if bang not in ctx:
        raise ValueError(f"host context lacks {bang}")
    if check_atomic(c, closed) != (EMPTY, m.flatten(phi)):
        raise ValueError("closed premise must derive m(φ) from no hypotheses")
    if not b <= c:
        raise ValueError("second base must extend the first")
    promoted = App(prom_rule(m, phi), (), (), (closed,))
    return cut_compose(weaken_base(host, c), [promoted], c)


def discharge_axiom(m: FlatteningMap, phi: Formula, e: AtomicDerivation, b: Base) -> AtomicDerivation:
    """From K ⊢_C p, where C is ``b`` plus the axiom ⇒ m(φ), build m(!φ) ⊎ K ⊢_B p."""
    ax = axiom_rule(m.flatten(phi))
    c = b.extend([ax]) if isinstance(b, SimulationBase) else Base(list(b.rules) + [ax])
    check_atomic(c, e)
    out = _discharge(m, phi, ax, e, b)
    check_atomic(b, out)
    return out


def _discharge(m: FlatteningMap, phi: Formula, ax: AtomicRule, e: AtomicDerivation, b: Base) -> AtomicDerivation:
    bang = m.flatten(Bang(phi))
    one = Multiset.of(bang)
    if isinstance(e, Ref):
        return _wk(m, phi, e.atom, e, e.endsequent()[0])
    assert isinstance(e, App)
    pers = [PersistentUse(u.atom, one + u.context, _discharge(m, phi, ax, u.sub, b)) for u in e.persistent]
    if e.rule == ax and ax not in b:
        a = m.flatten(phi)
        r = rule([box(seq([], bang)), box(seq([a], a))], None, a)
        node = app_of(r, [(box(seq([], bang)), BoxUse(one, (Ref(bang),))),
                          (box(seq([a], a)), BoxUse(EMPTY, (Ref(a),)))], pers)
        copies = 1 + len(pers)
    else:
        uses = []
        copies = 0
        for bx, use in zip(e.rule.box_list(), e.boxes):
            if len(bx):
                uses.append(BoxUse(one + use.context, tuple(_discharge(m, phi, ax, s, b) for s in use.subs)))
                copies += 1
            else:
                uses.append(use)
        pers.append(PersistentUse(bang, one, Ref(bang)))
        copies += len(pers)
        modal = tuple(_discharge(m, phi, ax, s, b) for s in e.modal)
        node = App(e.rule, tuple(uses), tuple(pers), modal)
    out: AtomicDerivation = node
    for _ in range(copies - 1):
        out = _ctr_once(m, phi, out)
    return out


def structural_cut_transform(m: FlatteningMap, phi: Formula, direction: str, **inputs) -> AtomicDerivation:
    """``direction`` is ``"1to2"`` (inputs host, closed, base, ext) or ``"2to1"`` (inputs derivation, base)."""
    if Bang(phi) not in m.domain:
        raise FlatteningError(f"!{phi} is outside the flattening domain")
    if direction == "1to2":
        return cut_closed_premise(m, phi, inputs["host"], inputs["closed"], inputs["base"], inputs["ext"])
    if direction == "2to1":
        return discharge_axiom(m, phi, inputs["derivation"], inputs["base"])
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------- definition checks


@dataclass
class ClauseReport:
    clause: str
    formula: str
    instances: int = 0
    failures: list = None

    def __post_init__(self):
        if self.failures is None:
            self.failures = []

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"clause": self.clause, "formula": self.formula, "instances": self.instances,
                "failures": self.failures[:5], "passed": self.passed}


def sim_base_definition_checks(xi: Iterable[Formula], m: FlatteningMap | None = None,
                               mset_bound: int = 2, depth: int = 4) -> list[ClauseReport]:
    """Check both directions of each flattened connective clause on small instances.

    For a formula x the bases range over the simulation base and its extensions by axioms
    ⇒ m(ψ) for the immediate subformulas ψ of x. The multisets L and K and the atom p range
    over the images of x and its immediate subformulas, plus one further atom.
    """
    xi = frozenset(xi)
    m = m or make_flattening(xi)
    n0 = build_simulation_base(xi, m)
    everything = sorted({m.flatten(f) for f in xi})
    reports = []
    for x in sorted(xi):
        kind = x.kind
        if kind == "atom":
            continue
        subs = list(x.children())
        local = {m.flatten(x)} | {m.flatten(c) for c in subs}
        spare = [a for a in everything if a not in local]
        alphabet = sorted(local | set(spare[:1]))
        ls = multisets_upto(alphabet, mset_bound)
        cands = sorted({axiom_rule(m.flatten(c)) for c in subs})
        bases = [n0.extend(c) for k in range(len(cands) + 1) for c in itertools.combinations(cands, k)]
        rep = ClauseReport(kind, str(x))
        _CLAUSES[kind](m, x, bases, ls, alphabet, depth, rep)
        reports.append(rep)
    return reports


@functools.lru_cache(maxsize=200_000)
def _derive(base: Base, ctx: Multiset, goal: AtomId, depth: int) -> AtomicDerivation | None:
    return derive(base, ctx, goal, depth)


def _fail(rep: ClauseReport, msg: str):
    rep.failures.append(msg)


def _ok(rep: ClauseReport, base: Base, d: AtomicDerivation, want) -> None:
    rep.instances += 1
    try:
        got = check_atomic(base, d)
    except ValueError as e:
        _fail(rep, f"witness does not check: {e}")
        return
    if got != want:
        _fail(rep, f"witness proves {got}, expected {want}")


def _supersets(bases, b):
    return [c for c in bases if b <= c]


def _check_with(m, x, bases, ls, alphabet, depth, rep):
    fx, fa, fb = m.flatten(x), m.flatten(x.left), m.flatten(x.right)
    for b in bases:
        for L in ls:
            whole = _derive(b, L, fx, depth)
            left, right = _derive(b, L, fa, depth), _derive(b, L, fb, depth)
            if whole is not None:
                for elim, target in (("&E1", fa), ("&E2", fb)):
                    r = rule([box(seq([], fx))], None, target)
                    _ok(rep, b, App(r, (BoxUse(L, (whole,)),)), (L, target))
            if left is not None and right is not None:
                r = rule([box(seq([], fa), seq([], fb))], None, fx)
                subs = (left, right) if list(r.box_list()[0])[0].conclusion == fa else (right, left)
                _ok(rep, b, App(r, (BoxUse(L, subs),)), (L, fx))
            if (whole is not None) != (left is not None and right is not None):
                rep.instances += 1
                if _derive(b, L, fx, depth + 1) is None or (
                        _derive(b, L, fa, depth + 1) is None or _derive(b, L, fb, depth + 1) is None):
                    _fail(rep, f"sides disagree at L={L}")


def _check_lolli(m, x, bases, ls, alphabet, depth, rep):
    fx, fa, fb = m.flatten(x), m.flatten(x.left), m.flatten(x.right)
    for b in bases:
        for L in ls:
            whole = _derive(b, L, fx, depth)
            body = _derive(b, L.add(fa), fb, depth)
            if whole is not None:
                r = rule([box(seq([], fx)), box(seq([], fa))], None, fb)
                d = app_of(r, [(box(seq([], fx)), BoxUse(L, (whole,))), (box(seq([], fa)), BoxUse(Multiset.of(fa), (Ref(fa),)))])
                _ok(rep, b, d, (L.add(fa), fb))
            if body is not None:
                r = rule([box(seq([fa], fb))], None, fx)
                _ok(rep, b, App(r, (BoxUse(L, (body,)),)), (L, fx))


def _quantified(m, x, bases, ls, alphabet, depth, rep, premise, build, intro):
    """Shared driver for the clauses of the form: L ⊢ m(x) iff for all C ⊇ B, K, p, premise ⇒ L⊎K ⊢_C p."""
    fx = m.flatten(x)
    for b in bases:
        for L in ls:
            whole = _derive(b, L, fx, depth)
            universal = True
            for c in _supersets(bases, b):
                for K in ls:
                    for p in alphabet:
                        prem = premise(c, K, p)
                        if prem is None:
                            continue
                        concl = _derive(c, L + K, p, depth)
                        if concl is None:
                            universal = False
                        if whole is not None:
                            _ok(rep, c, build(weaken_base(whole, c), L, K, p, prem), (L + K, p))
            # right to left: the instance C = B, K = ∅, p = m(x) has a premise built by the introduction rule
            witness = intro(b)
            if witness is not None:
                _ok(rep, b, witness[0], witness[1])
            if universal and whole is None:
                _fail(rep, f"universal side holds but {L} ⊢ {fx} was not found")


def _check_tensor(m, x, bases, ls, alphabet, depth, rep):
    fx, fa, fb = m.flatten(x), m.flatten(x.left), m.flatten(x.right)

    def premise(c, K, p):
        return _derive(c, K.add(fa).add(fb), p, depth)

    def build(whole, L, K, p, prem):
        r = _tensor_elim(fx, fa, fb)(p)
        return app_of(r, [(box(seq([], fx)), BoxUse(L, (whole,))), (box(seq([fa, fb], p)), BoxUse(K, (prem,)))])

    def intro(b):
        r = rule([box(seq([], fa)), box(seq([], fb))], None, fx)
        d = app_of(r, [(box(seq([], fa)), BoxUse(Multiset.of(fa), (Ref(fa),))),
                       (box(seq([], fb)), BoxUse(Multiset.of(fb), (Ref(fb),)))])
        return d, (Multiset.of(fa, fb), fx)

    _quantified(m, x, bases, ls, alphabet, depth, rep, premise, build, intro)


def _check_one(m, x, bases, ls, alphabet, depth, rep):
    def premise(c, K, p):
        return _derive(c, K, p, depth)

    def build(whole, L, K, p, prem):
        r = rule([box(seq([], ONE_ATOM)), box(seq([], p))], None, p)
        return app_of(r, [(box(seq([], ONE_ATOM)), BoxUse(L, (whole,))), (box(seq([], p)), BoxUse(K, (prem,)))])

    def intro(b):
        return App(rule([], None, ONE_ATOM), ()), (EMPTY, ONE_ATOM)

    _quantified(m, x, bases, ls, alphabet, depth, rep, premise, build, intro)


def _check_plus(m, x, bases, ls, alphabet, depth, rep):
    fx, fa, fb = m.flatten(x), m.flatten(x.left), m.flatten(x.right)

    def premise(c, K, p):
        left = _derive(c, K.add(fa), p, depth)
        right = left and _derive(c, K.add(fb), p, depth)
        return (left, right) if right is not None and left is not None else None

    def build(whole, L, K, p, prem):
        r = _plus_elim(fx, fa, fb)(p)
        minor = box(seq([fa], p), seq([fb], p))
        subs = prem if list(minor)[0].premises == Multiset.of(fa) else prem[::-1]
        return app_of(r, [(box(seq([], fx)), BoxUse(L, (whole,))), (minor, BoxUse(K, tuple(subs)))])

    def intro(b):
        r = rule([box(seq([], fa))], None, fx)
        return App(r, (BoxUse(Multiset.of(fa), (Ref(fa),)),)), (Multiset.of(fa), fx)

    _quantified(m, x, bases, ls, alphabet, depth, rep, premise, build, intro)


def _check_top(m, x, bases, ls, alphabet, depth, rep):
    for b in bases:
        for L in ls:
            d = _derive(b, L, TOP_ATOM, depth)
            if d is None:
                rep.instances += 1
                _fail(rep, f"{L} ⊢ ⊤ not found")
            else:
                _ok(rep, b, d, (L, TOP_ATOM))


def _check_zero(m, x, bases, ls, alphabet, depth, rep):
    for b in bases:
        for L in ls:
            whole = _derive(b, L, ZERO_ATOM, depth)
            universal = True
            for K in ls:
                for p in alphabet:
                    if _derive(b, L + K, p, depth) is None:
                        universal = False
                    if whole is not None:
                        qs = list(K)
                        r = _zero_rule(qs, p)
                        pieces = [(box(seq([], q)), BoxUse(Multiset.of(q), (Ref(q),))) for q in qs]
                        pieces.append((box(seq([], ZERO_ATOM)), BoxUse(L, (whole,))))
                        _ok(rep, b, app_of(r, pieces), (L + K, p))
            if universal and whole is None:
                _fail(rep, f"every {L}⊎K derives every atom but {L} ⊢ 0 was not found")


def _check_bang(m, x, bases, ls, alphabet, depth, rep):
    phi = x.body
    fx, fa = m.flatten(x), m.flatten(phi)
    ax = axiom_rule(fa)
    for b in bases:
        for L in ls:
            whole = _derive(b, L, fx, depth)
            universal = True
            for c in _supersets(bases, b):
                ds = _supersets(bases, c)
                for K in ls:
                    for p in alphabet:
                        inner = all(_derive(dd, EMPTY, fa, depth) is None or _derive(dd, K, p, depth) is not None
                                    for dd in ds)
                        if not inner:
                            continue
                        concl = _derive(c, L + K, p, depth)
                        if concl is None:
                            universal = False
                        cx = c.extend([ax])
                        if whole is None or cx not in ds:
                            continue
                        e = _derive(cx, K, p, depth)
                        if e is None:
                            continue
                        rep.instances += 1
                        try:
                            opened = discharge_axiom(m, phi, e, c)
                            out = cut_compose(opened, [weaken_base(whole, c)], c)
                            if out.endsequent() != (L + K, p):
                                _fail(rep, f"cut result proves {out.endsequent()}")
                        except ValueError as err:
                            _fail(rep, f"construction failed: {err}")
            for dd in _supersets(bases, b):
                closed = _derive(dd, EMPTY, fa, depth)
                if closed is not None:
                    _ok(rep, dd, App(prom_rule(m, phi), (), (), (closed,)), (EMPTY, fx))
            if universal and whole is None:
                _fail(rep, f"universal side holds but {L} ⊢ {fx} was not found")


_CLAUSES = {
    "with": _check_with,
    "lolli": _check_lolli,
    "tensor": _check_tensor,
    "one": _check_one,
    "plus": _check_plus,
    "top": _check_top,
    "zero": _check_zero,
    "bang": _check_bang,
}
