"""Natural deduction kernel for ILL, schematic (starred) derivations, and bounded proof search.

Rule names used in derivations and JSON:

    Ax, -oI, -oE, *I, *E, 1I, 1E, &I, &E1, &E2, +I1, +I2, +E, topI, 0E, Prom, Der, Wk, Ctr

Rules that cannot recover every formula from their premises carry parameters:
``Ax`` and ``-oI`` take ``phi``; ``+I1`` takes ``psi`` (the other disjunct);
``+I2`` takes ``phi``; ``0E`` takes ``chi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .core import (
    EMPTY,
    ONE,
    TOP,
    ZERO,
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
    enumerate_partitions,
    formula_from_json,
    formula_to_json,
    multiset_from_json,
    multiset_to_json,
)

RULES = (
    "Ax", "-oI", "-oE", "*I", "*E", "1I", "1E", "&I", "&E1", "&E2",
    "+I1", "+I2", "+E", "topI", "0E", "Prom", "Der", "Wk", "Ctr",
)
# formula annotations each rule may carry
_PARAMS = {"Ax": ("phi",), "-oI": ("phi",), "+I1": ("psi",), "+I2": ("phi",), "0E": ("chi",)}


class NILLCheckError(ValueError):
    def __init__(self, message: str, path: tuple[int, ...] = ()):
        where = "root" if not path else "premise path " + ".".join(map(str, path))
        super().__init__(f"{message} ({where})")
        self.reason = message
        self.path = path


@dataclass(frozen=True)
class NILLDerivation:
    rule: str
    premises: tuple["NILLDerivation", ...] = ()
    params: tuple[tuple[str, Formula], ...] = ()
    _end: list = field(default_factory=list, init=False, repr=False, compare=False, hash=False)

    def param(self, name: str) -> Formula:
        for k, v in self.params:
            if k == name:
                return v
        raise NILLCheckError(f"{self.rule}: missing parameter {name!r}")

    @property
    def arity(self) -> int:
        return len(self.premises)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)

    def rules_used(self) -> set[str]:
        out = {self.rule}
        for p in self.premises:
            out |= p.rules_used()
        return out


def nd(rule: str, *premises: NILLDerivation, **params: Formula) -> NILLDerivation:
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}")
    return NILLDerivation(rule, tuple(premises), tuple(sorted(params.items())))


def _need(cond: bool, msg: str):
    if not cond:
        raise NILLCheckError(msg)


def _minus(ctx: Multiset, remove: Iterable[Formula], rule: str) -> Multiset:
    rem = Multiset(remove)
    if not rem <= ctx:
        raise NILLCheckError(f"{rule}: premise context lacks discharged {rem}")
    return ctx - rem


def _expect(f: Formula, cls, rule: str, what: str):
    if not isinstance(f, cls):
        raise NILLCheckError(f"{rule}: {what} must be a {cls.__name__}, got {f}")
    return f


def _conclude(d: NILLDerivation, prem: list[Sequent]) -> Sequent:
    r = d.rule
    n = len(prem)

    def arity(k: int):
        _need(n == k, f"{r}: expected {k} premises, got {n}")

    if r == "Ax":
        arity(0)
        phi = d.param("phi")
        return Sequent(Multiset.of(phi), phi)
    if r == "-oI":
        arity(1)
        phi = d.param("phi")
        return Sequent(_minus(prem[0].context, [phi], r), Lolli(phi, prem[0].conclusion))
    if r == "-oE":
        arity(2)
        imp = _expect(prem[0].conclusion, Lolli, r, "major premise")
        _need(prem[1].conclusion == imp.left, f"{r}: minor premise proves {prem[1].conclusion}, expected {imp.left}")
        return Sequent(prem[0].context + prem[1].context, imp.right)
    if r == "*I":
        arity(2)
        return Sequent(prem[0].context + prem[1].context, Tensor(prem[0].conclusion, prem[1].conclusion))
    if r == "*E":
        arity(2)
        t = _expect(prem[0].conclusion, Tensor, r, "major premise")
        delta = _minus(prem[1].context, [t.left, t.right], r)
        return Sequent(prem[0].context + delta, prem[1].conclusion)
    if r == "1I":
        arity(0)
        return Sequent(EMPTY, ONE)
    if r == "1E":
        arity(2)
        _expect(prem[0].conclusion, One, r, "major premise")
        return Sequent(prem[0].context + prem[1].context, prem[1].conclusion)
    if r == "&I":
        arity(2)
        _need(prem[0].context == prem[1].context,
              f"{r}: context mismatch, premises have {prem[0].context} and {prem[1].context}")
        return Sequent(prem[0].context, With(prem[0].conclusion, prem[1].conclusion))
    if r in ("&E1", "&E2"):
        arity(1)
        w = _expect(prem[0].conclusion, With, r, "premise")
        return Sequent(prem[0].context, w.left if r == "&E1" else w.right)
    if r == "+I1":
        arity(1)
        return Sequent(prem[0].context, Plus(prem[0].conclusion, d.param("psi")))
    if r == "+I2":
        arity(1)
        return Sequent(prem[0].context, Plus(d.param("phi"), prem[0].conclusion))
    if r == "+E":
        arity(3)
        p = _expect(prem[0].conclusion, Plus, r, "major premise")
        _need(prem[1].conclusion == prem[2].conclusion, f"{r}: case conclusions differ")
        d1 = _minus(prem[1].context, [p.left], r)
        d2 = _minus(prem[2].context, [p.right], r)
        _need(d1 == d2, f"{r}: context mismatch between cases, {d1} vs {d2}")
        return Sequent(prem[0].context + d1, prem[1].conclusion)
    if r == "topI":
        ctx = EMPTY
        for s in prem:
            ctx = ctx + s.context
        return Sequent(ctx, TOP)
    if r == "0E":
        _need(n >= 1, f"{r}: needs a premise proving 0")
        _expect(prem[-1].conclusion, Zero, r, "last premise")
        ctx = EMPTY
        for s in prem:
            ctx = ctx + s.context
        return Sequent(ctx, d.param("chi"))
    if r == "Prom":
        _need(n >= 1, f"{r}: needs the closed premise")
        bangs = []
        ctx = EMPTY
        for s in prem[:-1]:
            bangs.append(_expect(s.conclusion, Bang, r, "side premise conclusion"))
            ctx = ctx + s.context
        _need(prem[-1].context == Multiset(bangs),
              f"{r}: closed premise must have context exactly {Multiset(bangs)}, got {prem[-1].context}")
        return Sequent(ctx, Bang(prem[-1].conclusion))
    if r in ("Der", "Wk", "Ctr"):
        arity(2)
        b = _expect(prem[0].conclusion, Bang, r, "major premise")
        discharged = {"Der": [b.body], "Wk": [], "Ctr": [b, b]}[r]
        delta = _minus(prem[1].context, discharged, r)
        return Sequent(prem[0].context + delta, prem[1].conclusion)
    raise NILLCheckError(f"unknown rule {r!r}")


def check_nill(d: NILLDerivation) -> Sequent:
    """Return the endsequent of ``d`` or raise :class:`NILLCheckError` naming the failing node."""
    return _check(d, ())


def _check(d: NILLDerivation, path: tuple[int, ...]) -> Sequent:
    if d._end:
        return d._end[0]
    prem = [_check(p, path + (i,)) for i, p in enumerate(d.premises)]
    try:
        s = _conclude(d, prem)
    except NILLCheckError as e:
        raise NILLCheckError(e.reason, path) from None
    d._end.append(s)
    return s


def nill_to_json(d: NILLDerivation) -> dict:
    return {
        "rule": d.rule,
        "params": {k: formula_to_json(v) for k, v in d.params},
        "premises": [nill_to_json(p) for p in d.premises],
    }


def nill_from_json(obj: Any) -> NILLDerivation:
    if not isinstance(obj, dict) or "rule" not in obj:
        raise ValueError("malformed derivation node")
    rule = obj["rule"]
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}")
    params = {k: formula_from_json(v) for k, v in obj.get("params", {}).items()}
    extra = set(params) - set(_PARAMS.get(rule, ()))
    if extra:
        raise ValueError(f"{rule} takes no parameter(s) {sorted(extra)}")
    prem = [nill_from_json(p) for p in obj.get("premises", [])]
    return nd(rule, *prem, **params)


# ---------------------------------------------------------------- schematic derivability

SCHEMAS = (
    "-oI", "-oE", "*I", "*E", "1I", "1E", "&I", "&E1", "&E2",
    "+I1", "+I2", "+E", "topI", "0E", "Prom", "Der", "Wk", "Ctr",
)

# a box is a tuple of (context, conclusion) pairs


@dataclass(frozen=True)
class SchemaInstance:
    boxes: tuple[tuple[tuple[Multiset, Formula], ...], ...]
    modal: tuple[tuple[Multiset, Formula], ...]
    conclusion: Formula


def instantiate_schema(name: str, inst: dict) -> SchemaInstance:
    """Concrete ⟨A, S, φ⟩ for a schema given its metavariable assignment."""
    g = inst.get
    phi, psi, chi = g("phi"), g("psi"), g("chi")
    E = EMPTY

    def one(*pairs):
        return tuple(pairs)

    if name == "-oI":
        return SchemaInstance((one((Multiset.of(phi), psi)),), (), Lolli(phi, psi))
    if name == "-oE":
        return SchemaInstance((one((E, Lolli(phi, psi))), one((E, phi))), (), psi)
    if name == "*I":
        return SchemaInstance((one((E, phi)), one((E, psi))), (), Tensor(phi, psi))
    if name == "*E":
        return SchemaInstance((one((E, Tensor(phi, psi))), one((Multiset.of(phi, psi), chi))), (), chi)
    if name == "1I":
        return SchemaInstance((), (), ONE)
    if name == "1E":
        return SchemaInstance((one((E, ONE)), one((E, chi))), (), chi)
    if name == "&I":
        return SchemaInstance((one((E, phi), (E, psi)),), (), With(phi, psi))
    if name == "&E1":
        return SchemaInstance((one((E, With(phi, psi))),), (), phi)
    if name == "&E2":
        return SchemaInstance((one((E, With(phi, psi))),), (), psi)
    if name == "+I1":
        return SchemaInstance((one((E, phi)),), (), Plus(phi, psi))
    if name == "+I2":
        return SchemaInstance((one((E, psi)),), (), Plus(phi, psi))
    if name == "+E":
        return SchemaInstance(
            (one((E, Plus(phi, psi))), one((Multiset.of(phi), chi), (Multiset.of(psi), chi))), (), chi)
    if name == "topI":
        return SchemaInstance(tuple(one((E, f)) for f in inst["phis"]), (), TOP)
    if name == "0E":
        return SchemaInstance(tuple(one((E, f)) for f in inst["phis"]) + (one((E, ZERO)),), (), chi)
    if name == "Prom":
        return SchemaInstance((), ((E, phi),), Bang(phi))
    if name == "Der":
        return SchemaInstance((one((E, Bang(phi))), one((Multiset.of(phi), psi))), (), psi)
    if name == "Wk":
        return SchemaInstance((one((E, Bang(phi))), one((E, psi))), (), psi)
    if name == "Ctr":
        return SchemaInstance((one((E, Bang(phi))), one((Multiset.of(Bang(phi), Bang(phi)), psi))), (), psi)
    raise ValueError(f"unknown schema {name!r}")


class StarDerivation:
    __slots__ = ()


@dataclass(frozen=True)
class StarRef(StarDerivation):
    formula: Formula


@dataclass(frozen=True)
class StarBox:
    context: Multiset
    subs: tuple[StarDerivation, ...]


@dataclass(frozen=True)
class StarBang:
    context: Multiset
    formula: Formula  # the !δ element of the bang multiset
    sub: StarDerivation


@dataclass(frozen=True)
class StarApp(StarDerivation):
    schema: str
    inst: tuple  # sorted (name, value) pairs; value is a Formula or a tuple of Formulas
    boxes: tuple[StarBox, ...]
    bangs: tuple[StarBang, ...] = ()
    modal: tuple[StarDerivation, ...] = ()

    def assignment(self) -> dict:
        return dict(self.inst)


def star_app(schema: str, inst: dict, boxes, bangs=(), modal=()) -> StarApp:
    frozen = tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in inst.items()))
    return StarApp(schema, frozen, tuple(boxes), tuple(bangs), tuple(modal))


def check_star(d: StarDerivation) -> Sequent:
    return _check_star(d, ())


def _check_star(d: StarDerivation, path: tuple[int, ...]) -> Sequent:
    if isinstance(d, StarRef):
        return Sequent(Multiset.of(d.formula), d.formula)
    if not isinstance(d, StarApp):
        raise NILLCheckError("not a starred derivation", path)
    if d.schema not in SCHEMAS:
        raise NILLCheckError(f"unknown schema {d.schema!r}", path)
    try:
        shape = instantiate_schema(d.schema, d.assignment())
    except (KeyError, TypeError, ValueError) as e:
        raise NILLCheckError(f"{d.schema}: bad instantiation ({e})", path) from None
    if len(shape.boxes) != len(d.boxes):
        raise NILLCheckError(f"{d.schema}: expected {len(shape.boxes)} boxes, got {len(d.boxes)}", path)
    k = 0
    ctx = EMPTY
    for box_shape, box in zip(shape.boxes, d.boxes):
        if len(box_shape) != len(box.subs):
            raise NILLCheckError(f"{d.schema}: box needs {len(box_shape)} subderivations", path)
        for (extra, concl), sub in zip(box_shape, box.subs):
            s = _check_star(sub, path + (k,))
            k += 1
            want = Sequent(box.context + extra, concl)
            if s != want:
                raise NILLCheckError(f"{d.schema}: subderivation proves {s}, expected {want}", path)
        ctx = ctx + box.context
    bangs = []
    for b in d.bangs:
        if not isinstance(b.formula, Bang):
            raise NILLCheckError(f"{d.schema}: bang multiset element {b.formula} has no top-level !", path)
        s = _check_star(b.sub, path + (k,))
        k += 1
        if s != Sequent(b.context, b.formula):
            raise NILLCheckError(f"{d.schema}: bang subderivation proves {s}, expected {b.context} |- {b.formula}", path)
        bangs.append(b.formula)
        ctx = ctx + b.context
    if len(shape.modal) != len(d.modal):
        raise NILLCheckError(f"{d.schema}: expected {len(shape.modal)} modal subderivations", path)
    delta = Multiset(bangs)
    for (extra, concl), sub in zip(shape.modal, d.modal):
        s = _check_star(sub, path + (k,))
        k += 1
        if s != Sequent(delta + extra, concl):
            raise NILLCheckError(
                f"{d.schema}: modal subderivation proves {s}, may only assume {delta + extra}", path)
    return Sequent(ctx, shape.conclusion)


def star_to_json(d: StarDerivation) -> dict:
    if isinstance(d, StarRef):
        return {"node": "ref", "formula": formula_to_json(d.formula)}
    assert isinstance(d, StarApp)

    def val(v):
        return [formula_to_json(f) for f in v] if isinstance(v, tuple) else formula_to_json(v)

    return {
        "node": "app",
        "schema": d.schema,
        "inst": {k: val(v) for k, v in d.inst},
        "boxes": [{"ctx": multiset_to_json(b.context, formula_to_json),
                   "subs": [star_to_json(s) for s in b.subs]} for b in d.boxes],
        "bangs": [{"ctx": multiset_to_json(b.context, formula_to_json), "formula": formula_to_json(b.formula),
                   "sub": star_to_json(b.sub)} for b in d.bangs],
        "modal": [star_to_json(s) for s in d.modal],
    }


def star_from_json(obj: dict) -> StarDerivation:
    if obj.get("node") == "ref":
        return StarRef(formula_from_json(obj["formula"]))

    def val(v):
        return [formula_from_json(f) for f in v] if isinstance(v, list) else formula_from_json(v)

    return star_app(
        obj["schema"],
        {k: val(v) for k, v in obj.get("inst", {}).items()},
        [StarBox(multiset_from_json(b["ctx"], formula_from_json), tuple(star_from_json(s) for s in b["subs"]))
         for b in obj.get("boxes", [])],
        [StarBang(multiset_from_json(b["ctx"], formula_from_json), formula_from_json(b["formula"]),
                  star_from_json(b["sub"])) for b in obj.get("bangs", [])],
        [star_from_json(s) for s in obj.get("modal", [])],
    )


# ---------------------------------------------------------------- translations


def star_of_nill(d: NILLDerivation) -> StarDerivation:
    check_nill(d)
    return _star_of(d)


def _star_of(d: NILLDerivation) -> StarDerivation:
    r = d.rule
    ps = d.premises
    ends = [check_nill(p) for p in ps]
    subs = [_star_of(p) for p in ps]

    def box(i, extra=()):
        return StarBox(ends[i].context - Multiset(extra), (subs[i],))

    if r == "Ax":
        return StarRef(d.param("phi"))
    if r == "-oI":
        phi = d.param("phi")
        return star_app(r, {"phi": phi, "psi": ends[0].conclusion}, [box(0, [phi])])
    if r == "-oE":
        imp = ends[0].conclusion
        return star_app(r, {"phi": imp.left, "psi": imp.right}, [box(0), box(1)])
    if r == "*I":
        return star_app(r, {"phi": ends[0].conclusion, "psi": ends[1].conclusion}, [box(0), box(1)])
    if r == "*E":
        t = ends[0].conclusion
        return star_app(r, {"phi": t.left, "psi": t.right, "chi": ends[1].conclusion},
                        [box(0), box(1, [t.left, t.right])])
    if r == "1I":
        return star_app(r, {}, [])
    if r == "1E":
        return star_app(r, {"chi": ends[1].conclusion}, [box(0), box(1)])
    if r == "&I":
        return star_app(r, {"phi": ends[0].conclusion, "psi": ends[1].conclusion},
                        [StarBox(ends[0].context, (subs[0], subs[1]))])
    if r in ("&E1", "&E2"):
        w = ends[0].conclusion
        return star_app(r, {"phi": w.left, "psi": w.right}, [box(0)])
    if r == "+I1":
        return star_app(r, {"phi": ends[0].conclusion, "psi": d.param("psi")}, [box(0)])
    if r == "+I2":
        return star_app(r, {"phi": d.param("phi"), "psi": ends[0].conclusion}, [box(0)])
    if r == "+E":
        p = ends[0].conclusion
        return star_app(r, {"phi": p.left, "psi": p.right, "chi": ends[1].conclusion},
                        [box(0), StarBox(ends[1].context - Multiset.of(p.left), (subs[1], subs[2]))])
    if r == "topI":
        return star_app(r, {"phis": [e.conclusion for e in ends]}, [box(i) for i in range(len(ps))])
    if r == "0E":
        return star_app(r, {"phis": [e.conclusion for e in ends[:-1]], "chi": d.param("chi")},
                        [box(i) for i in range(len(ps))])
    if r == "Prom":
        bangs = [StarBang(ends[i].context, ends[i].conclusion, subs[i]) for i in range(len(ps) - 1)]
        return star_app(r, {"phi": ends[-1].conclusion}, [], bangs, [subs[-1]])
    if r in ("Der", "Wk", "Ctr"):
        b = ends[0].conclusion
        extra = {"Der": [b.body], "Wk": [], "Ctr": [b, b]}[r]
        return star_app(r, {"phi": b.body, "psi": ends[1].conclusion}, [box(0), box(1, extra)])
    raise NILLCheckError(f"unknown rule {r!r}")


def nill_of_star(d: StarDerivation) -> NILLDerivation:
    check_star(d)
    return _nill_of(d)


def _nill_of(d: StarDerivation) -> NILLDerivation:
    if isinstance(d, StarRef):
        return nd("Ax", phi=d.formula)
    assert isinstance(d, StarApp)
    a = d.assignment()
    s = d.schema
    subs = [_nill_of(x) for b in d.boxes for x in b.subs]
    if s == "-oI":
        core = nd(s, subs[0], phi=a["phi"])
    elif s in ("-oE", "*I", "*E", "1E", "&I", "Der", "Wk", "Ctr", "+E"):
        core = nd(s, *subs)
    elif s == "1I":
        core = nd(s)
    elif s in ("&E1", "&E2"):
        core = nd(s, subs[0])
    elif s == "+I1":
        core = nd(s, subs[0], psi=a["psi"])
    elif s == "+I2":
        core = nd(s, subs[0], phi=a["phi"])
    elif s == "topI":
        core = nd(s, *subs)
    elif s == "0E":
        core = nd(s, *subs, chi=a["chi"])
    elif s == "Prom":
        side = [_nill_of(b.sub) for b in d.bangs]
        return nd(s, *side, _nill_of(d.modal[0]))
    else:
        raise NILLCheckError(f"unknown schema {s!r}")
    # bang-multiset elements of non-promotion schemas are discarded by weakening
    for b in d.bangs:
        core = nd("Wk", _nill_of(b.sub), core)
    return core


# ---------------------------------------------------------------- proof search


def _subst(body: NILLDerivation, hyp: Formula, arg: NILLDerivation) -> NILLDerivation:
    """From Γ,hyp ⊢ χ and Δ ⊢ hyp build Γ,Δ ⊢ χ by an introduction/elimination pair."""
    return nd("-oE", nd("-oI", body, phi=hyp), arg)


class _Prover:
    def __init__(self):
        self.failed: dict[tuple[Multiset, Formula], int] = {}
        self.found: dict[tuple[Multiset, Formula], NILLDerivation] = {}

    def prove(self, ctx: Multiset, goal: Formula, depth: int) -> NILLDerivation | None:
        if depth <= 0:
            return None
        key = (ctx, goal)
        hit = self.found.get(key)
        if hit is not None:
            return hit
        if self.failed.get(key, 0) >= depth:
            return None
        res = self._search(ctx, goal, depth)
        if res is None:
            self.failed[key] = max(self.failed.get(key, 0), depth)
        else:
            self.found[key] = res
        return res

    def _search(self, ctx: Multiset, goal: Formula, depth: int) -> NILLDerivation | None:
        ax = lambda f: nd("Ax", phi=f)  # noqa: E731
        if len(ctx) == 1 and goal in ctx:
            return ax(goal)
        if isinstance(goal, One) and not ctx:
            return nd("1I")
        if isinstance(goal, Top):
            return nd("topI", *[ax(f) for f in ctx])
        if ZERO in ctx:
            rest = ctx - Multiset.of(ZERO)
            return nd("0E", *[ax(f) for f in rest], ax(ZERO), chi=goal)
        d = depth - 1
        # invertible rules are applied eagerly
        if isinstance(goal, Lolli):
            p = self.prove(ctx.add(goal.left), goal.right, d)
            return p and nd("-oI", p, phi=goal.left)
        if isinstance(goal, With):
            p = self.prove(ctx, goal.left, d)
            q = p and self.prove(ctx, goal.right, d)
            return q and nd("&I", p, q)
        for f in ctx.distinct():
            rest = ctx - Multiset.of(f)
            if isinstance(f, Tensor):
                p = self.prove(rest.add(f.left).add(f.right), goal, d)
                return p and nd("*E", ax(f), p)
            if isinstance(f, One):
                p = self.prove(rest, goal, d)
                return p and nd("1E", ax(f), p)
            if isinstance(f, Plus):
                p = self.prove(rest.add(f.left), goal, d)
                q = p and self.prove(rest.add(f.right), goal, d)
                return q and nd("+E", ax(f), p, q)
        # right rules that commit to a choice
        if isinstance(goal, Tensor):
            for a, b in enumerate_partitions(ctx, 2):
                p = self.prove(a, goal.left, d)
                q = p and self.prove(b, goal.right, d)
                if q:
                    return nd("*I", p, q)
        if isinstance(goal, Plus):
            p = self.prove(ctx, goal.left, d)
            if p:
                return nd("+I1", p, psi=goal.right)
            p = self.prove(ctx, goal.right, d)
            if p:
                return nd("+I2", p, phi=goal.left)
        if isinstance(goal, Bang) and all(isinstance(f, Bang) for f in ctx):
            p = self.prove(ctx, goal.body, d)
            if p:
                return nd("Prom", *[ax(f) for f in ctx], p)
        # left rules on hypotheses
        for f in ctx.distinct():
            rest = ctx - Multiset.of(f)
            if isinstance(f, Lolli):
                for g1, g2 in enumerate_partitions(rest, 2):
                    p = self.prove(g1, f.left, d)
                    q = p and self.prove(g2.add(f.right), goal, d)
                    if q:
                        return _subst(q, f.right, nd("-oE", ax(f), p))
            elif isinstance(f, With):
                for side, rule in ((f.left, "&E1"), (f.right, "&E2")):
                    p = self.prove(rest.add(side), goal, d)
                    if p:
                        return _subst(p, side, nd(rule, ax(f)))
            elif isinstance(f, Bang):
                p = self.prove(rest.add(f.body), goal, d)
                if p:
                    return nd("Der", ax(f), p)
                p = self.prove(rest, goal, d)
                if p:
                    return nd("Wk", ax(f), p)
                p = self.prove(ctx.add(f), goal, d)
                if p:
                    return nd("Ctr", ax(f), p)
        return None


def prove_nill(s: Sequent, depth_bound: int) -> NILLDerivation | None:
    """Bounded backward search; the bound limits the height of the underlying sequent proof.

    ``None`` means nothing was found within the bound, not that the sequent is unprovable.
    """
    if depth_bound < 1:
        raise ValueError("depth bound must be positive")
    prover = _Prover()
    for k in range(1, depth_bound + 1):
        d = prover.prove(s.context, s.conclusion, k)
        if d is not None:
            end = check_nill(d)
            if end != s:
                raise AssertionError(f"search produced {end}, expected {s}")
            return d
    return None
