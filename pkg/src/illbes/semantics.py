"""Bounded evaluation of base-extension support and a harness for its structural lemmas.

Quantifiers over base extensions range over subsets of a finite candidate rule set that
contain the base; quantifiers over atomic multisets range over multisets of bounded size.
Every verdict is therefore a statement about the bounded universe only.
"""

from __future__ import annotations

import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .atomic import derive, multisets_upto
from .base import AtomicRule, Base, BaseFormatError, box, rule, rule_from_json, rule_to_json, seq
from .core import (
    EMPTY,
    ONE,
    TOP,
    ZERO,
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
    formula_atoms,
    split_bang_context,
)

INF = "inf"
GEN_INF = "gen-inf"


class UniverseError(ValueError):
    pass


def closure_rules(atoms: Iterable[AtomId]) -> list[AtomicRule]:
    """For each atom q the axiom ⇒ q and the persistent rule with modal box {⇒ q}."""
    out = []
    for q in sorted(set(atoms)):
        out.append(rule([], None, q))
        out.append(rule([], box(seq([], q)), q))
    return out


@dataclass
class BoundedUniverse:
    atoms: tuple
    rules: tuple
    mset_bound: int = 2
    depth: int = 6

    def __post_init__(self):
        self.atoms = tuple(sorted(set(self.atoms)))
        self.rules = tuple(sorted(set(self.rules)))
        for r in self.rules:
            stray = r.atoms() - set(self.atoms)
            if stray:
                raise UniverseError(f"rule {r} mentions atoms outside the alphabet: {sorted(map(str, stray))}")

    @classmethod
    def closed(cls, atoms: Iterable[AtomId], extra: Iterable[AtomicRule] = (), mset_bound: int = 2,
               depth: int = 6) -> "BoundedUniverse":
        atoms = tuple(atoms)
        return cls(atoms, tuple(closure_rules(atoms)) + tuple(extra), mset_bound, depth)

    def missing_closure(self) -> list[AtomicRule]:
        have = set(self.rules)
        return [r for r in closure_rules(self.atoms) if r not in have]

    def is_closed(self) -> bool:
        return not self.missing_closure()

    def to_json(self) -> dict:
        return {"atoms": [str(a) for a in self.atoms], "rules": [rule_to_json(r) for r in self.rules],
                "msetBound": self.mset_bound, "depth": self.depth}

    @classmethod
    def from_json(cls, obj) -> "BoundedUniverse":
        if not isinstance(obj, dict) or not isinstance(obj.get("atoms"), list):
            raise BaseFormatError('universe file must be an object with an "atoms" list')
        try:
            atoms = tuple(AtomId.parse(a) for a in obj["atoms"])
        except (ValueError, TypeError) as e:
            raise BaseFormatError(f"bad atom in universe: {e}") from None
        rules = obj.get("rules", "closure")
        if rules == "closure":
            rs = tuple(closure_rules(atoms))
        else:
            if not isinstance(rules, list):
                raise BaseFormatError('"rules" must be a list or the string "closure"')
            rs = tuple(rule_from_json(r) for r in rules)
        bound = obj.get("msetBound", 2)
        depth = obj.get("depth", 6)
        if not isinstance(bound, int) or not isinstance(depth, int) or bound < 0 or depth < 1:
            raise BaseFormatError("msetBound and depth must be non-negative integers (depth ≥ 1)")
        return cls(atoms, rs, bound, depth)


def load_universe(path: str | Path) -> BoundedUniverse:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise BaseFormatError(f"malformed JSON in {path}: {e}") from None
    return BoundedUniverse.from_json(obj)


class Evaluator:
    """Memoizing evaluator for support over one bounded universe.

    Bases are bitmasks over the universe's sorted candidate rules.
    """

    def __init__(self, u: BoundedUniverse, require_closed: bool = True):
        if require_closed and not u.is_closed():
            raise UniverseError("universe lacks closure rules: " + ", ".join(map(str, u.missing_closure())))
        self.u = u
        self.n = len(u.rules)
        self.full = (1 << self.n) - 1
        self.msets = multisets_upto(u.atoms, u.mset_bound)
        self._alphabet = set(u.atoms)
        self._bases: dict[int, Base] = {}
        self._sup: dict[int, list[int]] = {}
        self._atomic: dict = {}
        self._memo: dict = {}
        self._seq_memo: dict = {}
        self._mset_memo: dict = {}
        self._checked: set = set()
        self._ante_memo: dict = {}

    # -- bases

    def mask_of(self, b: Base | Iterable[AtomicRule]) -> int:
        index = {r: i for i, r in enumerate(self.u.rules)}
        mask = 0
        for r in (b.rules if isinstance(b, Base) else b):
            if r not in index:
                raise UniverseError(f"rule {r} is not a candidate rule of the universe")
            mask |= 1 << index[r]
        return mask

    def base(self, mask: int) -> Base:
        b = self._bases.get(mask)
        if b is None:
            b = Base(r for i, r in enumerate(self.u.rules) if mask >> i & 1)
            self._bases[mask] = b
        return b

    def supersets(self, mask: int) -> list[int]:
        out = self._sup.get(mask)
        if out is None:
            free = [i for i in range(self.n) if not mask >> i & 1]
            out = []
            for k in range(len(free) + 1):
                for combo in itertools.combinations(free, k):
                    m = mask
                    for i in combo:
                        m |= 1 << i
                    out.append(m)
            self._sup[mask] = out
        return out

    def all_masks(self) -> range:
        return range(self.full + 1)

    def derivable(self, mask: int, ctx: Multiset, p: AtomId) -> bool:
        key = (mask, ctx, p)
        hit = self._atomic.get(key)
        if hit is None:
            hit = derive(self.base(mask), ctx, p, self.u.depth) is not None
            self._atomic[key] = hit
        return hit

    # -- support

    def _check_atoms(self, f: Formula):
        if f in self._checked:
            return
        stray = formula_atoms(f) - self._alphabet
        if not stray:
            self._checked.add(f)
        else:
            raise UniverseError(f"{f} mentions atoms outside the universe: {sorted(map(str, stray))}")

    def supports(self, mask: int, ctx: Multiset, f: Formula, _limit: int | None = None) -> bool:
        if _limit is not None:
            assert f.degree < _limit, f"support of {f} requested while defining a formula of degree {_limit}"
        key = (mask, ctx, f)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if _limit is None:
            self._check_atoms(f)
        res = self._clause(mask, ctx, f)
        self._memo[key] = res
        return res

    def _clause(self, mask: int, L: Multiset, f: Formula) -> bool:
        d = f.degree
        if isinstance(f, Atom):
            return self.derivable(mask, L, f.atom)
        if isinstance(f, Top):
            return True
        if isinstance(f, Lolli):
            return self._sequent(mask, L, Multiset.of(f.left), f.right, INF, d)
        if isinstance(f, With):
            return self.supports(mask, L, f.left, d) and self.supports(mask, L, f.right, d)
        if isinstance(f, Zero):
            return all(self.derivable(mask, L + K, p) for K in self.msets for p in self.u.atoms)
        if isinstance(f, One):
            # the premise is read at the extension C
            return all(
                not self.derivable(c, K, p) or self.derivable(c, L + K, p)
                for c in self.supersets(mask) for K in self.msets for p in self.u.atoms
            )
        if isinstance(f, Tensor):
            pair = Multiset.of(f.left, f.right)
            return all(
                not self._sequent(c, K, pair, Atom(p), INF, d) or self.derivable(c, L + K, p)
                for c in self.supersets(mask) for K in self.msets for p in self.u.atoms
            )
        if isinstance(f, Plus):
            return all(
                not (self._sequent(c, K, Multiset.of(f.left), Atom(p), INF, d)
                     and self._sequent(c, K, Multiset.of(f.right), Atom(p), INF, d))
                or self.derivable(c, L + K, p)
                for c in self.supersets(mask) for K in self.msets for p in self.u.atoms
            )
        if isinstance(f, Bang):
            for c in self.supersets(mask):
                for K in self.msets:
                    for p in self.u.atoms:
                        if self.derivable(c, L + K, p):
                            continue
                        if all(not self.supports(dm, EMPTY, f.body, d) or self.derivable(dm, K, p)
                               for dm in self.supersets(c)):
                            return False
            return True
        raise TypeError(f"not a formula: {f!r}")

    def supports_multiset(self, mask: int, ctx: Multiset, gamma: Multiset, _limit: int | None = None) -> bool:
        """Support of a multiset of formulas: some split of ``ctx`` supports each member."""
        key = (mask, ctx, gamma)
        hit = self._mset_memo.get(key)
        if hit is not None:
            return hit
        if not gamma:
            res = not ctx
        else:
            first = gamma.distinct()[0]
            rest = gamma - Multiset.of(first)
            res = any(
                self.supports(mask, part, first, _limit) and self.supports_multiset(mask, ctx - part, rest, _limit)
                for part in ctx.submultisets()
            )
        self._mset_memo[key] = res
        return res

    def _sequent(self, mask: int, L: Multiset, gamma: Multiset, f: Formula, mode: str, limit: int | None) -> bool:
        if limit is not None:
            for g in list(gamma.distinct()) + [f]:
                assert g.degree < limit, f"{g} appears while defining a formula of degree {limit}"
        if not gamma:
            return self.supports(mask, L, f, limit)
        key = (mask, L, gamma, f, mode)
        hit = self._seq_memo.get(key)
        if hit is not None:
            return hit
        res = all(self.supports(c, L + K, f, limit) for c, K in self._antecedents(mask, gamma, mode, limit))
        self._seq_memo[key] = res
        return res

    def _antecedents(self, mask: int, gamma: Multiset, mode: str, limit: int | None) -> list[tuple[int, Multiset]]:
        """The pairs (C, K) at which the hypotheses ``gamma`` hold; they do not depend on L or the conclusion."""
        key = (mask, gamma, mode)
        hit = self._ante_memo.get(key)
        if hit is not None:
            return hit
        if mode == INF:
            bangs, theta = split_bang_context(gamma)
            bodies = Multiset(b.body for b in bangs)
            ks = self.msets if theta else [EMPTY]
            out = [
                (c, K) for c in self.supersets(mask)
                if self.supports_multiset(c, EMPTY, bodies, limit)
                for K in ks
                if not theta or self.supports_multiset(c, K, theta, limit)
            ]
        elif mode == GEN_INF:
            out = [(c, K) for c in self.supersets(mask) for K in self.msets if self.supports_multiset(c, K, gamma, limit)]
        else:
            raise ValueError(f"unknown mode {mode!r}")
        self._ante_memo[key] = out
        return out

    def supports_sequent(self, mask: int, L: Multiset, gamma: Multiset, f: Formula, mode: str = INF) -> bool:
        for g in list(gamma.distinct()) + [f]:
            self._check_atoms(g)
        return self._sequent(mask, L, gamma, f, mode, None)

    def valid(self, s: Sequent) -> bool:
        """Support over the empty base with no resources."""
        return self.supports_sequent(0, EMPTY, s.context, s.conclusion)


def supports(u: BoundedUniverse, b: Base, L: Multiset, f: Formula) -> bool:
    ev = Evaluator(u)
    return ev.supports(ev.mask_of(b), L, f)


def supports_sequent(u: BoundedUniverse, b: Base, L: Multiset, gamma: Multiset, f: Formula, mode: str = INF) -> bool:
    ev = Evaluator(u)
    return ev.supports_sequent(ev.mask_of(b), L, gamma, f, mode)


# ---------------------------------------------------------------- formula enumeration


def formulas_upto(atoms: Iterable[AtomId], max_degree: int) -> list[Formula]:
    """Every formula over ``atoms`` of degree at most ``max_degree``, grouped by degree."""
    by_degree: dict[int, list[Formula]] = {1: [Atom(a) for a in sorted(set(atoms))], 2: [TOP, ZERO, ONE]}
    for d in range(2, max_degree + 1):
        level = by_degree.setdefault(d, [])
        level += [Bang(f) for f in by_degree.get(d - 1, [])]
        for dl in range(1, d - 1):
            for l in by_degree.get(dl, []):
                for r in by_degree.get(d - 1 - dl, []):
                    level += [Lolli(l, r), Tensor(l, r), With(l, r), Plus(l, r)]
    out = []
    for d in range(1, max_degree + 1):
        out += by_degree.get(d, [])
    return out


# ---------------------------------------------------------------- lemma harness


@dataclass
class LemmaResult:
    lemma: str
    instances: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, what: str):
        if len(self.failures) < 5:
            self.failures.append(what)
        else:
            self.failures.append(None)

    def as_dict(self) -> dict:
        shown = [f for f in self.failures if f is not None]
        return {"lemma": self.lemma, "instances": self.instances, "failures": shown,
                "failureCount": len(self.failures), "passed": self.passed}


def _show(mask: int, L: Multiset, what: str) -> str:
    return f"base#{mask} L={L} {what}"


def _lemma_monotone(ev: Evaluator, fs: list[Formula], res: LemmaResult):
    seqs = [(EMPTY, f) for f in fs] + [(Multiset.of(g), f) for g in fs for f in fs]
    for mask in ev.all_masks():
        for L in ev.msets:
            for gamma, f in seqs:
                res.instances += 1
                if ev.supports_sequent(mask, L, gamma, f):
                    for c in ev.supersets(mask):
                        if not ev.supports_sequent(c, L, gamma, f):
                            res.fail(_show(mask, L, f"{gamma} ⊩ {f} but not at base#{c}"))
                            break


def _lemma_atomic(ev: Evaluator, fs: list[Formula], res: LemmaResult):
    for mask in ev.all_masks():
        for L in ev.msets:
            gamma = Multiset(Atom(a) for a in L)
            for K in ev.msets:
                for p in ev.u.atoms:
                    res.instances += 1
                    lhs = ev.supports_sequent(mask, K, gamma, Atom(p))
                    if lhs != ev.derivable(mask, L + K, p):
                        res.fail(_show(mask, K, f"{gamma} ⊩ {p} is {lhs} but {L + K} ⊢ {p} is {not lhs}"))


def _lemma_validity(ev: Evaluator, fs: list[Formula], res: LemmaResult):
    for g in [None] + fs:
        gamma = Multiset.of(g) if g is not None else EMPTY
        for f in fs:
            res.instances += 1
            at_empty = ev.supports_sequent(0, EMPTY, gamma, f)
            everywhere = all(ev.supports_sequent(m, EMPTY, gamma, f) for m in ev.all_masks())
            if at_empty != everywhere:
                res.fail(f"{gamma} ⊩ {f}: empty base {at_empty}, all bases {everywhere}")


def _key_lemma(ev: Evaluator, fs: list[Formula], res: LemmaResult, majors, minor_premises):
    """Shared driver: ⊩^L major and the minor premises at K give ⊩^{L⊎K} χ."""
    for mask in ev.all_masks():
        for major in majors:
            for L in ev.msets:
                if not ev.supports(mask, L, major):
                    continue
                for K in ev.msets:
                    for chi in fs:
                        if not all(ev.supports_sequent(mask, K, g, chi) for g in minor_premises(major)):
                            continue
                        res.instances += 1
                        if not ev.supports(mask, L + K, chi):
                            res.fail(_show(mask, L, f"{major}; K={K} χ={chi}"))


def _lemma_mand(ev, fs, res):
    _key_lemma(ev, fs, res, [f for f in fs if isinstance(f, Tensor)], lambda t: [Multiset.of(t.left, t.right)])


def _lemma_mtop(ev, fs, res):
    _key_lemma(ev, fs, res, [ONE], lambda _: [EMPTY])


def _lemma_aor(ev, fs, res):
    _key_lemma(ev, fs, res, [f for f in fs if isinstance(f, Plus)],
               lambda s: [Multiset.of(s.left), Multiset.of(s.right)])


def _bang_ok(fs, f):
    return Bang(f) in fs


def _lemma_dereliction(ev, fs, res):
    for mask in ev.all_masks():
        for L in ev.msets:
            for phi in fs:
                if not _bang_ok(fs, phi):
                    continue
                for psi in fs:
                    if ev.supports_sequent(mask, L, Multiset.of(phi), psi):
                        res.instances += 1
                        if not ev.supports_sequent(mask, L, Multiset.of(Bang(phi)), psi):
                            res.fail(_show(mask, L, f"{phi} ⊩ {psi} but not !{phi} ⊩ {psi}"))


def _lemma_necessitation(ev, fs, res):
    for mask in ev.all_masks():
        for phi in fs:
            if not _bang_ok(fs, phi) or not ev.supports(mask, EMPTY, phi):
                continue
            res.instances += 1
            if not ev.supports(mask, EMPTY, Bang(phi)):
                res.fail(_show(mask, EMPTY, f"⊩ {phi} but not ⊩ !{phi}"))
            for c in ev.supersets(mask):
                for L in ev.msets:
                    for psi in fs:
                        if ev.supports_sequent(c, L, Multiset.of(Bang(phi)), psi):
                            res.instances += 1
                            if not ev.supports(c, L, psi):
                                res.fail(_show(c, L, f"⊩ {phi} at base#{mask}, !{phi} ⊩ {psi} but not ⊩ {psi}"))


def _bang_contexts(fs: list[Formula]) -> list[Multiset]:
    bangs = [f for f in fs if isinstance(f, Bang)]
    return [EMPTY] + [Multiset.of(b) for b in bangs] + [Multiset.of(a, b) for a, b in itertools.combinations_with_replacement(bangs, 2)]


def _lemma_promotion(ev, fs, res):
    for mask in ev.all_masks():
        for gamma in _bang_contexts(fs):
            for phi in fs:
                if not _bang_ok(fs, phi):
                    continue
                if ev.supports_sequent(mask, EMPTY, gamma, phi):
                    res.instances += 1
                    if not ev.supports_sequent(mask, EMPTY, gamma, Bang(phi)):
                        res.fail(_show(mask, EMPTY, f"{gamma} ⊩ {phi} but not {gamma} ⊩ !{phi}"))


def _lemma_bang_cut(ev, fs, res):
    for mask in ev.all_masks():
        for gamma in _bang_contexts(fs)[1:]:
            for L in ev.msets:
                if not ev.supports_multiset(mask, L, gamma):
                    continue
                for K in ev.msets:
                    for psi in fs:
                        if ev.supports_sequent(mask, K, gamma, psi):
                            res.instances += 1
                            if not ev.supports(mask, L + K, psi):
                                res.fail(_show(mask, L, f"⊩ {gamma}, {gamma} ⊩^{K} {psi} but not ⊩^(L⊎K) {psi}"))


def _lemma_bang_one(ev, fs, res):
    for mask in ev.all_masks():
        for L in ev.msets:
            for f in fs:
                if isinstance(f, Bang) and ev.supports(mask, L, f):
                    res.instances += 1
                    if not ev.supports(mask, L, ONE):
                        res.fail(_show(mask, L, f"⊩ {f} but not ⊩ 1"))


def _lemma_inf(ev, fs, res):
    gammas = [Multiset.of(g) for g in fs] + [Multiset.of(a, b) for a, b in itertools.combinations_with_replacement(
        [f for f in fs if f.degree <= 2], 2)]
    for mask in ev.all_masks():
        for L in ev.msets:
            for gamma in gammas:
                for f in fs:
                    res.instances += 1
                    a = ev.supports_sequent(mask, L, gamma, f, INF)
                    b = ev.supports_sequent(mask, L, gamma, f, GEN_INF)
                    if a != b:
                        res.fail(_show(mask, L, f"{gamma} ⊩ {f}: Inf {a}, Gen-Inf {b}"))


LEMMAS: dict[str, Callable] = {
    "monotone-support": _lemma_monotone,
    "atomic-sound-and-complete": _lemma_atomic,
    "ill-validity": _lemma_validity,
    "mand-key": _lemma_mand,
    "mtop-key": _lemma_mtop,
    "aor-key": _lemma_aor,
    "bang-dereliction": _lemma_dereliction,
    "bang-necessitation": _lemma_necessitation,
    "bang-promotion": _lemma_promotion,
    "bang-cut-support": _lemma_bang_cut,
    "bang-mtop-interplay": _lemma_bang_one,
    "inf-gen-inf": _lemma_inf,
}

def run_lemma(u: BoundedUniverse, name: str, max_degree: int, ev: Evaluator | None = None) -> LemmaResult:
    ev = ev or Evaluator(u)
    fs = formulas_upto(u.atoms, max_degree)
    res = LemmaResult(name)
    t = time.perf_counter()
    LEMMAS[name](ev, fs, res)
    res.seconds = time.perf_counter() - t
    return res


def _run_packed(args):
    return run_lemma(*args)


def threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("ILLBES_THREADS", "1")))
    except ValueError:
        return 1


def run_lemma_checks(u: BoundedUniverse, which: Iterable[str] | str = "all", max_degree: int | dict = 3,
                     threads: int | None = None) -> list[LemmaResult]:
    """Check each named lemma on every instance in ``u`` with formulas up to ``max_degree``.

    ``max_degree`` may map lemma names to degrees. With more than one worker the lemmas run
    in separate processes, each with its own evaluator.
    """
    if not u.is_closed():
        raise UniverseError("lemma checks need a closed universe")
    names = list(LEMMAS) if which == "all" else list(which)
    unknown = [n for n in names if n not in LEMMAS]
    if unknown:
        raise ValueError(f"unknown lemma(s): {', '.join(unknown)}")
    degree = (lambda n: max_degree.get(n, 3)) if isinstance(max_degree, dict) else (lambda n: max_degree)
    jobs = [(u, n, degree(n)) for n in names]
    threads = threads or threads_from_env()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_packed, jobs))
    ev = Evaluator(u)
    return [run_lemma(*j, ev=ev) for j in jobs]


def report_lines(results: list[LemmaResult]) -> Iterator[str]:
    for r in results:
        yield json.dumps(r.as_dict(), ensure_ascii=False)
