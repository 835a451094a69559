"""Command-line entry point.

Exit codes: 0 success or true, 1 not found or false, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import atomic, base, core, girard, nill, semantics, simulation

DEFAULT_DEPTH = 8
DEFAULT_MSET_BOUND = 2


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {path}: {e}") from None


def _emit(args, payload, text: str | None = None) -> None:
    """Write the result once: JSON when asked (or when there is no text form), else text."""
    out = json.dumps(payload, indent=1, sort_keys=True, ensure_ascii=False) if args.json or text is None else text
    out = out.rstrip("\n") + "\n"
    if args.out:
        target = Path(args.out)
        fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=".illbes-")
        with os.fdopen(fd, "w") as fh:
            fh.write(out)
        os.replace(tmp, target)
    else:
        sys.stdout.write(out)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise InputError(f"--{n.replace('_', '-')} is required for {args.verb}")


def _sequent(args) -> core.Sequent:
    _need(args, "sequent")
    return core.parse_sequent(args.sequent)


def _atomic_sequent(args) -> tuple[core.Multiset, core.AtomId]:
    s = _sequent(args)
    for f in list(s.context.distinct()) + [s.conclusion]:
        if not isinstance(f, core.Atom):
            raise InputError(f"{f} is not an atom")
    return core.Multiset(f.atom for f in s.context), s.conclusion.atom


# ---------------------------------------------------------------- verbs


def cmd_parse(args) -> int:
    if args.formula is not None:
        f = core.parse_formula(args.formula)
        _emit(args, {"formula": str(f), "degree": f.degree, "ast": core.formula_to_json(f)}, str(f))
    else:
        s = _sequent(args)
        _emit(args, {"sequent": str(s), "json": core.sequent_to_json(s)}, str(s))
    return 0


def cmd_check_nill(args) -> int:
    obj = _read_json(args.file)
    try:
        if args.star:
            d = nill.star_from_json(obj)
            end = nill.check_star(d)
        else:
            d = nill.nill_from_json(obj)
            end = nill.check_nill(d)
    except nill.NILLCheckError as e:
        _emit(args, {"status": "invalid", "reason": e.reason, "path": list(e.path)}, f"invalid: {e}")
        return 1
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"malformed derivation: {e}") from None
    if args.sequent is not None and end != core.parse_sequent(args.sequent):
        _emit(args, {"status": "mismatch", "endsequent": str(end)}, f"proves {end}, not {args.sequent}")
        return 1
    _emit(args, {"status": "ok", "endsequent": str(end)}, f"ok: {end}")
    return 0


def cmd_check_atomic(args) -> int:
    _need(args, "base")
    b = base.load_base(args.base)
    obj = _read_json(args.file)
    try:
        d = atomic.derivation_from_json(obj, b)
    except (ValueError, KeyError, TypeError, IndexError) as e:
        raise InputError(f"malformed derivation: {e}") from None
    try:
        ctx, p = atomic.check_atomic(b, d)
    except atomic.AtomicCheckError as e:
        _emit(args, {"status": "invalid", "kind": e.kind, "reason": str(e)}, f"invalid: {e}")
        return 1
    _emit(args, {"status": "ok", "context": core.multiset_to_json(ctx, str), "conclusion": str(p)},
          f"ok: {', '.join(map(str, ctx))} ⊢ {p}")
    return 0


def cmd_prove(args) -> int:
    s = _sequent(args)
    d = nill.prove_nill(s, args.depth)
    if d is None:
        _emit(args, {"status": "not-found", "sequent": str(s), "depth": args.depth}, f"not found at depth {args.depth}")
        return 1
    _emit(args, {"status": "proved", "sequent": str(s), "derivation": nill.nill_to_json(d)})
    return 0


def cmd_derive(args) -> int:
    _need(args, "base")
    b = base.load_base(args.base)
    ctx, p = _atomic_sequent(args)
    d = atomic.derive(b, ctx, p, args.depth)
    if d is None:
        _emit(args, {"status": "not-found", "depth": args.depth}, f"not found at depth {args.depth}")
        return 1
    _emit(args, {"status": "derived", "derivation": atomic.derivation_to_json(d, b)})
    return 0


def cmd_flatten(args) -> int:
    s = _sequent(args)
    xi = simulation.subformula_closure(s)
    m = simulation.make_flattening(xi)
    table = {str(f): str(m.flatten(f)) for f in sorted(xi)}
    flat = f"{', '.join(map(str, m.flatten_all(s.context)))} |- {m.flatten(s.conclusion)}".lstrip(", ")
    text = "\n".join(f"{k}\t{v}" for k, v in table.items()) + f"\n{flat}"
    _emit(args, {"map": table, "flattened": flat}, text)
    return 0


def cmd_sim_base(args) -> int:
    s = _sequent(args)
    xi = simulation.subformula_closure(s)
    m = simulation.make_flattening(xi)
    n = simulation.build_simulation_base(xi, m)
    # rules with an arbitrary conclusion are written out for every atom of the flattened domain
    atoms = sorted({m.flatten(f) for f in xi})
    rules = set(n.rules)
    for p in atoms:
        rules |= {make(p) for _, _, make in n.families}
    payload = base.base_to_json(base.Base(rules))
    payload["map"] = {str(f): str(m.flatten(f)) for f in sorted(xi)}
    _emit(args, payload)
    return 0


def cmd_validate(args) -> int:
    s = _sequent(args)
    d = simulation.check_validity(s, args.depth)
    if d is None:
        _emit(args, {"status": "not-found", "sequent": str(s), "depth": args.depth})
        return 1
    _emit(args, {"status": "valid", "sequent": str(s), "derivation": nill.nill_to_json(d)})
    return 0


def _universe(args) -> semantics.BoundedUniverse:
    _need(args, "universe")
    u = semantics.load_universe(args.universe)
    if args.mset_bound is not None:
        u.mset_bound = args.mset_bound
    return u


def cmd_support(args) -> int:
    u = _universe(args)
    s = _sequent(args)
    ev = semantics.Evaluator(u)
    mask = ev.mask_of(base.load_base(args.base)) if args.base else 0
    L = core.parse_atoms(args.resources) if args.resources else core.EMPTY
    ok = ev.supports_sequent(mask, L, s.context, s.conclusion, args.mode)
    _emit(args, {"supported": ok, "sequent": str(s), "mode": args.mode}, "supported" if ok else "not supported")
    return 0 if ok else 1


def cmd_suite(args) -> int:
    u = _universe(args)
    which = "all" if args.lemmas == "all" else [x.strip() for x in args.lemmas.split(",") if x.strip()]
    try:
        results = semantics.run_lemma_checks(u, which, args.degree)
    except ValueError as e:
        raise InputError(str(e)) from None
    lines = list(semantics.report_lines(results))
    _emit(args, [r.as_dict() for r in results], "\n".join(lines))
    return 0 if all(r.passed for r in results) else 1


def cmd_translate(args) -> int:
    if args.formula is not None:
        f = girard.parse_ipl(args.formula)
        g = girard.girard_translate(f)
        _emit(args, {"ipl": str(f), "ill": str(g)}, str(g))
        return 0
    _need(args, "sequent")
    left, sep, right = args.sequent.partition("|-")
    if not sep:
        left, right = "", left
    hyps = [girard.parse_ipl(h) for h in left.split(",") if h.strip()]
    s = girard.translate_sequent(hyps, girard.parse_ipl(right))
    _emit(args, {"ill": str(s)}, str(s))
    return 0


VERBS = {
    "parse": cmd_parse,
    "check-nill": cmd_check_nill,
    "check-atomic": cmd_check_atomic,
    "prove": cmd_prove,
    "derive": cmd_derive,
    "flatten": cmd_flatten,
    "sim-base": cmd_sim_base,
    "validate": cmd_validate,
    "support": cmd_support,
    "suite": cmd_suite,
    "translate": cmd_translate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sequent")
    common.add_argument("--formula")
    common.add_argument("--base", metavar="FILE")
    common.add_argument("--universe", metavar="FILE")
    common.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", metavar="FILE", help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="illbes", description="Proof search and bounded semantics for intuitionistic linear logic.")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("parse", parents=[common], help="parse and pretty-print a formula or sequent")
    c = sub.add_parser("check-nill", parents=[common], help="check a natural deduction derivation file")
    c.add_argument("file")
    c.add_argument("--star", action="store_true", help="the file holds a schematic (boxed) derivation")
    c = sub.add_parser("check-atomic", parents=[common], help="check an atomic derivation against a base")
    c.add_argument("file")
    sub.add_parser("prove", parents=[common], help="bounded natural deduction proof search")
    sub.add_parser("derive", parents=[common], help="bounded derivability search in a base")
    sub.add_parser("flatten", parents=[common], help="show the flattening map of a sequent")
    sub.add_parser("sim-base", parents=[common], help="export the simulation base of a sequent")
    sub.add_parser("validate", parents=[common], help="search the simulation base and return a checked proof")
    for name, helptext in (("support", "bounded support judgement"), ("suite", "run the lemma checks")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--mset-bound", type=int, default=None,
                       help=f"override the universe's multiset bound (files default to {DEFAULT_MSET_BOUND})")
    sup = sub.choices["support"]
    sup.add_argument("--mode", choices=[semantics.INF, semantics.GEN_INF], default=semantics.INF)
    sup.add_argument("--resources", help="atomic resource multiset, e.g. 'p,p,q'")
    suite = sub.choices["suite"]
    suite.add_argument("--lemmas", default="all", help="'all' or a comma-separated list")
    suite.add_argument("--degree", type=int, default=3, help="maximum formula degree")
    sub.add_parser("translate", parents=[common], help="embed an intuitionistic formula or sequent")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    if args.depth < 1:
        print("illbes: --depth must be positive", file=sys.stderr)
        return 2
    try:
        return VERBS[args.verb](args)
    except (InputError, core.FormulaSyntaxError, base.BaseFormatError, semantics.UniverseError,
            simulation.FlatteningError) as e:
        print(f"illbes {args.verb}: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"illbes {args.verb}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
