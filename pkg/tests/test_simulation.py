import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import NEGATIVE, POSITIVE
from illbes.atomic import App, Ref, check_atomic, derive
from illbes.core import EMPTY, FLAT, AtomId, Multiset, Sequent, parse_formula, parse_sequent
from illbes.nill import check_nill, check_star
from illbes.simulation import (
    FlatteningError, axiom_rule, build_simulation_base, check_validity, deflat_derivation, make_flattening,
    prove_star, sim_base_definition_checks, structural_cut_transform, subformula_closure,
)

F = parse_formula


def setup(text):
    s = parse_sequent(text)
    xi = subformula_closure(s)
    m = make_flattening(xi)
    return s, xi, m, build_simulation_base(xi, m)


def test_subformula_closure():
    assert subformula_closure(parse_sequent("|- p -o q")) == {F("p"), F("q"), F("p -o q")}
    assert subformula_closure(parse_sequent("!a |- a")) == {F("a"), F("!a")}


@settings(max_examples=30)
@given(st.sampled_from(POSITIVE + NEGATIVE))
def test_closure_is_idempotent(text):
    xi = subformula_closure(parse_sequent(text))
    again = set()
    for f in xi:
        again |= subformula_closure(Sequent(EMPTY, f))
    assert again == xi


@pytest.mark.parametrize("text", ["|- p -o q", "!(a & b) |- !a * !b", "0, top |- 1 + a", "q -o p |- p -o q"])
def test_flattening_invariants(text):
    s, xi, m, _ = setup(text)
    images = [m.flatten(f) for f in xi]
    assert len(set(images)) == len(images)
    for f in xi:
        assert m.deflatten(m.flatten(f)) == f
        if f.kind == "atom":
            assert m.flatten(f) == f.atom
        elif f.kind in ("top", "zero", "one"):
            assert m.flatten(f).namespace == "unit"
        else:
            assert m.flatten(f).namespace == FLAT
            assert F(str(m.flatten(f))) not in xi


def test_flattening_names_are_deterministic():
    _, _, m, _ = setup("q -o p |- p -o q")
    assert m.flatten(F("p -o q")) != m.flatten(F("q -o p"))
    assert str(make_flattening(subformula_closure(parse_sequent("q -o p |- p -o q"))).flatten(F("p -o q"))) \
        == str(m.flatten(F("p -o q")))


def test_flattening_skips_user_flat_names():
    xi = {F("#1"), F("#1 * a"), F("a")}
    m = make_flattening(xi)
    assert m.flatten(F("#1 * a")) != AtomId("1", FLAT)


def test_flattening_domain_errors():
    _, _, m, _ = setup("|- p -o q")
    with pytest.raises(FlatteningError):
        m.flatten(F("q -o p"))
    with pytest.raises(FlatteningError):
        m.deflatten(AtomId("99", FLAT))


def test_simulation_base_rules():
    _, _, m, n = setup("|- p -o q")
    names = sorted(name for name, _ in n.labels.values())
    assert names == ["-oE", "-oI", "1I"]
    assert n.persistent_atoms() == set()
    _, _, m, n = setup("!a |- a")
    assert n.persistent_atoms() == {m.flatten(F("!a"))}
    _, _, m, n = setup("|- p")
    assert [name for name, _ in n.labels.values()] == ["1I"]


def test_top_and_zero_rules_are_lazy():
    s, _, m, n = setup("a, b, 0 |- top")
    d = derive(n, m.flatten_all(s.context), m.flatten(s.conclusion), 2)
    assert d is not None and check_atomic(n, d) == (m.flatten_all(s.context), m.flatten(s.conclusion))


@pytest.mark.parametrize("text", POSITIVE)
def test_check_validity_positive(text):
    s = parse_sequent(text)
    d = check_validity(s, 10)
    assert d is not None and check_nill(d) == s
    assert check_star(prove_star(s, 10)) == s


@pytest.mark.parametrize("text", NEGATIVE)
def test_check_validity_negative(text):
    assert check_validity(parse_sequent(text), 10) is None


def test_deflat_cases():
    s, _, m, n = setup("a |- a")
    assert deflat_derivation(m, n, Ref(m.flatten(F("a")))).rule == "Ax"
    s, _, m, n = setup("a, b |- a * b")
    d = derive(n, m.flatten_all(s.context), m.flatten(s.conclusion), 2)
    nd = deflat_derivation(m, n, d)
    assert nd.rule == "*I" and [p.rule for p in nd.premises] == ["Ax", "Ax"]
    s, _, m, n = setup("!a |- !!a")
    d = derive(n, m.flatten_all(s.context), m.flatten(s.conclusion), 4)
    nd = deflat_derivation(m, n, d)
    assert nd.rule == "Prom" and len(nd.premises) == 2
    assert check_nill(nd) == s


def test_structural_cut_both_ways():
    s, _, m, n = setup("!a, b |- a * b")
    a = F("a")
    ax = axiom_rule(m.flatten(a))
    c = n.extend([ax])
    target = (Multiset.of(m.flatten(F("b"))), m.flatten(F("a * b")))
    e = derive(c, *target, 4)
    back = structural_cut_transform(m, a, "2to1", derivation=e, base=n)
    assert check_atomic(n, back) == (target[0].add(m.flatten(F("!a"))), target[1])
    again = structural_cut_transform(m, a, "1to2", host=back, closed=App(ax, ()), base=n, ext=c)
    assert check_atomic(c, again) == target


def test_structural_cut_ref_case_uses_weakening():
    _, _, m, n = setup("!a, b |- b")
    b = m.flatten(F("b"))
    out = structural_cut_transform(m, F("a"), "2to1", derivation=Ref(b), base=n)
    assert check_atomic(n, out) == (Multiset.of(m.flatten(F("!a")), b), b)
    assert n.classify(out.rule)[0] == "Wk"


def test_structural_cut_rejects_bad_inputs():
    _, _, m, n = setup("!a, b |- b")
    with pytest.raises(FlatteningError):
        structural_cut_transform(m, F("b"), "2to1", derivation=Ref(m.flatten(F("b"))), base=n)
    with pytest.raises(ValueError):
        structural_cut_transform(m, F("a"), "sideways")


@pytest.mark.parametrize("text", ["p & q", "p -o q", "1", "0", "top", "p + q", "!p", "p * q"])
def test_definition_checks(text):
    x = F(text)
    xi = subformula_closure(Sequent(EMPTY, x))
    reports = [r for r in sim_base_definition_checks(xi, depth=3) if r.formula == str(x)]
    assert len(reports) == 1
    assert reports[0].passed, reports[0].as_dict()
    assert reports[0].instances > 0
