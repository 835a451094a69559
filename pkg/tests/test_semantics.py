import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from illbes.atomic import derive
from illbes.base import Base, BaseFormatError, box, rule, seq
from illbes.core import EMPTY, Multiset, atom, degree, parse_formula, parse_sequent
from illbes.semantics import (
    GEN_INF, INF, LEMMAS, BoundedUniverse, Evaluator, UniverseError, closure_rules, formulas_upto,
    load_universe, run_lemma, run_lemma_checks, supports, supports_sequent,
)

F = parse_formula
p, q = atom("p"), atom("q")
U1 = BoundedUniverse.closed([p])
U2 = BoundedUniverse.closed([p, q])


@pytest.fixture(scope="module")
def ev2():
    return Evaluator(U2)


def test_atomic_support_is_derivability():
    assert supports(U1, Base(), Multiset.of(p), F("p"))
    assert not supports(U1, Base(), EMPTY, F("p"))
    assert supports(U1, Base(closure_rules([p])[:1]), EMPTY, F("p"))


def test_units():
    assert supports(U2, Base(), Multiset.of(p, q), F("top"))
    assert supports(U2, Base(), EMPTY, F("1"))
    assert not supports(U2, Base(), Multiset.of(p), F("0"))


def test_dereliction_sequent():
    assert supports_sequent(U1, Base(), EMPTY, Multiset.of(F("!p")), F("p"), INF)
    assert supports_sequent(U1, Base(), EMPTY, Multiset.of(F("p")), F("p"), INF)


def test_empty_context_delegates():
    ev = Evaluator(U1)
    for f in formulas_upto([p], 3):
        assert ev.supports_sequent(0, EMPTY, EMPTY, f, INF) == ev.supports(0, EMPTY, f)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** len(U2.rules) - 1),
       st.lists(st.sampled_from([p, q]), max_size=2),
       st.lists(st.sampled_from(["p", "q", "!p", "p * q", "p & q", "1"]), min_size=1, max_size=2),
       st.sampled_from(["p", "q", "p * q", "p + q", "!q", "0", "top"]))
def test_inf_and_gen_inf_agree(ev2, mask, L, gamma, goal):
    L, gamma, goal = Multiset(L), Multiset(F(g) for g in gamma), F(goal)
    assert ev2.supports_sequent(mask, L, gamma, goal, INF) == ev2.supports_sequent(mask, L, gamma, goal, GEN_INF)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** len(U2.rules) - 1), st.lists(st.sampled_from([p, q]), max_size=2),
       st.sampled_from([p, q]))
def test_atomic_definitional_agreement(ev2, mask, L, goal):
    L = Multiset(L)
    want = derive(ev2.base(mask), L, goal, U2.depth) is not None
    assert ev2.supports(mask, L, F(str(goal))) == want


def test_degree_guard(ev2):
    with pytest.raises(AssertionError):
        ev2.supports(0, EMPTY, F("p * q"), _limit=degree(F("p * q")))


def test_universe_errors():
    with pytest.raises(UniverseError):
        Evaluator(BoundedUniverse([p], []))
    with pytest.raises(UniverseError):
        supports(U1, Base(), EMPTY, F("q"))
    with pytest.raises(UniverseError):
        BoundedUniverse([p], [rule([], None, q)])
    with pytest.raises(UniverseError):
        Evaluator(U1).mask_of(Base([rule([box(seq([], p))], None, p)]))


def test_universe_json(tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps(U2.to_json()))
    assert load_universe(path) == U2
    path.write_text(json.dumps({"atoms": ["p", "q"], "rules": "closure", "msetBound": 1}))
    u = load_universe(path)
    assert u.is_closed() and u.mset_bound == 1
    path.write_text(json.dumps({"atoms": ["p"], "msetBound": -1}))
    with pytest.raises(BaseFormatError):
        load_universe(path)


def test_formula_enumeration():
    fs = formulas_upto([p], 3)
    assert len(fs) == len(set(fs))
    assert all(degree(f) <= 3 for f in fs)
    assert F("!p") in fs and F("p * p") in fs and F("!!p") in fs and F("!!!p") not in fs


@pytest.mark.parametrize("name", sorted(LEMMAS))
def test_each_lemma_small(name):
    r = run_lemma(U1, name, 3)
    assert r.passed, r.as_dict()
    assert r.instances > 0


def test_run_lemma_checks_rejects_unknown():
    with pytest.raises(ValueError):
        run_lemma_checks(U1, ["no-such-lemma"], 2)
    with pytest.raises(UniverseError):
        run_lemma_checks(BoundedUniverse([p], []), "all", 2)


def test_sequent_support_examples(ev2):
    assert ev2.valid(parse_sequent("!p |- p * p"))
    assert ev2.valid(parse_sequent("p, q |- p * q"))
    assert not ev2.valid(parse_sequent("p + q |- p"))
    assert not ev2.valid(parse_sequent("|- 0"))
