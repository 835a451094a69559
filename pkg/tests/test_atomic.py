import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import ALPHABET, CANDIDATES
from illbes.atomic import (
    App, AtomicCheckError, BoxUse, CutError, PersistentUse, Ref, check_atomic, cut_compose, derivation_from_json,
    derivation_to_json, derive, enumerate_derivable, multisets_upto, weaken_base,
)
from illbes.base import Base, box, rule, seq
from illbes.core import EMPTY, Multiset, atom

p, q, r = atom("p"), atom("q"), atom("r")
R1 = rule([box(seq([], p)), box(seq([], q))], None, r)
R2 = rule([box(seq([], p), seq([], q))], None, r)
AXP, AXQ = rule([], None, p), rule([], None, q)


def test_ref():
    d = derive(Base(), Multiset.of(p), p, 1)
    assert d == Ref(p)
    assert check_atomic(Base(), d) == (Multiset.of(p), p)


@pytest.mark.parametrize("k", [1, 3, 6])
def test_no_weakening_in_empty_base(k):
    assert derive(Base(), Multiset.of(p, q), p, k) is None


def test_two_boxes_split_context():
    b = Base([R1])
    d = derive(b, Multiset.of(p, q), r, 3)
    assert isinstance(d, App) and d.rule == R1
    assert [u.context for u in d.boxes] == [Multiset.of(p), Multiset.of(q)]
    assert all(isinstance(s, Ref) for u in d.boxes for s in u.subs)
    assert check_atomic(b, d) == (Multiset.of(p, q), r)


def test_additive_box_shares_context():
    b = Base([R2, AXP, AXQ])
    assert derive(b, EMPTY, r, 3) is not None
    assert derive(b, Multiset.of(p), r, 3) is None


def test_persistent_items():
    # q is persistent, so p may be derived from q's own derivation
    b = Base([rule([], box(seq([], r)), q), rule([], box(seq([q], p)), p), AXP])
    d = derive(b, EMPTY, p, 4)
    assert d is not None and check_atomic(b, d) == (EMPTY, p)


def test_checker_errors():
    b = Base([R1])
    with pytest.raises(AtomicCheckError) as e:
        check_atomic(Base(), App(R1, (BoxUse(Multiset.of(p), (Ref(p),)), BoxUse(Multiset.of(q), (Ref(q),)))))
    assert e.value.kind == "rule-not-in-base"
    with pytest.raises(AtomicCheckError) as e:
        check_atomic(b, App(R1, (BoxUse(Multiset.of(q), (Ref(p),)), BoxUse(Multiset.of(q), (Ref(q),)))))
    assert e.value.kind == "subderivation-mismatch"
    nonpers = Base([rule([], None, r), AXP])
    bad = App(AXP, (), (PersistentUse(r, Multiset.of(r), Ref(r)),))
    with pytest.raises(AtomicCheckError) as e:
        check_atomic(nonpers, bad)
    assert e.value.kind == "persistence"


def test_weaken_base():
    b = Base([R1])
    d = derive(b, Multiset.of(p, q), r, 3)
    c = b.extend([AXP])
    assert weaken_base(d, c) == d
    assert check_atomic(c, weaken_base(d, c)) == (Multiset.of(p, q), r)
    assert weaken_base(Ref(p), Base()) == Ref(p)
    with pytest.raises(ValueError, match="lacks rule"):
        weaken_base(d, Base([AXP]))


def test_cut_base_cases():
    plug = derive(Base([AXQ]), EMPTY, q, 2)
    assert cut_compose(Ref(q), [plug]) == plug
    assert cut_compose(Ref(q), []) == Ref(q)
    with pytest.raises(CutError):
        cut_compose(Ref(q), [Ref(p)])


def test_cut_identity_plugs():
    b = Base([R1])
    d = derive(b, Multiset.of(p, q), r, 3)
    out = cut_compose(d, [Ref(p), Ref(q)], b)
    assert out.endsequent() == d.endsequent()


def test_cut_replaces_hypothesis():
    b = Base([R1, AXP])
    host = derive(b, Multiset.of(p, q), r, 3)
    out = cut_compose(host, [App(AXP, ())], b)
    assert check_atomic(b, out) == (Multiset.of(q), r)


def test_oracle_examples():
    assert enumerate_derivable(Base(), [p], 2, 3) == {(Multiset.of(p), p)}
    got = enumerate_derivable(Base([AXQ]), [p, q], 2, 3)
    assert (EMPTY, q) in got and (Multiset.of(p), p) in got


def test_json_round_trip():
    b = Base(CANDIDATES)
    for ctx in multisets_upto(ALPHABET, 2):
        for goal in ALPHABET:
            d = derive(b, ctx, goal, 4, max_context=3)
            if d is not None:
                assert derivation_from_json(derivation_to_json(d, b), b) == d


@settings(max_examples=80, deadline=None)
@given(st.sets(st.integers(0, len(CANDIDATES) - 1)), st.lists(st.sampled_from(ALPHABET), max_size=3),
       st.sampled_from(ALPHABET), st.integers(1, 4))
def test_engine_checker_agreement(rules, ctx, goal, k):
    b = Base(CANDIDATES[i] for i in rules)
    ctx = Multiset(ctx)
    d = derive(b, ctx, goal, k, max_context=3)
    if d is not None:
        assert check_atomic(b, d) == (ctx, goal)
        assert d.height() <= k


def test_depth_must_be_positive():
    with pytest.raises(ValueError):
        derive(Base(), EMPTY, p, 0)
