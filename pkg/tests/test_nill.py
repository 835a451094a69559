import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import CORPUS, PROVABLE
from illbes.core import EMPTY, ONE, Multiset, Sequent, parse_formula, parse_sequent
from illbes.nill import (
    NILLCheckError, StarBang, StarRef, check_nill, check_star, nd, nill_from_json, nill_of_star, nill_to_json,
    prove_nill, star_app, star_from_json, star_of_nill, star_to_json,
)

F = parse_formula
p, q = F("p"), F("q")


def ax(f):
    return nd("Ax", phi=f)


def test_axiom():
    assert check_nill(ax(p)) == Sequent(Multiset.of(p), p)


def test_tensor_intro():
    assert check_nill(nd("*I", ax(p), ax(q))) == parse_sequent("p, q |- p * q")


def test_with_intro_needs_shared_context():
    with pytest.raises(NILLCheckError, match="context mismatch"):
        check_nill(nd("&I", ax(p), ax(q)))


def test_with_intro_shared():
    d = nd("&I", nd("&E2", ax(F("q & p"))), nd("&E1", ax(F("q & p"))))
    assert check_nill(d) == parse_sequent("q & p |- p & q")


def test_lolli_round_trip():
    d = nd("-oE", nd("-oI", ax(p), phi=p), ax(p))
    assert check_nill(d) == parse_sequent("p |- p")


def test_discharge_missing():
    with pytest.raises(NILLCheckError):
        check_nill(nd("-oI", ax(p), phi=q))


def test_tensor_elim():
    d = nd("*E", ax(F("p * q")), nd("*I", ax(q), ax(p)))
    assert check_nill(d) == parse_sequent("p * q |- q * p")


def test_promotion_closed_premise():
    d = nd("Prom", ax(F("!p")), nd("Der", ax(F("!p")), ax(p)))
    assert check_nill(d) == parse_sequent("!p |- !p")
    with pytest.raises(NILLCheckError):
        check_nill(nd("Prom", ax(p)))


def test_error_path_points_at_node():
    bad = nd("*I", ax(p), nd("&I", ax(p), ax(q)))
    with pytest.raises(NILLCheckError) as e:
        check_nill(bad)
    assert e.value.path == (1,)


def test_unknown_rule_rejected():
    with pytest.raises(ValueError):
        nd("Cut", ax(p))


def test_json_round_trip_and_rejects_stray_params():
    d = nd("+E", ax(F("p + q")), nd("+I2", ax(p), phi=q), nd("+I1", ax(q), psi=p))
    assert check_nill(d) == parse_sequent("p + q |- q + p")
    assert nill_from_json(nill_to_json(d)) == d
    obj = nill_to_json(nd("1I"))
    obj["params"] = {"phi": {"atom": "p"}}
    with pytest.raises(ValueError):
        nill_from_json(obj)


def test_star_ref_and_prom():
    assert check_star(StarRef(F("p -o q"))) == parse_sequent("p -o q |- p -o q")
    one = star_app("1I", {}, [])
    assert check_star(star_app("Prom", {"phi": ONE}, [], modal=[one])) == Sequent(EMPTY, F("!1"))


def test_star_prom_rejects_unbanged():
    d = star_app("Prom", {"phi": q}, [], bangs=[StarBang(Multiset.of(q), q, StarRef(q))], modal=[StarRef(q)])
    with pytest.raises(NILLCheckError, match="no top-level"):
        check_star(d)


@pytest.mark.parametrize("text", sorted(PROVABLE))
def test_prove_and_translate(text):
    s = parse_sequent(text)
    d = prove_nill(s, 8)
    assert d is not None and check_nill(d) == s
    star = star_of_nill(d)
    assert check_star(star) == s
    assert star_from_json(star_to_json(star)) == star
    assert check_nill(nill_of_star(star)) == s


@pytest.mark.parametrize("text", sorted(set(CORPUS) - PROVABLE))
def test_unprovable_not_found(text):
    assert prove_nill(parse_sequent(text), 6) is None


def test_search_examples():
    d = prove_nill(parse_sequent("!a |- a * a"), 6)
    assert {"Ctr", "Der", "*I"} <= d.rules_used()
    assert prove_nill(parse_sequent("|- 1"), 1).rule == "1I"


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["p", "q", "p * q", "p & q", "p -o q", "!p", "1", "top"]),
       st.sampled_from(["p", "q", "p * q", "p + q", "q -o p", "!q", "0"]))
def test_search_results_check(left, right):
    s = parse_sequent(f"{left} |- {right}")
    d = prove_nill(s, 4)
    if d is not None:
        assert check_nill(d) == s
        assert nill_of_star(star_of_nill(d)) is not None
