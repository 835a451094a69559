import pytest
from hypothesis import given
from hypothesis import strategies as st

from illbes.core import Bang, FormulaSyntaxError, Lolli, Plus, With, ZERO, parse_formula
from illbes.girard import IAnd, IAtom, IBOT, IImplies, IOr, girard_translate, parse_ipl, translate_sequent

ipl = st.recursive(
    st.one_of(st.sampled_from("pqr").map(IAtom), st.just(IBOT)),
    lambda c: st.tuples(st.sampled_from([IAnd, IOr, IImplies]), c, c).map(lambda t: t[0](t[1], t[2])),
    max_leaves=10,
)


def test_parse_precedence():
    assert parse_ipl("p /\\ q \\/ r -> p") == IImplies(IOr(IAnd(IAtom("p"), IAtom("q")), IAtom("r")), IAtom("p"))
    assert parse_ipl("p -> q -> r") == IImplies(IAtom("p"), IImplies(IAtom("q"), IAtom("r")))


@pytest.mark.parametrize("bad", ["p ->", "(p", "p q", "top"])
def test_parse_errors(bad):
    with pytest.raises(FormulaSyntaxError):
        parse_ipl(bad)


@given(ipl)
def test_print_parse_round_trip(f):
    assert parse_ipl(str(f)) == f


@given(ipl)
def test_translation_is_compositional(f):
    g = girard_translate(f)
    if isinstance(f, IAtom):
        assert g == parse_formula(f.name)
    elif f is IBOT:
        assert g == ZERO
    elif isinstance(f, IAnd):
        assert g == With(girard_translate(f.left), girard_translate(f.right))
    elif isinstance(f, IOr):
        assert g == Plus(Bang(girard_translate(f.left)), Bang(girard_translate(f.right)))
    else:
        assert g == Lolli(Bang(girard_translate(f.left)), girard_translate(f.right))


def test_sequent_translation_bangs_hypotheses():
    s = translate_sequent([parse_ipl("p -> q"), parse_ipl("p")], parse_ipl("q"))
    assert str(s.conclusion) == "q"
    assert sorted(map(str, s.context)) == ["!(!p -o q)", "!p"]
