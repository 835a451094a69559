import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import CANDIDATES, all_bases
from illbes.base import (
    Base, BaseFormatError, base_from_json, base_to_json, box, load_base, persistent_atoms, rule, save_base, seq,
)
from illbes.core import atom

p, q = atom("p"), atom("q")


def test_persistent_atoms_definition():
    assert persistent_atoms(Base([rule([], box(seq([], q)), p)])) == {p}
    assert persistent_atoms(Base([rule([], None, p)])) == set()
    # a rule with boxes does not make its conclusion persistent
    assert persistent_atoms(Base([rule([box(seq([], q))], box(seq([], q)), p)])) == set()


def test_duplicates_collapse():
    assert len(Base([CANDIDATES[0], CANDIDATES[0]])) == 1


def test_subset_and_equality():
    small, big = Base(CANDIDATES[:2]), Base(CANDIDATES)
    assert small <= big and not big <= small
    assert Base(reversed(CANDIDATES)) == big
    assert hash(Base(reversed(CANDIDATES))) == hash(big)


def test_save_load_round_trip(tmp_path):
    for b in all_bases()[::7]:
        path = tmp_path / "b.json"
        save_base(b, path)
        assert load_base(path) == b


def test_json_is_canonical():
    a = base_to_json(Base(CANDIDATES))
    b = base_to_json(Base(reversed(CANDIDATES)))
    assert json.dumps(a) == json.dumps(b)


def test_empty_rules_ok():
    assert len(base_from_json({"rules": []})) == 0


@pytest.mark.parametrize("obj", [
    {"rules": [{"boxes": [], "modal": [], "concl": "p -o q"}]},
    {"rules": [{"boxes": [], "modal": [], "concl": {"atom": "p"}}]},
    {"rules": [{"boxes": [], "modal": []}]},
    {"rules": [{"boxes": [[{"prem": ["Q"], "concl": "p"}]], "concl": "p"}]},
    {"rules": [{"concl": "#x"}]},
    {"rule": []},
])
def test_malformed_rejected(obj):
    with pytest.raises(BaseFormatError):
        base_from_json(obj)


def test_flattened_and_unit_atoms_accepted():
    b = base_from_json({"rules": [{"boxes": [[{"prem": ["#3"], "concl": "top"}]], "concl": "#0"}]})
    assert {str(a) for a in b.atoms()} == {"#0", "#3", "top"}


def test_load_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(BaseFormatError):
        load_base(path)


@given(st.sets(st.integers(0, 5)), st.sets(st.integers(0, 5)))
def test_persistent_atoms_monotone(xs, ys):
    b = Base(CANDIDATES[i] for i in xs)
    c = Base(CANDIDATES[i] for i in xs | ys)
    assert b <= c
    assert persistent_atoms(b) <= persistent_atoms(c)
