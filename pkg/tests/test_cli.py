import json

import pytest

from illbes.base import Base, base_from_json, save_base
from illbes.cli import main
from illbes.nill import check_nill, nill_from_json
from illbes.core import atom, parse_sequent
from illbes.semantics import BoundedUniverse


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def universe(tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps(BoundedUniverse.closed([atom("a")]).to_json()))
    return str(path)


def test_validate_exit_codes(capsys):
    code, out, _ = run(capsys, "validate", "--sequent", "!a |- a * a", "--depth", "8")
    assert code == 0
    obj = json.loads(out)
    assert obj["status"] == "valid"
    assert check_nill(nill_from_json(obj["derivation"])) == parse_sequent("!a |- a * a")
    code, out, _ = run(capsys, "validate", "--sequent", "a |- a * a", "--depth", "8")
    assert code == 1 and json.loads(out)["status"] == "not-found"


def test_output_is_deterministic(capsys):
    first = run(capsys, "validate", "--sequent", "!(a & b) |- !a * !b")
    second = run(capsys, "validate", "--sequent", "!(a & b) |- !a * !b")
    assert first == second


def test_usage_errors(capsys):
    assert run(capsys, "parse", "--formula", "p -o")[0] == 2
    assert run(capsys, "validate")[0] == 2
    assert run(capsys, "validate", "--sequent", "a |- a", "--depth", "0")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "check-nill", "/no/such/file.json")[0] == 2


def test_parse_and_translate(capsys):
    assert run(capsys, "parse", "--formula", "p*q-o r") == (0, "p * q -o r\n", "")
    assert run(capsys, "translate", "--formula", "p -> q")[1] == "!p -o q\n"
    assert run(capsys, "translate", "--sequent", "p \\/ q |- q \\/ p")[1] == "!(!p + !q) |- !q + !p\n"


def test_prove_then_check(capsys, tmp_path):
    code, out, _ = run(capsys, "prove", "--sequent", "a * b |- b * a")
    assert code == 0
    path = tmp_path / "d.json"
    path.write_text(json.dumps(json.loads(out)["derivation"]))
    assert run(capsys, "check-nill", str(path), "--sequent", "a * b |- b * a")[0] == 0
    assert run(capsys, "check-nill", str(path), "--sequent", "a |- a")[0] == 1


def test_sim_base_and_derive(capsys, tmp_path):
    code, out, _ = run(capsys, "sim-base", "--sequent", "a, b |- a * b")
    assert code == 0
    obj = json.loads(out)
    base_file = tmp_path / "n.json"
    base_file.write_text(json.dumps(obj))
    flat = obj["map"]["a * b"]
    code, out, _ = run(capsys, "derive", "--base", str(base_file), "--sequent", f"a, b |- {flat}")
    assert code == 0
    d_file = tmp_path / "d.json"
    d_file.write_text(json.dumps(json.loads(out)["derivation"]))
    assert run(capsys, "check-atomic", str(d_file), "--base", str(base_file))[0] == 0
    assert run(capsys, "derive", "--base", str(base_file), "--sequent", f"a |- {flat}")[0] == 1


def test_flatten(capsys):
    code, out, _ = run(capsys, "flatten", "--sequent", "!a |- a", "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["map"]["a"] == "a"
    assert obj["flattened"] == f"{obj['map']['!a']} |- a"


def test_support_and_suite(capsys, universe, tmp_path):
    assert run(capsys, "support", "--universe", universe, "--sequent", "!a |- a * a")[0] == 0
    assert run(capsys, "support", "--universe", universe, "--sequent", "a |- 0")[0] == 1
    code, out, _ = run(capsys, "suite", "--universe", universe, "--lemmas", "mand-key,bang-dereliction",
                       "--degree", "2", "--json")
    assert code == 0
    assert [r["lemma"] for r in json.loads(out)] == ["mand-key", "bang-dereliction"]
    assert run(capsys, "suite", "--universe", universe, "--lemmas", "nope")[0] == 2


def test_out_file(capsys, tmp_path):
    target = tmp_path / "out.txt"
    assert run(capsys, "parse", "--formula", "!p", "--out", str(target)) == (0, "", "")
    assert target.read_text() == "!p\n"


def test_base_file_errors(capsys, tmp_path):
    bad = tmp_path / "b.json"
    bad.write_text('{"rules": [{"concl": "p -o q"}]}')
    assert run(capsys, "derive", "--base", str(bad), "--sequent", "p |- p")[0] == 2
    good = tmp_path / "g.json"
    save_base(Base(), good)
    assert run(capsys, "derive", "--base", str(good), "--sequent", "p |- p")[0] == 0
    assert base_from_json(json.loads(good.read_text())) == Base()
