import json

import pytest

from cgkit import cgvariety as cv
from cgkit.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_n_range, run_suite
from cgkit.reptheory import KleinianGroup


def run(args, capsys):
    with pytest.raises(SystemExit) as exc:
        main(args)
    return exc.value.code, capsys.readouterr().out


def test_parse_n_range():
    assert parse_n_range("2..5") == [2, 3, 4, 5]
    assert parse_n_range("4,6") == [4, 6]


def test_irreps_json(capsys):
    code, out = run(["--json", "irreps", "--family", "D", "--n", "4"], capsys)
    assert code == EXIT_OK
    assert "O1" in json.dumps(json.loads(out))


def test_cg_table_and_phi0(capsys):
    assert run(["cg-table", "--family", "A", "--n", "3"], capsys)[0] == EXIT_OK
    assert run(["phi0", "--family", "D", "--n", "5"], capsys)[0] == EXIT_OK


def test_unsupported_group_is_usage_error(capsys):
    assert run(["irreps", "--family", "D", "--n", "3"], capsys)[0] == EXIT_USAGE
    assert run(["irreps", "--family", "A", "--n", "13"], capsys)[0] == EXIT_USAGE


def test_unknown_command_is_usage_error(capsys):
    assert run(["frobnicate"], capsys)[0] == EXIT_USAGE


def test_verify_coherence(capsys):
    code, _ = run(["verify", "coherence", "--family", "D", "--n", "4", "--trials", "5"], capsys)
    assert code == EXIT_OK


def test_verify_with_broken_datum_fails(tmp_path, capsys):
    phi = cv.phi0(KleinianGroup("D", 4))
    bad = phi.replace({("O1", "E2"): phi.block("O1", "E2").scale(2)})
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad.to_json()))
    code, _ = run(["verify", "coherence", "--family", "D", "--n", "4", "--trials", "1",
                   "--datum", str(path)], capsys)
    assert code == EXIT_FAIL


def test_datum_for_wrong_group(tmp_path, capsys):
    path = tmp_path / "a.json"
    path.write_text(json.dumps(cv.phi0(KleinianGroup("A", 2)).to_json()))
    code, _ = run(["rmap", "--family", "D", "--n", "4", "--datum", str(path)], capsys)
    assert code == EXIT_USAGE


def test_rmap_numeric(capsys):
    code, out = run(["--json", "rmap", "--family", "A", "--n", "2", "--x", "1,2"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)


def test_bad_x_is_usage_error(capsys):
    assert run(["rmap", "--family", "A", "--n", "2", "--x", "1"], capsys)[0] == EXIT_USAGE


def test_stability_modes(capsys):
    assert run(["stability", "king", "--family", "A", "--n", "3", "--x", "1,1"], capsys)[0] == EXIT_OK
    code, _ = run(["stability", "hm", "--family", "A", "--n", "3", "--x", "0,0",
                   "--exponents", "U1=1;U2=1;U3=1"], capsys)
    assert code == EXIT_OK


def test_destabilize_random_point(capsys):
    code, out = run(["--json", "--seed", "4", "destabilize", "--n", "4"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["certificate"] is True


def test_nullcone(capsys):
    assert run(["nullcone", "--family", "A", "--n", "3", "--a", "2", "--b", "-1"], capsys)[0] == EXIT_OK
    assert run(["nullcone", "--family", "D", "--n", "5"], capsys)[0] == EXIT_OK
    assert run(["nullcone", "--family", "D", "--n", "4", "--exponents", "displayed"], capsys)[0] == EXIT_FAIL


def test_invariants_and_stabilizer(capsys):
    assert run(["invariants", "--family", "D", "--n", "6"], capsys)[0] == EXIT_OK
    assert run(["stabilizer", "--family", "D", "--n", "6"], capsys)[0] == EXIT_OK


def test_catalogue_single_case(capsys):
    assert run(["d4-catalogue", "--case", "C1"], capsys)[0] == EXIT_OK
    assert run(["d4-catalogue", "--case", "b2"], capsys)[0] == EXIT_OK
    assert run(["d4-catalogue", "--case", "q"], capsys)[0] == EXIT_OK
    assert run(["d4-catalogue", "--case", "nope"], capsys)[0] == EXIT_USAGE


def test_catalogue_all_json(capsys):
    code, out = run(["--json", "d4-catalogue", "--case", "all"], capsys)
    assert code == EXIT_OK
    assert len(json.loads(out)["cases"]) == 17


def test_zcompare(capsys):
    assert run(["zcompare", "--trials", "5"], capsys)[0] == EXIT_OK


def test_verify_all_needs_family(capsys):
    assert run(["verify-all"], capsys)[0] == EXIT_USAGE


def test_verify_all_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _ = run(["--stable", "verify-all", "--family", "A", "--n", "2..3", "--trials", "5",
                   "--out", str(out)], capsys)
    assert code == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["status"] == "pass"
    assert "generated" not in rep


def test_verify_all_reports_honest_failures(capsys):
    code, _ = run(["verify-all", "--family", "D", "--n", "4", "--selector", "stage1", "--trials", "3"], capsys)
    assert code == EXIT_FAIL


def test_run_suite_is_deterministic():
    a = run_suite("stage5", [("A", 3)], seed=7, trials=5).to_json(stable=True)
    b = run_suite("stage5", [("A", 3)], seed=7, trials=5).to_json(stable=True)
    assert a == b


def test_file_workflow(tmp_path, capsys):
    datum, rep = tmp_path / "datum.json", tmp_path / "rep.json"
    assert run(["phi0", "--family", "D", "--n", "6", "--out", str(datum)], capsys)[0] == EXIT_OK
    assert run(["rmap", "--datum", str(datum), "--x", "1,1", "--out", str(rep)], capsys)[0] == EXIT_OK
    code, out = run(["stability", "king", "--rep", str(rep), "--json"], capsys)
    assert code == EXIT_OK and json.loads(out)["semistable"] is True
    assert run(["verify", "preprojective", "--rep", str(rep)], capsys)[0] == EXIT_OK
    assert run(["verify", "symmetry", "--datum", str(datum), "--trials", "3"], capsys)[0] == EXIT_OK


def test_global_flags_after_subcommand(capsys):
    code, out = run(["nullcone", "--family", "D", "--n", "5", "--a", "1", "--precision", "256", "--json"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["track"] == "AppComplex/256"
    assert run(["nullcone", "--family", "D", "--n", "5", "--precision", "32"], capsys)[0] == EXIT_USAGE


def test_invariants_verify_flag(capsys):
    assert run(["invariants", "--family", "D", "--n", "5", "--verify"], capsys)[0] == EXIT_OK
    assert run(["invariants", "--family", "D", "--n", "6", "--variant", "displayed"], capsys)[0] == EXIT_OK
    code, _ = run(["invariants", "--family", "D", "--n", "6", "--variant", "displayed", "--verify"], capsys)
    assert code == EXIT_FAIL


def test_rmap_out_needs_numeric_x(tmp_path, capsys):
    code, _ = run(["rmap", "--family", "A", "--n", "2", "--out", str(tmp_path / "r.json")], capsys)
    assert code == EXIT_USAGE


def test_destabilize_semistable_input_is_usage_error(tmp_path, capsys):
    datum = tmp_path / "a3.json"
    run(["phi0", "--family", "A", "--n", "3", "--out", str(datum)], capsys)
    assert run(["destabilize", "--datum", str(datum), "--x", "1,0"], capsys)[0] == EXIT_USAGE
    assert run(["destabilize", "--datum", str(datum), "--x", "0,0"], capsys)[0] == EXIT_OK
