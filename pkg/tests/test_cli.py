import json
import subprocess
import sys

import pytest

from confkit.cli import main, run


@pytest.mark.parametrize("argv", [
    ["axioms", "--algebra", "W", "--n", "2"],
    ["axioms", "--algebra", "S", "--n", "2", "--b", "1"],
    ["axioms", "--algebra", "Stilde", "--n", "2"],
    ["axioms", "--algebra", "Vir"],
    ["classify", "--algebra", "W", "--family", "theta", "--n", "2", "--k", "0..3"],
    ["classify", "--algebra", "S", "--family", "barforms", "--n", "2", "--k", "1"],
    ["classify", "--algebra", "W", "--family", "standard", "--n", "3", "--alpha", "-1/2"],
    ["derham", "--n", "2", "--jmax", "3"],
    ["dual"],
    ["w1", "--a", "0", "--b", "1"],
    ["w1", "--a", "1", "--b", "-1"],
    ["w1", "--a", "1/2", "--b", "1/3"],
])
def test_commands_pass(argv):
    code, report, _ = run(argv)
    assert code == 0, [c for c in report["checks"] if c["status"] != "pass"]


@pytest.mark.parametrize("argv", [
    ["axioms", "--algebra", "W", "--n", "99"],
    ["axioms", "--algebra", "Stilde", "--n", "3"],
    ["classify", "--algebra", "W", "--family", "nope", "--n", "2"],
    ["classify", "--algebra", "W", "--family", "theta", "--n", "2", "--k", "x"],
    ["nosuchcommand"],
])
def test_bad_input_exit_2(argv):
    assert run(argv)[0] == 2


def test_bad_rep_file(tmp_path):
    p = tmp_path / "rep.json"
    p.write_text("{not json")
    assert run(["classify", "--n", "2", "--rep", str(p)])[0] == 2


def test_rep_with_broken_relations(tmp_path):
    # E_00 and E_11 both act as 1 on a 1-dim even space: [E_10, E_01] relation fails
    data = {"n": 1, "dim": 2, "parities": [0, 1],
            "E": {"0,0": [[1, 0], [0, 1]], "1,1": [[0, 0], [0, 1]], "1,0": [[0, 0], [1, 0]], "0,1": [[0, 0], [0, 0]]}}
    p = tmp_path / "rep.json"
    p.write_text(json.dumps(data))
    code, report, _ = run(["classify", "--n", "2", "--rep", str(p)])
    assert code == 2 and "relations" in report["error"]


def test_user_rep_runs(tmp_path):
    n = 2
    E = {f"{i},{j}": [[1 if (r == i and c == j) else 0 for c in range(3)] for r in range(3)]
         for i in range(n + 1) for j in range(n + 1)}
    p = tmp_path / "std.json"
    p.write_text(json.dumps({"n": n, "dim": 3, "parities": [0, 1, 1], "E": E}))
    code, report, _ = run(["classify", "--n", "2", "--rep", str(p)])
    assert code == 0 and report["artifacts"]["reports"][0]["count"] == 0


def test_threads_env(monkeypatch):
    monkeypatch.setenv("CONFKIT_THREADS", "zero")
    assert run(["axioms", "--algebra", "Vir"])[0] == 2


def test_json_stable(capsys):
    argv = ["classify", "--algebra", "W", "--family", "barforms", "--n", "2", "--k", "1,2", "--format", "json"]
    assert main(argv) == 0
    a = capsys.readouterr().out
    assert main(argv) == 0
    b = capsys.readouterr().out
    assert a == b
    rep = json.loads(a)
    assert rep["command"] == "classify"
    assert [r["count"] for r in rep["artifacts"]["reports"]] == [1, 1]


def test_classify_reports_both_tables(capsys):
    main(["--format", "json", "classify", "--algebra", "S", "--family", "barforms", "--n", "2", "--k", "1"])
    (entry,) = json.loads(capsys.readouterr().out)["artifacts"]["reports"]
    assert entry["count"] == 3 and entry["matches_expected"] and not entry["matches_paper"]


def test_text_output_and_file(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert main(["axioms", "--algebra", "Vir", "--format", "text", "-o", str(out)]) == 0
    assert out.read_text().strip().endswith("OK")


def test_error_goes_to_stderr(capsys):
    assert main(["axioms", "--n", "99", "--format", "text"]) == 2
    cap = capsys.readouterr()
    assert cap.out == "" and "error" in cap.err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "confkit", "axioms", "--algebra", "Vir"], capture_output=True,
                       text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["command"] == "axioms"
