import io
import json
import subprocess
import sys

import pytest

from progeny.cli import golden_rows, main
from progeny.families import three_trees_example
from progeny.forest_io import emit_forest, parse_forest


@pytest.fixture
def three_trees_file(tmp_path):
    f, _ = three_trees_example()
    path = tmp_path / "three.json"
    path.write_text(emit_forest(f))
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_json(capsys, three_trees_file):
    code, out, _ = run(capsys, "eval", "mb", str(three_trees_file), "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["valid"] is True
    assert abs(obj["total"] - 1) < 1e-12
    assert len(obj["probs"]) == 27
    assert 0 < obj["quality"]["q"] <= 1


def test_eval_table_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("n=3\n1 2\n"))
    code, out, _ = run(capsys, "eval", "mf", "-")
    assert code == 0
    assert "total" in out and "quality" in out


def test_eval_json_deterministic(capsys, three_trees_file):
    first = run(capsys, "eval", "mf", str(three_trees_file), "--format", "json")[1]
    second = run(capsys, "eval", "mf", str(three_trees_file), "--format", "json")[1]
    assert first == second


def test_audit_finds_interval_share_witness(capsys, three_trees_file):
    code, out, _ = run(capsys, "audit", "mprime", "--forest", str(three_trees_file), "--format", "json")
    assert code == 1
    rep = json.loads(out)[0]
    assert rep["n_violations"] >= 1
    assert "vertex 1" in [v["where"] for v in rep["violations"]]


def test_audit_pass_and_quality(capsys):
    code, out, _ = run(capsys, "audit", "mf", "--max-n", "4", "--checks", "ic,mass,quality", "--bound", "0.4")
    assert code == 0
    assert out.count("PASS") == 3


def test_audit_empty_quality_fails(capsys):
    code, _, _ = run(capsys, "audit", "empty", "--checks", "quality", "--bound", "0.01", "--max-n", "2")
    assert code == 1


def test_audit_json_parallel_matches(capsys):
    a = run(capsys, "audit", "mb", "--max-n", "4", "--checks", "ic,quality", "--bound", "0.5", "--format", "json")[1]
    b = run(capsys, "audit", "mb", "--max-n", "4", "--checks", "ic,quality", "--bound", "0.5", "--format", "json",
            "--jobs", "2")[1]
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "bogus", "x.json"],
        ["audit", "mf", "--checks", "nope"],
        ["audit", "mf", "--checks", "quality"],
        ["audit", "mf", "--max-n", "9"],
        ["family", "overpay:10,19"],
        ["enumerate"],
        ["nosuchcommand"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "eval", "mf", str(tmp_path / "absent.json"))[0] == 2


def test_numeric_error(capsys, tmp_path):
    path = tmp_path / "big.txt"
    path.write_text("n=401\n" + "".join(f"{i} 0\n" for i in range(1, 400)))
    assert run(capsys, "eval", "meps:0.001", str(path))[0] == 3


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "3", "--count")
    assert code == 0 and out.strip() == "16"
    code, out, _ = run(capsys, "enumerate", "2")
    assert {parse_forest(line).parent for line in out.splitlines()} == {(None, None), (1, None), (None, 0)}


def test_family_round_trip(capsys, tmp_path):
    dest = tmp_path / "f.txt"
    code, _, _ = run(capsys, "family", "overpay:10,20", "--extras", "2", "--format", "text", "-o", str(dest))
    assert code == 0
    f = parse_forest(dest.read_text())
    assert f.n == 62 and len(f.roots) == 3


def test_examples(capsys):
    code, out, _ = run(capsys, "examples", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["max_abs_deviation"] <= 1e-9
    assert len(obj["rows"]) == len(golden_rows())


def test_demo_upper_bound(capsys):
    code, out, _ = run(capsys, "demo", "upper-bound", "--mechanism", "mb", "--format", "json")
    assert code == 0
    assert json.loads(out)["holds"]


def test_demo_impossibility(capsys):
    code, out, _ = run(capsys, "demo", "impossibility", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["verdict"] is True
    assert abs(obj["nonroot_mass"] - 1.1658336972468326) < 1e-9


def test_demo_impossibility_unmet(capsys):
    code, out, _ = run(capsys, "demo", "impossibility", "--generator", "const", "--format", "json")
    assert code == 0
    assert json.loads(out)["verdict"] is None


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "progeny", "enumerate", "4", "--count"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "125"
