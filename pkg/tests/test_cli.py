import csv
import json
import subprocess
import sys

import pytest

from graphs import complete, petersen
from ruling_color.cli import main
from ruling_color.graph import dump_graph, load_graph


def write_graph(path, g):
    with open(path, "w") as fh:
        dump_graph(g, fh)
    return str(path)


@pytest.fixture
def petersen_file(tmp_path):
    return write_graph(tmp_path / "petersen.txt", petersen())


def test_generate_roundtrip(tmp_path):
    out = tmp_path / "t.txt"
    assert main(["generate", "--gen", "torus_grid:rows=4,cols=5", "--out", str(out)]) == 0
    g = load_graph(out.read_text())
    assert g.n == 20 and g.m == 40 and g.delta == 4


def test_generate_unknown_kind(tmp_path, capsys):
    assert main(["generate", "--gen", "nope:n=3", "--out", str(tmp_path / "x")]) == 1
    assert "unknown generator" in capsys.readouterr().err


def test_run_det_and_verify(tmp_path, petersen_file):
    col, rep = tmp_path / "col.txt", tmp_path / "rep.json"
    assert main(["run-det", "--graph", petersen_file, "--out", str(col), "--report", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["verification"]["summary"] is True
    assert report["config"]["pipeline"] == "det" and report["n"] == 10
    assert report["total_rounds"] == sum(report["phases"].values())
    assert main(["verify", "--graph", petersen_file, "--coloring", str(col), "--report", str(tmp_path / "v.json")]) == 0


def test_verify_rejects_bad_coloring(tmp_path, petersen_file, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("".join(f"{v} 1\n" for v in range(10)))
    assert main(["verify", "--graph", petersen_file, "--coloring", str(bad)]) == 1
    assert "both colored 1" in capsys.readouterr().out


def test_run_det_brooks_violation(tmp_path, capsys):
    k4 = write_graph(tmp_path / "k4.txt", complete(4))
    assert main(["run-det", "--graph", k4, "--out", str(tmp_path / "c.txt")]) != 0
    assert "Brooks precondition" in capsys.readouterr().err


def test_malformed_graph_file(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("3 2\n0 1\n")
    assert main(["run-det", "--graph", str(f)]) == 1
    assert "declares 2 edges" in capsys.readouterr().err


def test_reports_byte_identical(tmp_path):
    args = ["--gen", "random_regular:n=256,delta=3", "--seed", "4"]
    for cmd in ("run-det", "run-rand"):
        rep = tmp_path / f"{cmd}.json"
        flags = [cmd, *args, "--report", str(rep), "--out", str(tmp_path / "c1")]
        assert main(flags) == 0
        first = rep.read_bytes()
        assert main(flags) == 0
        assert rep.read_bytes() == first
        cfg = json.loads(first)["config"]
        assert cfg["gen"] == "random_regular:n=256,delta=3" and cfg["seed"] == 4


def test_run_rand_options(tmp_path):
    rep = tmp_path / "r.json"
    assert main(["run-rand", "--gen", "torus_grid:rows=12,cols=12", "--seed", "3", "--d", "1",
                 "--max-retries", "8", "--report", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["config"]["d"] == 1 and report["info"]["d"] == 1


def test_bench_csv(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--n", "64", "128", "--seeds", "1", "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["n"] for r in rows] == ["64", "128"]
    assert all(r["verified"] == "True" and int(r["total_rounds"]) > 0 for r in rows)


def test_ruling_subgraphs_command(tmp_path, petersen_file):
    fam = tmp_path / "fam.txt"
    fam.write_text("# singletons\n0 | 0 | 0\n1 | 1 | 1\n7 | 7 | 7\n0 1 2 | 0 1 | 1\n")
    rep = tmp_path / "r.json"
    assert main(["ruling-subgraphs", "--graph", petersen_file, "--family", str(fam), "--d", "1",
                 "--report", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["selected"]
    assert report["metrics"]["coverage_radius"] <= report["metrics"]["coverage_bound"]


def test_ruling_subgraphs_bad_family(tmp_path, petersen_file, capsys):
    fam = tmp_path / "fam.txt"
    fam.write_text("0 | 0 | 0 1\n")
    assert main(["ruling-subgraphs", "--graph", petersen_file, "--family", str(fam)]) == 1
    assert "exactly one root" in capsys.readouterr().err


def test_find_nldcc(tmp_path):
    rep = tmp_path / "f.json"
    assert main(["find-nldcc", "--gen", "torus_grid:rows=6,cols=6", "--radius", "2", "--vertex", "7",
                 "--report", str(rep)]) == 0
    rows = json.loads(rep.read_text())["structures"]
    assert len(rows) == 1 and rows[0]["vertex"] == 7 and rows[0]["kind"] == "nice_ldcc"
    assert len(rows[0]["vertices"]) == 6


def test_module_entry_point(tmp_path):
    out = tmp_path / "g.txt"
    proc = subprocess.run([sys.executable, "-m", "ruling_color", "generate", "--gen", "theta_chain:blocks=3",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert load_graph(out.read_text()).n > 0
