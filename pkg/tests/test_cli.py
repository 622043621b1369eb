from __future__ import annotations

import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest
from referencing import Registry, Resource

from tropdp.cli import run


def schema(name):
    text = (resources.files("tropdp") / "schemas" / f"{name}.schema.json").read_text()
    return json.loads(text)


def invoke(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


NAMES = ("circuit", "polynomial", "graph", "decomposition", "instance", "cover", "repro")
REGISTRY = Registry().with_resources(
    (f"{n}.schema.json", Resource.from_contents(schema(n))) for n in NAMES
)


def check(doc, name):
    jsonschema.Draft202012Validator(schema(name), registry=REGISTRY).validate(doc)


@pytest.fixture
def g31(tmp_path, capsys):
    path = tmp_path / "g.json"
    code, _, _ = invoke(capsys, "gen", "--family", "dtsp", "--n", 3, "--k", 1, "--out", path)
    assert code == 0
    return path


def test_schemas_are_valid_documents():
    for name in NAMES:
        jsonschema.Draft202012Validator.check_schema(schema(name))


def test_count_example(capsys):
    code, out, _ = invoke(capsys, "count", "--family", "dtsp-cycles", "--n", 3, "--k", 2, "--format", "text")
    assert code == 0 and out.strip() == "4"
    code, out, _ = invoke(capsys, "count", "--family", "dtsp-cycles", "--n", 3, "--k", 2, "--enumerate")
    assert code == 0 and "4" in out


def test_cover_exact(capsys):
    code, out, _ = invoke(capsys, "cover", "--matrix", "bipartite", "--k", 2, "--mode", "exact")
    doc = json.loads(out)
    assert code == 0 and doc["size"] == 2 and doc["optimal"]
    check(doc, "cover")


def test_cover_round_trip_through_verify(tmp_path, capsys):
    path = tmp_path / "cover.json"
    assert invoke(capsys, "cover", "--k", 3, "--mode", "greedy", "--out", path)[0] == 0
    code, out, _ = invoke(capsys, "verify", "cover", "--cover", path, "--k", 3)
    assert code == 0 and json.loads(out)["valid"]
    doc = json.loads(path.read_text())
    doc["rectangles"] = doc["rectangles"][:1]
    path.write_text(json.dumps(doc))
    assert invoke(capsys, "verify", "cover", "--cover", path, "--k", 3)[0] == 1


def test_gen_validates(capsys):
    code, out, _ = invoke(capsys, "gen", "--family", "dst", "--n", 2, "--k", 1)
    doc = json.loads(out)
    assert code == 0
    check(doc, "instance")
    check(doc["graph"], "graph")
    check(doc["decomposition"], "decomposition")
    code, out, _ = invoke(capsys, "gen", "--family", "dst", "--n", 2, "--k", 1, "--format", "dot")
    assert out.startswith("digraph")


def test_compile_extract_eval_chain(g31, tmp_path, capsys):
    circ = tmp_path / "c.json"
    assert invoke(capsys, "compile", "--target", "dtsp", "--graph", g31, "--out", circ)[0] == 0
    check(json.loads(circ.read_text()), "circuit")
    code, out, _ = invoke(capsys, "extract", "--circuit", circ)
    poly = json.loads(out)
    assert code == 0 and len(poly["monomials"]) == 1
    check(poly, "polynomial")
    vals = {v: 2 for v in poly["variables"]}
    code, out, _ = invoke(capsys, "eval", "--circuit", circ, "--valuation", json.dumps(vals))
    assert code == 0 and json.loads(out)["value"] == 6
    code, out, _ = invoke(capsys, "eval", "--circuit", circ, "--valuation", "{}")
    assert code == 2


def test_compile_stats_keeps_circuit_as_output(g31, tmp_path, capsys):
    circ = tmp_path / "c.json"
    code, out, err = invoke(capsys, "compile", "--target", "dtsp", "--graph", g31, "--out", circ, "--stats")
    assert code == 0 and out == ""
    check(json.loads(circ.read_text()), "circuit")
    assert json.loads(err)["gates"] > 0
    assert invoke(capsys, "extract", "--circuit", circ)[0] == 0


def test_malformed_circuit_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gates": 3}))
    code, _, err = invoke(capsys, "extract", "--circuit", bad)
    assert code == 2 and "not a circuit document" in err


def test_equiv_and_decompose(g31, tmp_path, capsys):
    circ, poly = tmp_path / "c.json", tmp_path / "p.json"
    invoke(capsys, "compile", "--target", "dtsp", "--graph", g31, "--out", circ)
    invoke(capsys, "extract", "--circuit", circ, "--out", poly)
    code, out, _ = invoke(capsys, "equiv", "--circuit", circ, "--poly", poly)
    assert code == 0 and json.loads(out)["equivalent"]
    code, out, _ = invoke(capsys, "decompose", "--circuit", circ, "--n", 3, "--k", 1)
    assert code == 0 and json.loads(out)["ok"]


def test_verify_decomposition_h32(tmp_path, capsys):
    path = tmp_path / "h.json"
    invoke(capsys, "gen", "--family", "dst", "--n", 3, "--k", 2, "--out", path)
    code, out, _ = invoke(capsys, "verify", "decomposition", "--graph", path)
    doc = json.loads(out)
    assert code == 0 and doc["valid"] and doc["width"] <= 8


def test_verify_bounds_and_thinness(capsys):
    code, out, _ = invoke(capsys, "verify", "bounds", "--n", 4, "--k", 2)
    assert code == 0 and json.loads(out)["holds"]
    code, out, _ = invoke(capsys, "verify", "thinness", "--k", 2, "--samples", 500, "--seed", 1)
    assert code == 0 and json.loads(out)["holds"]


def test_floyd_warshall_compile(capsys):
    code, out, _ = invoke(capsys, "compile", "--target", "floyd-warshall", "--N", 3, "--source", 1, "--sink", 3)
    assert code == 0
    check(json.loads(out), "circuit")


def test_randomized_commands_need_seed(capsys):
    code, _, err = invoke(capsys, "sample", "--n", 2, "--k", 1)
    assert code == 2 and "--seed" in err
    code, _, err = invoke(capsys, "cover", "--k", 3, "--mode", "randomized")
    assert code == 2 and "--seed" in err


def test_sample_is_deterministic(capsys):
    a = invoke(capsys, "sample", "--n", 2, "--k", 1, "--samples", 50, "--seed", 9)
    b = invoke(capsys, "sample", "--n", 2, "--k", 1, "--samples", 50, "--seed", 9)
    assert a[0] == 0 and a[1] == b[1]


def test_randomized_cover_deterministic(capsys):
    a = invoke(capsys, "cover", "--k", 3, "--mode", "randomized", "--seed", 4)
    b = invoke(capsys, "cover", "--k", 3, "--mode", "randomized", "--seed", 4)
    assert a[1] == b[1]
    check(json.loads(a[1]), "cover")


def test_exit_codes(capsys):
    assert invoke(capsys, "matrix", "--k", 9)[0] == 3
    assert invoke(capsys, "compile", "--target", "dtsp", "--family", "dtsp", "--n", 4, "--k", 3)[0] == 3
    assert invoke(capsys, "bogus")[0] == 2
    assert invoke(capsys, "count", "--family", "dtsp-cycles", "--n", 3)[0] == 2


def test_matrix_csv(capsys):
    code, out, _ = invoke(capsys, "matrix", "--k", 2, "--format", "csv")
    assert code == 0 and out.strip()


def test_repro_subset_byte_identical(capsys):
    a = invoke(capsys, "repro", "--only", "6,13")
    b = invoke(capsys, "repro", "--only", "6,13")
    assert a[0] == 0 and a[1] == b[1]
    doc = json.loads(a[1])
    check(doc, "repro")
    assert doc["passed"] == doc["total"] == 2
    assert "[PASS]" in a[2]


def test_report_writes_csv_and_png(tmp_path, capsys):
    code, out, _ = invoke(capsys, "report", "--out", tmp_path, "--seed", 1, "--budget", 30)
    assert code == 0
    for stem in ("gate_counts", "covers", "dtsp_rectangles", "sampler"):
        assert (tmp_path / f"{stem}.csv").stat().st_size > 0
        assert (tmp_path / f"{stem}.png").read_bytes()[:4] == b"\x89PNG"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tropdp.cli", "count", "--family", "dst-nice-cycles", "--n", "2", "--k", "1", "--format", "text"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "4"
