"""Acceptance criteria, one test each.

Every test runs the criterion through the same code path as ``tropdp repro``
and asserts the stated thresholds on the detail.  The PASS/FAIL line of each
criterion is printed in the terminal summary (see conftest.py).
"""

from __future__ import annotations

from tropdp import repro

_cache: dict[int, repro.CriterionResult] = {}
LINES: list[str] = []


def result(cid: int) -> repro.CriterionResult:
    if cid not in _cache:
        _cache[cid] = repro.run_criterion(cid)
        print(_cache[cid].line())
        LINES.append(_cache[cid].line())
    return _cache[cid]


def test_01_is_oracle():
    r = result(1)
    d = r.detail
    assert d["instances"] == 200 and d["mismatches"] == 0
    assert r.seconds < 10.0
    assert r.passed, d


def test_02_is_semantics():
    r = result(2)
    assert r.detail["graphs"] > 0 and not r.detail["failures"]
    assert r.passed, r.detail


def test_03_tsp_oracle():
    r = result(3)
    d = r.detail
    assert [f["graph"] for f in d["families"]] == ["G_{3,1}", "G_{4,1}", "G_{3,2}", "G_{4,2}"]
    assert all(f["ok"] for f in d["families"])
    assert d["instances"] >= 54 and d["trials"] == 100 and d["failures"] == 0
    assert r.seconds < 60.0
    assert r.passed, d


def test_04_dst_oracle():
    r = result(4)
    d = r.detail
    assert [f["graph"] for f in d["families"]] == ["H_{2,1}", "H_{3,1}", "H_{2,2}"]
    assert d["value_failures"] == 0 and d["count_failures"] == 0
    assert d["instances"] >= 53
    assert r.passed, d


def test_05_counting_identities():
    r = result(5)
    got = {(row["family"], row["n"], row["k"]): row["enumerated"] for row in r.detail["rows"]}
    assert got == {
        ("dtsp-cycles", 3, 2): 4,
        ("dtsp-cycles", 4, 2): 8,
        ("dtsp-cycles", 3, 3): 72,
        ("dst-nice-cycles", 2, 1): 4,
        ("dst-nice-cycles", 3, 1): 8,
        ("dst-nice-cycles", 3, 2): 6912,
    }
    assert r.seconds < 300.0
    assert r.passed, r.detail


def test_06_group_identities():
    r = result(6)
    d = r.detail
    assert d["class_sizes"] and d["orbit_is_class"] and d["conjugator_count_constant"]
    for row in d["completions"]:
        assert list(row["counts"]) == [row["formula"]]
    assert [row["k"] for row in d["completions"]] == [2, 3, 4]
    assert r.passed, d


def test_07_covers_and_bounds():
    r = result(7)
    d = r.detail
    covers = {row["k"]: row for row in d["covers"]}
    assert covers[1]["C_k"] == 1 and covers[2]["C_k"] == 2
    assert covers[3]["optimal"] and covers[4]["optimal"]
    assert all(row["verified"] for row in d["covers"])
    assert [b["k"] for b in d["bipartite_bounds"]] == [2, 3, 4]
    assert all(b["holds"] for b in d["bipartite_bounds"])
    assert [b["k"] for b in d["clique_bounds"]] == [2, 3]
    assert all(b["holds"] for b in d["clique_bounds"])
    assert r.seconds < 300.0
    assert r.passed, d


def test_08_randomized_cover():
    r = result(8)
    d = r.detail
    assert d["mu_violations"] == 0 and d["tuples_per_k"] >= 10_000
    assert [c["k"] for c in d["covers"]] == [3, 4]
    assert all(c["attempts"] <= 10 for c in d["covers"])
    assert r.passed, d


def test_09_decomposition():
    r = result(9)
    rows = {row["circuit"]: row for row in r.detail["rows"]}
    assert "held-karp N=4" in rows and "dtsp G_{3,2}" in rows
    for row in rows.values():
        assert row["ok"] and row["rectangles"] <= row["gates"]
    assert r.passed, r.detail


def test_10_thin_rectangles():
    r = result(10)
    d = r.detail
    assert d["exhaustive"]["violations"] == 0 and d["exhaustive"]["checked"] > 0
    assert d["sampled"]["checked"] == 100_000 and d["sampled"]["violations"] == 0
    assert r.seconds < 120.0
    assert r.passed, d


def test_11_rectangle_bounds():
    r = result(11)
    d = r.detail
    assert [(row["n"], row["k"]) for row in d["dtsp"]] == [(4, 2), (4, 3)]
    assert all(row["holds"] and row["C_k_optimal"] for row in d["dtsp"])
    assert d["dst"]["holds"] and d["dst"]["rectangles"] > 0
    assert r.passed, d


def test_12_sampler_uniformity():
    r = result(12)
    d = r.detail
    assert sum(d["counts"]) == 40_000 and len(d["counts"]) == 4
    assert d["p_value"] > 0.001
    assert d["outside_support"] == 0 and d["deterministic"]
    assert r.passed, d


def test_13_certificates():
    r = result(13)
    d = r.detail
    assert d["decompositions"] == 3 + 5 * 3 * 3 and not d["violations"]
    assert [(b["n"], b["k"]) for b in d["bijection"]] == [(3, 1), (3, 2)]
    assert all(b["bijective"] and b["sequence_roundtrip"] for b in d["bijection"])
    assert r.passed, d
