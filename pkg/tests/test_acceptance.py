"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

All checks are exact (tolerance zero); the only numeric budget is the
runtime of the factorization criterion.
"""

import pytest

from wildmf.suite import run_suite, strip_timing

SEED = 0
FACTORIZATION_BUDGET_SECONDS = 120.0


@pytest.fixture(scope="module")
def suite():
    return run_suite(SEED)


def announce(capsys, number, title, ok, summary):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({summary})")


def criterion(suite, name):
    c = suite["criteria"][name]
    return c, f"{c['cases']} cases, {c['failure_count']} failures"


def test_criterion_1_factorization_identity(suite, capsys):
    c, summary = criterion(suite, "1-factorization")
    secs = suite["timing"]["1-factorization"]
    ok = (c["ok"] and c["cases"] >= 200 and c["details"]["fields"] == ["Fp:101", "Q"]
          and secs < FACTORIZATION_BUDGET_SECONDS)
    announce(capsys, 1, "phi psi = psi phi = f I on the corpus", ok, f"{summary}, {secs:.1f}s")
    assert ok, c["failures"]


def test_criterion_2_decomposition(suite, capsys):
    c, summary = criterion(suite, "2-decomposition")
    ok = c["ok"] and c["cases"] >= 200
    announce(capsys, 2, "decomposition re-expands exactly, ord g >= 3, ord h >= 2", ok, summary)
    assert ok, c["failures"]


def test_criterion_3_knorrer_chain(suite, capsys):
    c, summary = criterion(suite, "3-knorrer")
    sizes = c["details"]["a1_chain_sizes"]
    ok = c["ok"] and all(sizes[str(n)] == 2 ** (n - 1) for n in range(1, 6)) and c["details"]["doublings"] > 0
    announce(capsys, 3, "A1 chain sizes 2^(n-1) and doubling", ok, summary)
    assert ok, c["failures"]


def test_criterion_4_structure_certification(suite, capsys):
    c, summary = criterion(suite, "4-structure")
    pairs = len(c["details"]["hom_dims"])
    ok = c["ok"] and pairs >= 50 and c["failure_count"] == 0
    announce(capsys, 4, "every hom basis element certified, reduced systems pass", ok,
             f"{pairs} pairs, {summary}")
    assert ok, c["failures"]


def test_criterion_5_faithfulness(suite, capsys):
    c, summary = criterion(suite, "5-faithfulness")
    d = c["details"]
    ok = c["ok"] and d["conjugate"] == {"yes": 20} and d["nonisomorphic"] == {"no": 20}
    announce(capsys, 5, "conjugate pairs isomorphic, distinct Jordan types not", ok, summary)
    assert ok, c["failures"]


def test_criterion_6_functoriality(suite, capsys):
    c, summary = criterion(suite, "6-functoriality")
    ok = c["ok"] and c["cases"] >= 100
    announce(capsys, 6, "composition, identity and rank law", ok,
             f"{summary}, {c['details']['pairs_with_nonzero_hom']} with nonzero homs")
    assert ok, c["failures"]


def test_criterion_7_classical(suite, capsys):
    c, summary = criterion(suite, "7-classical")
    d = c["details"]
    ok = (c["ok"] and d["drozd_sizes"] == [32, 64, 96] and len(d["gp_dims"]) >= 30
          and all(a == b for a, b in d["gp_dims"]) and len(d["drozd_dims"]) >= 10)
    announce(capsys, 7, "Drozd relations, GP dimension equality, Drozd structure", ok, summary)
    assert ok, c["failures"]


def test_criterion_8_determinism(suite, capsys):
    again = run_suite(SEED)
    ok = strip_timing(again) == strip_timing(suite) and suite["ok"]
    announce(capsys, 8, "two runs with the same seed agree", ok,
             f"{len(suite['criteria'])} criterion digests compared")
    assert ok
