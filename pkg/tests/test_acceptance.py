"""Acceptance gate: one test per criterion, one printed pass/fail line each.

The heavy exhaustive runs live here; expect the full file to take on the
order of an hour or two on 8 workers.  Universe and ps caches are shared
through the session cache directory.
"""

import shutil
import time

import pytest

from ordrecon.canonical import canonical_cert, cert_to_poset
from ordrecon.properties import (
    NONRIGID_MAXIMAL_CARD_FIXTURES, fixture_findings, report_lines,
    run_property, search_multiple_large_components,
)
from ordrecon.universe import enumerate_by_global_dedup, enumerate_universe

from conftest import CACHE_DIR
from oracles import FROZEN_LARGE_COUNTS, FROZEN_UNIVERSE_COUNTS, iso_classes
from test_canonical import from_matrix

JOBS = 8
COUNTS = {1: 1, 2: 2, 3: 5, 4: 16, 5: 63, 6: 318, 7: 2045, 8: 16999}


def report(criterion: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {criterion}: {status} — {detail}", flush=True)
    assert ok, f"criterion {criterion}: {detail}"


def test_criterion_1_enumeration_sanity(tmp_path):
    start = time.monotonic()
    ok = True
    for n, want in COUNTS.items():
        got = enumerate_universe(n, "all", jobs=JOBS, cache_dir=tmp_path)
        ok &= len(got) == want
    for n in range(1, 7):
        oracle = {canonical_cert(from_matrix(m)) for m in iso_classes(n)}
        got = enumerate_universe(n, "all", cache_dir=tmp_path)
        ok &= set(got) == oracle
    for n in (7, 8):
        ok &= enumerate_by_global_dedup(n, jobs=JOBS) == \
            enumerate_universe(n, "all", cache_dir=tmp_path)
    elapsed = time.monotonic() - start
    ok &= elapsed < 300
    report(1, ok, f"universe counts n=1..8 = {tuple(COUNTS.values())}, "
           f"naive oracle n<=6, two strategies n=7,8 agree "
           f"({elapsed:.0f}s < 300s, {JOBS} workers)")


def test_criterion_2_reconstruction_baseline():
    findings_up_to_8 = [f for f in run_property("recon-conjecture", 8,
                                                jobs=JOBS, cache_dir=CACHE_DIR)
                        if int(f.witnesses[0].split(":")[0]) >= 4]
    at_3 = run_property("recon-conjecture", 3, jobs=JOBS, cache_dir=CACHE_DIR)
    v_lam = [f for f in at_3 if len(f.witnesses) == 2
             and f.witnesses[0].startswith("3:")]
    ok = not findings_up_to_8 and len(v_lam) == 1
    report(2, ok, "deck groups are singletons for 4<=n<=8 and the one "
           "n=3 deck group of size 2 is found")


def test_criterion_3_theorem_1_2():
    exact = run_property("thm-1.2", 8, jobs=JOBS, cache_dir=CACHE_DIR)
    invariance = run_property("deck-invariants", 8, jobs=JOBS,
                              cache_dir=CACHE_DIR)
    ok = not exact and not invariance
    report(3, ok, "deck-only rank/ntma/extremal decks match labeled truth "
           "for all connected posets 4<=n<=8; invariance holds on deck groups")


def test_criterion_4_theorem_1_3(tmp_path):
    # honest timing: seed only the plain universes, re-derive the ps posets
    for path in CACHE_DIR.glob("universe_*.txt"):
        shutil.copy(path, tmp_path / path.name)
    start = time.monotonic()
    findings = run_property("thm-1.3", 9, jobs=JOBS, cache_dir=tmp_path)
    elapsed = time.monotonic() - start
    ok = not findings and elapsed < 1800
    report(4, ok, "every connected poset with a minmax pseudo-similar pair, "
           f"4<=n<=9, inverts to itself alone ({elapsed:.0f}s < 1800s, "
           f"{JOBS} workers)")


def test_criterion_5_kelly():
    findings = run_property("kelly", 7, jobs=JOBS, cache_dir=CACHE_DIR)
    report(5, not findings,
           "deck-recovered subposet counts are exact for 4<=|P|<=7, all Q")


def test_criterion_6_structure_suites():
    suite = ("lem-3.2", "lem-3.6.1", "lem-3.6.2", "lem-3.6.3", "lem-3.6.4",
             "lem-3.6.5", "lem-3.6.6", "lem-3.6.7", "prop-3.3", "thm-3.4",
             "lem-5.1", "lem-5.4", "lem-6.1", "lem-6.2", "lem-6.3", "lem-6.4")
    failing = []
    for pid in suite:
        max_n = 8 if pid == "prop-3.3" else 9
        if run_property(pid, max_n, jobs=JOBS, cache_dir=CACHE_DIR):
            failing.append(pid)
    fixtures_ok = bool(NONRIGID_MAXIMAL_CARD_FIXTURES) and not fixture_findings()
    # the multiple-large-components search is negative at n <= 9; a 39-element
    # witness is constructed instead (see the fixture suite)
    search_negative = search_multiple_large_components(
        9, jobs=JOBS, cache_dir=CACHE_DIR) == []
    ok = not failing and fixtures_ok and search_negative
    report(6, ok, "structure lemma suites clean over connected ps-posets "
           f"n<=9 and over all fixtures (failing: {failing or 'none'})")


def test_criterion_7_dismantlable_and_width3():
    dism = run_property("dismantlable-recognizable", 8, jobs=JOBS,
                        cache_dir=CACHE_DIR)
    width3 = run_property("cor-7.1-width3", 8, jobs=JOBS, cache_dir=CACHE_DIR)
    ok = not dism and not width3
    report(7, ok, "deck-only dismantlability matches labeled truth 4<=n<=8; "
           "width-3 minimal/maximal decks constant on deck groups")


def test_criterion_8_inverter_soundness():
    findings = run_property("inverter-soundness", 7, jobs=JOBS,
                            cache_dir=CACHE_DIR)
    report(8, not findings,
           "cert(P) appears in invert_deck(deck(P)) for all 2<=n<=7")


def test_criterion_9_determinism():
    ok = True
    for pid, max_n in (("recon-conjecture", 3), ("kelly", 6),
                       ("lem-3.6.2", 9)):
        one = report_lines(run_property(pid, max_n, jobs=1,
                                        cache_dir=CACHE_DIR))
        two = report_lines(run_property(pid, max_n, jobs=2,
                                        cache_dir=CACHE_DIR))
        ok &= one == two
    report(9, ok, "finding reports are byte-identical across worker counts")
