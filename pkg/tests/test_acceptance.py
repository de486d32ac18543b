"""Acceptance criteria 1-8, one check each.

Run under pytest (a summary section lists one PASS/FAIL line per criterion)
or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, os.path.dirname(__file__))

from matopo.catalog import load_example
from matopo.cli import main as cli_main
from matopo.complex import build, iis_equivalence_check, pseudosphere
from matopo.digraph import Adversary, CommGraph, NotRootedError, enumerate_iis_adversary, is_rooted, iter_all_graphs, random_rooted_adversary
from matopo.nerve import nerve_decide
from matopo.oracle import analyze, extract_decision_map, min_termination_rounds, simulate
from matopo.rrg import rrg_decide
from oracles import ViewComplex, ordered_set_partitions, pseudosphere_by_product

CORPUS_ARGS = ["--n", "2,3,4", "--graphs", "4", "--count", "200", "--seed", "2024", "--cap", "6"]


def _timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


# ------------------------------------------------------------------ 1


def check_pseudosphere():
    want = {2: (4, 4, 4), 3: (12, 48, 32)}
    n = 4
    want[4] = (n * 2 ** (n - 1), n * (n - 1) * 2 ** (2 * n - 3), (n - 1) * 2 ** (2 * (n - 1)))
    got = {n: pseudosphere(n).counts() for n in (2, 3, 4)}
    enum = {n: pseudosphere_by_product(n) for n in (2, 3, 4)}
    ok = all(got[n] == want[n] for n in want)
    detail = "; ".join(f"n={n}: got {got[n]} expected {want[n]} enumeration {enum[n]}" for n in (2, 3, 4))
    return ok, detail


# ------------------------------------------------------------------ 2


def check_iis():
    rows = []
    ok = True
    for n in (2, 3, 4):
        eq = iis_equivalence_check(n)
        facets = build(enumerate_iis_adversary(n), 1).num_facets
        parts = ordered_set_partitions(n)
        ok &= eq and facets == parts == (3, 13, 75)[n - 2]
        rows.append(f"n={n}: equivalent={eq} facets={facets} partitions={parts}")
    return ok, "; ".join(rows)


# ------------------------------------------------------------------ 3


def _owners(adv, pc, face):
    return sorted(adv.names[pc.owner(v)] for v in face)


def _view_shared(adv, rounds, s1, s2):
    """Processes whose views coincide in two sequences, from interned views."""
    vc = ViewComplex(adv, rounds)
    a = vc.facets[vc.seqs.index(tuple(adv.index(g) for g in s1))]
    b = vc.facets[vc.seqs.index(tuple(adv.index(g) for g in s2))]
    return sorted(adv.names[i] for i in range(adv.n) if a[i] is b[i])


def check_two_chain():
    adv = load_example("2c").adversary
    notes = []
    pc1 = build(adv, 1)
    s1 = _owners(adv, pc1, pc1.intersection(pc1.facet_by_names(["G1"]), pc1.facet_by_names(["G2"])))
    ok = s1 == ["r"] == _view_shared(adv, 1, ["G1"], ["G2"])
    notes.append(f"r=1 shared {s1}")
    pc2 = build(adv, 2)
    s2 = _owners(adv, pc2, pc2.intersection(pc2.facet_by_names(["G1", "G1"]), pc2.facet_by_names(["G2", "G2"])))
    ok &= "r" not in s2 and s2 == _view_shared(adv, 2, ["G1", "G1"], ["G2", "G2"])
    notes.append(f"r=2 shared {s2}")
    nv, rv = nerve_decide(adv), rrg_decide(adv)
    ok &= nv.solvable and rv.solvable and rv.level == 1
    notes.append(f"nerve={nv.solvable}/{nv.iterations} rrg={rv.solvable}/RRG_{rv.level}")
    r = min_termination_rounds(adv)
    sim = simulate(adv, extract_decision_map(adv, r), "exhaustive")
    ok &= sim.passed and sim.sequences == len(adv) ** r
    notes.append(f"min r={r} simulated {sim.sequences} sequences passed={sim.passed}")
    return ok, "; ".join(notes)


# ------------------------------------------------------------------ 4


def check_two_chain_plus():
    adv = load_example("2c+").adversary
    notes = []
    ok = True
    for r, expect_red in ((2, True), (3, False)):
        pc = build(adv, r)
        s = _owners(adv, pc, pc.intersection(pc.facet_by_names(["G1"] * r), pc.facet_by_names(["G2"] * r)))
        ok &= ("r" in s) == expect_red and s == _view_shared(adv, r, ["G1"] * r, ["G2"] * r)
        notes.append(f"r={r} shared {s}")
    return ok, "; ".join(notes)


# ------------------------------------------------------------------ 5


def _cli_code(argv):
    import contextlib
    import io

    with contextlib.redirect_stdout(io.StringIO()) as out, contextlib.redirect_stderr(io.StringIO()):
        code = cli_main(argv)
    return code, out.getvalue()


def check_triviality():
    notes = []
    ok = True
    # every non-rooted graph on 3 processes, alone and next to a rooted companion
    companion = CommGraph.from_edges(3, [(0, 1), (1, 2)])
    unrooted = [g for g in iter_all_graphs(3) if not is_rooted(g)]
    rejected = generalized = never = 0
    for g in unrooted:
        for adv in (Adversary((g,)), Adversary((g, companion))):
            try:
                nerve_decide(adv)
            except NotRootedError:
                try:
                    rrg_decide(adv)
                except NotRootedError:
                    rejected += 1
            if not nerve_decide(adv, allow_unrooted=True).solvable and not rrg_decide(adv, allow_unrooted=True).solvable:
                generalized += 1
            if not any(analyze(adv, r, allow_unrooted=True).strict_solvable for r in range(4)):
                never += 1
    total = 2 * len(unrooted)
    ok &= rejected == generalized == never == total
    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "h.txt"
        p.write_text("processes: a b c d\ngraph H: a->b, c->d\n")
        code, out = _cli_code(["decide", str(p)])
    ok &= code == 4 and "unsolvable" in out and "trivially impossible" in out
    notes.append(f"non-rooted: {rejected}/{total} rejected, {generalized}/{total} unsolvable when generalized, oracle never solvable on {never}/{total}, cli exit {code}")
    ids = []
    for n in (2, 3, 4):
        adv = Adversary((CommGraph.identity(n),))
        ids.append(not nerve_decide(adv, allow_unrooted=True).solvable and not rrg_decide(adv, allow_unrooted=True).solvable)
    code, out = _cli_code(["decide", "identity:3"])
    ok &= all(ids) and "unsolvable" in out
    notes.append(f"identity n=2..4 unsolvable by both: {all(ids)}")
    singles = [g for n in (1, 2, 3) for g in iter_all_graphs(n) if is_rooted(g)]
    singles += [random_rooted_adversary(4, 1, s).graphs[0] for s in range(30)]
    good = 0
    for g in singles:
        adv = Adversary((g,))
        if nerve_decide(adv).solvable and rrg_decide(adv).solvable and min_termination_rounds(adv) <= max(g.n - 1, 0):
            good += 1
    ok &= good == len(singles)
    notes.append(f"single rooted graphs solvable: {good}/{len(singles)}")
    return ok, "; ".join(notes)


# ------------------------------------------------------------------ 6, 7


@functools.lru_cache(maxsize=1)
def corpus_run():
    with tempfile.TemporaryDirectory() as d:
        out = Path(d) / "report.json"
        t0 = time.perf_counter()
        code, text = _cli_code(["verify", *CORPUS_ARGS, "--out", str(out)])
        elapsed = time.perf_counter() - t0
        return code, text, json.loads(out.read_text()), elapsed


def check_corpus():
    code, _, doc, elapsed = corpus_run()
    cases = doc["cases"]
    viol = [v for c in cases for v in c["violations"]]
    a = all(c["nerve_solvable"] == c["rrg_solvable"] for c in cases)
    solv = [c for c in cases if c["nerve_solvable"]]
    b = all(c["min_rounds"] is not None and c["min_rounds"] <= 6 and c["simulated_sequences"] > 0 for c in solv)
    b &= not any(v.startswith("simulation failed") for v in viol)
    c_ = all(c["min_rounds"] is None for c in cases if not c["nerve_solvable"])
    d = not viol
    e = sum(1 for c in cases if c["n"] == 3)
    ok = code == 0 and a and b and c_ and d and e > 0 and len(cases) == 200 and elapsed < 600
    detail = (
        f"{len(cases)} adversaries ({len(solv)} solvable) in {elapsed:.1f}s; (a) {a} (b) {b} (c) {c_} "
        f"(d) violations={len(viol)} (e) direct border compared on {e} n=3 cases"
    )
    return ok, detail


def check_gap():
    code, text, doc, _ = corpus_run()
    s = doc["summary"]
    gaps = [ln for ln in text.splitlines() if ln.startswith("gap:")]
    ok = s["gap_cases"] >= 1 and bool(gaps) and s["rrg_bound_holds"] and "rrg_bound_holds: True" in text
    return ok, f"gap cases {s['gap_cases']} (max gap {s['max_gap']}), rrg bound m*(n-1) >= min rounds on all {s['solvable']} solvable"


# ------------------------------------------------------------------ 8


def _commands(d: Path, tag: str):
    return [
        ["decide", "2c", "--method", "nerve", "--json", "--trace", str(d / f"tn{tag}")],
        ["decide", "2c+", "--method", "rrg", "--trace", str(d / f"tr{tag}")],
        ["decide", "2c", "--method", "oracle", "--json"],
        ["complex", "2c", "--rounds", "3", "--dot", str(d / f"c{tag}.dot"), "--json", str(d / f"c{tag}.json")],
        ["complex", "full:3", "--rounds", "1", "--dot", str(d / f"f{tag}.dot"), "--json", str(d / f"f{tag}.json")],
        ["simulate", "2c+", "--random", "25", "--seed", "7", "--format", "json", "--transcript", str(d / f"s{tag}.json")],
        ["simulate", "2c", "--exhaustive"],
        ["verify", "--n", "2,3", "--graphs", "3", "--count", "25", "--seed", "5", "--out", str(d / f"v{tag}.json")],
        ["show", "2c+"],
        ["examples"],
    ]


def _snapshot(d: Path, tag: str, hashseed: str):
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    outs = []
    for argv in _commands(d, tag):
        p = subprocess.run([sys.executable, "-m", "matopo", *argv], capture_output=True, env=env)
        outs.append((p.returncode, p.stdout.replace(tag.encode(), b"#")))
    files = {}
    for f in sorted(d.rglob(f"*")):
        if f.is_file() and tag in str(f.relative_to(d)):
            files[str(f.relative_to(d)).replace(tag, "#")] = f.read_bytes()
    return outs, files


def check_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        d = Path(tmp)
        o1, f1 = _snapshot(d, "AAA", "1")
        o2, f2 = _snapshot(d, "BBB", "4242")
    same_out = o1 == o2
    same_files = f1 == f2 and len(f1) > 0
    dots = sum(1 for k in f1 if k.endswith(".dot"))
    ok = same_out and same_files and all(code in (0, 2) for code, _ in o1)
    return ok, f"{len(o1)} commands, stdout identical={same_out}; {len(f1)} files ({dots} DOT) identical={same_files}"


# ------------------------------------------------------------------ pytest glue

CHECKS = {
    1: (check_pseudosphere, 5),
    2: (check_iis, 30),
    3: (check_two_chain, 10),
    4: (check_two_chain_plus, 60),
    5: (check_triviality, None),
    6: (check_corpus, 600),
    7: (check_gap, None),
    8: (check_determinism, None),
}


def _run(number, record):
    fn, limit = CHECKS[number]
    ok, detail, elapsed = _timed(fn)
    if limit is not None and elapsed >= limit:
        ok, detail = False, f"{detail}; runtime {elapsed:.1f}s over the {limit}s limit"
    record(number, ok, detail)
    assert ok, detail


def test_criterion_1_pseudosphere_counts(record_criterion):
    _run(1, record_criterion)


def test_criterion_2_iis_equivalence(record_criterion):
    _run(2, record_criterion)


def test_criterion_3_two_chain(record_criterion):
    _run(3, record_criterion)


def test_criterion_4_two_chain_plus(record_criterion):
    _run(4, record_criterion)


def test_criterion_5_triviality(record_criterion):
    _run(5, record_criterion)


def test_criterion_6_cross_validation_corpus(record_criterion):
    _run(6, record_criterion)


def test_criterion_7_gap_and_bound(record_criterion):
    _run(7, record_criterion)


def test_criterion_8_determinism(record_criterion):
    _run(8, record_criterion)


if __name__ == "__main__":
    failed = 0
    for k in sorted(CHECKS):

        def record(number, ok, detail):
            print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)

        try:
            _run(k, record)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
