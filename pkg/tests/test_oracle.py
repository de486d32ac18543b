import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from matopo.catalog import load_example
from matopo.digraph import Adversary, CommGraph
from matopo.oracle import (
    NotSolvableError,
    OracleCapExceeded,
    analyze,
    extract_decision_map,
    min_termination_rounds,
    simulate,
    strict_profile,
)
from oracles import ViewComplex, rooted_adversaries


@given(rooted_adversaries(ns=(2, 3)), st.integers(0, 3))
def test_strict_solvability_matches_view_oracle(adv, r):
    rep = analyze(adv, r)
    assert rep.strict_solvable == ViewComplex(adv, r).strict_solvable()
    assert rep.kernels_nested()
    if rep.strict_solvable:
        assert rep.border_solvable


@given(rooted_adversaries(ns=(2, 3)))
def test_solvability_is_monotone(adv):
    prof = strict_profile(adv, 3)
    flags = [p.strict_solvable for p in prof]
    assert flags == sorted(flags)


def test_single_graph_star_decides_in_one_round():
    adv = load_example("star:4").adversary
    assert min_termination_rounds(adv) == 1
    res = simulate(adv, extract_decision_map(adv, 1))
    assert res.passed and res.sequences == 1


def test_two_chain_min_rounds_and_simulation():
    adv = load_example("2c").adversary
    r = min_termination_rounds(adv)
    assert r == 3
    assert not analyze(adv, 2).strict_solvable
    res = simulate(adv, extract_decision_map(adv, r))
    assert res.passed and res.sequences == 27 and not res.violations


def test_no_decision_map_below_min_rounds():
    with pytest.raises(NotSolvableError):
        extract_decision_map(load_example("2c").adversary, 2)


def test_cap_exceeded_carries_last_report():
    adv = load_example("2c").adversary
    with pytest.raises(OracleCapExceeded) as exc:
        min_termination_rounds(adv, cap=2)
    assert exc.value.cap == 2 and exc.value.report.rounds == 2


def test_budget_is_reported_as_cap():
    with pytest.raises(OracleCapExceeded):
        min_termination_rounds(load_example("iis:3").adversary, cap=6)


def test_random_simulation_reproducible():
    adv = load_example("2c+").adversary
    r = min_termination_rounds(adv)
    dm = extract_decision_map(adv, r)
    a = simulate(adv, dm, "random", count=30, seed=11)
    b = simulate(adv, dm, "random", count=30, seed=11)
    assert a.passed and a.text(adv) == b.text(adv) and a.json(adv) == b.json(adv)
    doc = json.loads(a.json(adv))
    assert doc["schema"] == "ma-topo/1" and doc["kind"] == "transcript"


def test_decisions_are_valid_inputs():
    # every decided value is the input of a process the decider heard from
    adv = load_example("2c").adversary
    dm = extract_decision_map(adv, 3)
    res = simulate(adv, dm)
    assert {ln.decision for ln in res.lines} <= set(range(adv.n))


def test_identity_never_strictly_solvable():
    adv = Adversary((CommGraph.identity(3),))
    for r in range(3):
        assert not analyze(adv, r, allow_unrooted=True).strict_solvable
