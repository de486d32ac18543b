import pytest
from hypothesis import given

from matopo.border import (
    border_component,
    border_components,
    border_subcomplex_direct,
    bruteforce_border_component,
    closure_in_order,
    face_in_border,
    face_in_direct_border,
    facet_subsets,
    root_face,
)
from matopo.complex import build
from matopo.formats import parse_adversary
from oracles import rooted_adversaries

# Round two, F = G1.G2: the root {g} of G2 heard only {g,w}, so F is proper,
# but g heard w, and w heard r and g, so the heard-of closure is the whole facet.
CLOSURE_ESCAPES = """\
processes: r g w
graph G1: r->w, w->g
graph G2: r->w, g->r, g->w, w->r
"""


def _mask(face, pc):
    return pc.colors(face)


@given(rooted_adversaries(ns=(2, 3)))
def test_round_one_border_component_is_on_the_border(adv):
    pc = build(adv, 1)
    for info in border_components(pc):
        closed = _mask(info.b_face, pc)
        assert info.proper == (info.carrier_colors != pc.full)
        if info.proper:
            assert face_in_border(info.b_face, pc)
            assert info.root.vertices <= info.b_face
            assert pc.collective_heard(info.b_face) & ~closed == 0


@given(rooted_adversaries(ns=(2, 3)))
def test_fixpoint_equals_brute_force(adv):
    for r in (1, 2):
        pc = build(adv, r)
        for f in range(pc.num_facets):
            info = border_component(pc, f)
            if info.proper:
                assert bruteforce_border_component(pc, f) == _mask(info.b_face, pc)
                seed = info.root.colors
                assert closure_in_order(pc, f, seed, range(pc.n)) == closure_in_order(pc, f, seed, reversed(range(pc.n)))


@given(rooted_adversaries(ns=(3,), max_graphs=2))
def test_border_predicate_matches_direct_construction(adv):
    for r in (1, 2):
        pc = build(adv, r)
        maximal = border_subcomplex_direct(pc)
        for f in range(pc.num_facets):
            for face in facet_subsets(pc, f):
                assert face_in_border(face, pc) == face_in_direct_border(face, maximal)


def test_closure_can_leave_the_border_at_round_two():
    adv = parse_adversary(CLOSURE_ESCAPES).adversary
    pc = build(adv, 2)
    f = pc.facet_by_names(["G1", "G2"])
    info = border_component(pc, f)
    assert info.proper
    assert [adv.names[pc.owner(v)] for v in info.root.vertices] == ["g"]
    assert info.b_face == frozenset(pc.vertices(f))
    assert info.carrier_colors == pc.full
    assert not face_in_border(info.b_face, pc)
    off = sorted(adv.names[pc.owner(v)] for v in info.b_face if int(pc.top.hb[v]) == pc.full)
    assert off == ["r", "w"]


def test_empty_face_rejected():
    pc = build(parse_adversary(CLOSURE_ESCAPES).adversary, 1)
    with pytest.raises(ValueError):
        face_in_border([], pc)


def test_root_face_of_chain():
    pc = build(parse_adversary("processes: a b c\ngraph C: a->b, b->c\n").adversary, 1)
    rf = root_face(pc, 0)
    assert rf.colors == 1 and len(rf.vertices) == 1
