import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from matopo.digraph import CommGraph
from matopo.views import ViewStore, View, evolve, initial_global_view, previous, run_sequence, top_level_graph
from oracles import graph_from_int, rooted_codes


def test_views_cannot_be_built_directly():
    with pytest.raises(TypeError):
        View()


def test_initial_views():
    st_ = ViewStore()
    gv = initial_global_view(3, store=st_)
    assert gv.round == 0 and gv.heard_of() == (1, 2, 4)
    assert gv[1].condensed("abc") == "(b,{b})"


def test_round_one_label():
    g = CommGraph.from_edges(3, [(0, 1), (1, 2)])
    gv = run_sequence(3, [g], ViewStore())
    assert [v.condensed("rgw") for v in gv] == ["(r,{r})", "(g,{r,g})", "(w,{g,w})"]
    assert gv[2].expanded("rgw") == "(w,{(g,{g}),(w,{w})})"


def test_owner_child_required():
    s = ViewStore()
    v0 = s.initial(0)
    with pytest.raises(ValueError):
        s.view(1, [(0, v0)])


@given(st.lists(st.integers(0, 63), min_size=1, max_size=4), st.lists(st.integers(0, 63), min_size=1, max_size=4))
def test_interning_is_structural(s1, s2):
    """Equal histories give the same object; different sequences that are
    indistinguishable to a process also give it the same object."""
    store = ViewStore()
    g1 = [graph_from_int(3, c) for c in s1]
    g2 = [graph_from_int(3, c) for c in s2]
    a = run_sequence(3, g1, store)
    assert all(x is y for x, y in zip(a, run_sequence(3, g1, store)))
    # a second, independent store reproduces the same structure
    other = run_sequence(3, g1, ViewStore())
    assert [v.expanded() for v in a] == [v.expanded() for v in other]
    if len(s1) == len(s2):
        b = run_sequence(3, g2, store)
        for x, y in zip(a, b):
            assert (x is y) == (x.expanded() == y.expanded())


def test_interning_order_independent():
    gs = [graph_from_int(3, c) for c in (5, 17, 40)]
    fwd, bwd = ViewStore(), ViewStore()
    seqs = list(itertools.product(gs, repeat=2))
    a = [tuple(v.expanded() for v in run_sequence(3, s, fwd)) for s in seqs]
    b = [tuple(v.expanded() for v in run_sequence(3, s, bwd)) for s in reversed(seqs)]
    assert a == b[::-1]
    assert len(fwd) == len(bwd)


def test_sequence_view_bijection():
    """Distinct graph sequences give distinct global views, and the graphs can
    be read back from the views."""
    pool = [graph_from_int(3, c) for c in rooted_codes(3)[:5]]
    store = ViewStore()
    seen = {}
    for seq in itertools.product(pool, repeat=2):
        gv = run_sequence(3, seq, store)
        key = tuple(id(v) for v in gv)
        assert key not in seen
        seen[key] = seq
        assert top_level_graph(gv) == seq[-1]
        assert top_level_graph(previous(gv)) == seq[0]


def test_evolve_size_mismatch():
    with pytest.raises(ValueError):
        evolve(initial_global_view(2), CommGraph.identity(3))
