"""Reference implementations that share no code with the library's fast paths.

Everything here works on plain Python sets and dicts, or on the interned
view objects, never on the level tables.
"""

from __future__ import annotations

import itertools

import numpy as np
from hypothesis import strategies as st

from matopo.digraph import Adversary, CommGraph, is_rooted
from matopo.views import ViewStore, run_sequence


def reach_matrix(g: CommGraph) -> np.ndarray:
    """Reflexive-transitive closure by repeated boolean squaring."""
    a = np.array(g.adjacency, dtype=bool) | np.eye(g.n, dtype=bool)
    while True:
        b = a | ((a.astype(int) @ a.astype(int)) > 0)
        if (b == a).all():
            return a
        a = b


def naive_sccs(g: CommGraph) -> set[frozenset[int]]:
    r = reach_matrix(g)
    return {frozenset(j for j in range(g.n) if r[i, j] and r[j, i]) for i in range(g.n)}


def naive_roots(g: CommGraph) -> set[frozenset[int]]:
    """SCCs whose members are reached by nobody outside them."""
    r = reach_matrix(g)
    return {c for c in naive_sccs(g) if all(not r[j, i] for i in c for j in range(g.n) if j not in c)}


def graph_from_int(n: int, code: int) -> CommGraph:
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    return CommGraph.from_edges(n, [p for i, p in enumerate(pairs) if code >> i & 1])


def rooted_codes(n: int) -> list[int]:
    return [c for c in range(1 << (n * (n - 1))) if is_rooted(graph_from_int(n, c))]


@st.composite
def graphs(draw, n=st.integers(1, 4)):
    n = draw(n) if not isinstance(n, int) else n
    return graph_from_int(n, draw(st.integers(0, (1 << (n * (n - 1))) - 1)))


@st.composite
def rooted_adversaries(draw, ns=(2, 3), max_graphs=3):
    n = draw(st.sampled_from(ns))
    pool = rooted_codes(n)
    codes = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=max_graphs, unique=True))
    return Adversary(tuple(graph_from_int(n, c) for c in codes))


class ViewComplex:
    """P_r built from interned views: facets are tuples of View objects."""

    def __init__(self, adv: Adversary, rounds: int):
        self.adv = adv
        self.store = ViewStore()
        self.seqs = list(itertools.product(range(len(adv)), repeat=rounds))
        self.facets = [tuple(run_sequence(adv.n, [adv.graphs[i] for i in s], self.store)) for s in self.seqs]

    def vertices(self) -> set:
        return {v for f in self.facets for v in f}

    def edges(self) -> set:
        return {frozenset((a, b)) for f in self.facets for a, b in itertools.combinations(f, 2)}

    def components(self) -> list[int]:
        label: dict[int, int] = {}
        parent = list(range(len(self.facets)))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        owner: dict[int, int] = {}
        for i, f in enumerate(self.facets):
            for v in f:
                j = owner.setdefault(id(v), i)
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        roots = [find(i) for i in range(len(self.facets))]
        for r in roots:
            label.setdefault(r, len(label))
        return [label[r] for r in roots]

    def strict_solvable(self) -> bool:
        comp = self.components()
        full = (1 << self.adv.n) - 1
        ker: dict[int, int] = {}
        for c, f in zip(comp, self.facets):
            for v in f:
                ker[c] = ker.get(c, full) & v.heard_of
        return all(ker.values())


def ordered_set_partitions(n: int) -> int:
    """Count maps from n items onto {0..m-1} that hit every value (ordered partitions)."""
    total = 0
    for ranks in itertools.product(range(n), repeat=n):
        m = max(ranks) + 1
        if set(ranks) == set(range(m)):
            total += 1
    return total


def pseudosphere_by_product(n: int) -> tuple[int, int, int]:
    """Vertices are (p, S) with p in S; a facet picks one heard-of set per process."""
    choices = [
        [frozenset(s) | {p} for k in range(n) for s in itertools.combinations([q for q in range(n) if q != p], k)]
        for p in range(n)
    ]
    facets = {tuple((p, s) for p, s in enumerate(pick)) for pick in itertools.product(*choices)}
    verts = {v for f in facets for v in f}
    edges = {frozenset(e) for f in facets for e in itertools.combinations(f, 2)}
    return len(verts), len(edges), len(facets)
