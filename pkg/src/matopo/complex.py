"""Uninterpreted protocol complexes, pseudospheres and chromatic subdivisions.

The r-round complex is stored level by level. Level t holds every distinct
round-t vertex as a row ``(owner, child_0, ..., child_{n-1})`` where
``child_j`` is the round-(t-1) vertex id of process j if the owner heard j,
and -1 otherwise. Hash-consing is therefore a ``np.unique`` over rows.
Facet ``f`` of P_r corresponds to the sequence whose base-|D| digits are
``f`` (first round most significant), so the carrier of ``f`` is ``f // |D|``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .digraph import Adversary, CapExceededError, bits, full_mask
from .views import View, ViewStore

DEFAULT_BUDGET = 200_000


def facet_budget() -> int:
    env = os.environ.get("MATOPO_FACET_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class BudgetExceededError(CapExceededError):
    pass


@dataclass(frozen=True)
class Level:
    owner: np.ndarray  # (V,)
    kids: np.ndarray  # (V, n), -1 where not heard
    hb: np.ndarray  # (V,) heard-of closure as bitmask


def _initial_level(n: int) -> Level:
    return Level(
        owner=np.arange(n, dtype=np.int64),
        kids=np.full((n, n), -1, dtype=np.int64),
        hb=(np.int64(1) << np.arange(n, dtype=np.int64)),
    )


def _hear_table(adv: Adversary) -> np.ndarray:
    n = adv.n
    tab = np.zeros((len(adv), n, n), dtype=bool)
    for g_idx, g in enumerate(adv.graphs):
        for i, m in enumerate(g.inmasks):
            for j in bits(m):
                tab[g_idx, i, j] = True
    return tab


def _next_level(prev: Level, facets: np.ndarray, hear: np.ndarray) -> tuple[Level, np.ndarray]:
    nf, n = facets.shape
    k = hear.shape[0]
    kids = np.where(hear[None, :, :, :], facets[:, None, None, :], -1)  # (nf, k, n, n)
    owner = np.broadcast_to(np.arange(n, dtype=np.int64)[None, None, :, None], (nf, k, n, 1))
    rows = np.concatenate([owner, kids], axis=3).reshape(nf * k * n, n + 1)
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    ukids = uniq[:, 1:]
    hb = np.bitwise_or.reduce(np.where(ukids >= 0, prev.hb[np.maximum(ukids, 0)], 0), axis=1)
    level = Level(owner=uniq[:, 0].copy(), kids=np.ascontiguousarray(ukids), hb=hb.astype(np.int64))
    return level, inv.reshape(nf * k, n).astype(np.int64)


class ProtocolComplex:
    """The complex P_r of an adversary. Immutable after construction."""

    def __init__(self, adversary: Adversary, rounds: int, levels: list[Level], facets: np.ndarray):
        self.adversary = adversary
        self.rounds = rounds
        self.levels = levels
        self.facets = facets
        self.facets.setflags(write=False)

    @property
    def n(self) -> int:
        return self.adversary.n

    @property
    def k(self) -> int:
        return len(self.adversary)

    @property
    def top(self) -> Level:
        return self.levels[-1]

    @property
    def heard_of(self) -> np.ndarray:
        return self.top.hb

    @property
    def num_facets(self) -> int:
        return self.facets.shape[0]

    @property
    def num_vertices(self) -> int:
        return self.top.owner.shape[0]

    @property
    def full(self) -> int:
        return full_mask(self.n)

    def __repr__(self) -> str:
        return f"ProtocolComplex(n={self.n}, |D|={self.k}, r={self.rounds}, facets={self.num_facets})"

    # ------------------------------------------------------------ facets
    def sequence(self, f: int) -> tuple[int, ...]:
        seq = []
        for _ in range(self.rounds):
            f, d = divmod(f, self.k)
            seq.append(d)
        return tuple(reversed(seq))

    def facet_index(self, seq: Sequence[int]) -> int:
        if len(seq) != self.rounds:
            raise ValueError(f"sequence of length {len(seq)} for a {self.rounds}-round complex")
        f = 0
        for d in seq:
            if not 0 <= d < self.k:
                raise ValueError(f"graph index {d} out of range")
            f = f * self.k + d
        return f

    def facet_by_names(self, names: Iterable[str]) -> int:
        return self.facet_index([self.adversary.index(nm) for nm in names])

    def last_graph(self, f: int) -> int:
        if self.rounds == 0:
            raise ValueError("P_0 facets have no last graph")
        return f % self.k

    def carrier(self, f: int) -> int:
        if self.rounds == 0:
            raise ValueError("P_0 facets have no carrier")
        return f // self.k

    def vertices(self, f: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.facets[f])

    def intersection(self, f1: int, f2: int) -> frozenset[int]:
        return frozenset(self.vertices(f1)) & frozenset(self.vertices(f2))

    def shared_mask(self, f1: int, f2: int) -> int:
        """Colours of the common face (vertices are coloured, so compare by position)."""
        eq = self.facets[f1] == self.facets[f2]
        return int(sum(1 << i for i in np.flatnonzero(eq)))

    def face(self, f: int, mask: int) -> frozenset[int]:
        return frozenset(int(self.facets[f, i]) for i in bits(mask))

    def owner(self, v: int) -> int:
        return int(self.top.owner[v])

    def colors(self, face: Iterable[int]) -> int:
        m = 0
        for v in face:
            m |= 1 << int(self.top.owner[v])
        return m

    def collective_heard(self, face: Iterable[int]) -> int:
        m = 0
        for v in face:
            m |= int(self.top.hb[v])
        return m

    # ------------------------------------------------------------ structure
    @cached_property
    def components(self) -> np.ndarray:
        return _accel.facet_components(self.facets, self.num_vertices)

    @property
    def num_components(self) -> int:
        return int(self.components.max()) + 1 if self.num_facets else 0

    def component_facets(self) -> list[np.ndarray]:
        lab = self.components
        order = np.argsort(lab, kind="stable")
        cuts = np.flatnonzero(np.diff(lab[order])) + 1
        return np.split(order, cuts)

    @cached_property
    def edge_array(self) -> np.ndarray:
        n = self.n
        if n < 2:
            return np.zeros((0, 2), dtype=np.int64)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        a = np.concatenate([self.facets[:, [i, j]] for i, j in pairs])
        return np.unique(a, axis=0)

    def counts(self) -> tuple[int, int, int]:
        """(vertices, edges, facets)."""
        return self.num_vertices, int(self.edge_array.shape[0]), self.num_facets

    def facet_adjacency(self) -> list[tuple[int, int]]:
        """Pairs of distinct facets with a common vertex (quadratic; small complexes)."""
        out = set()
        holders: dict[int, list[int]] = {}
        for f in range(self.num_facets):
            for v in self.facets[f]:
                holders.setdefault(int(v), []).append(f)
        for fs in holders.values():
            for a, b in itertools.combinations(fs, 2):
                out.add((a, b))
        return sorted(out)

    # ------------------------------------------------------------ views
    def materialize(self, store: ViewStore | None = None) -> list[list[View]]:
        """Interned View objects for every vertex of every level."""
        st = ViewStore() if store is None else store
        out: list[list[View]] = []
        for t, L in enumerate(self.levels):
            if t == 0:
                out.append([st.initial(int(o)) for o in L.owner])
                continue
            below = out[-1]
            out.append(
                [
                    st.view(int(o), [(j, below[c]) for j, c in enumerate(row) if c >= 0])
                    for o, row in zip(L.owner.tolist(), L.kids.tolist())
                ]
            )
        return out

    @cached_property
    def _views(self) -> list[View]:
        return self.materialize()[-1]

    def view(self, v: int, store: ViewStore | None = None) -> View:
        if store is None:
            return self._views[v]
        return self.materialize(store)[-1][v]

    def vertex_label(self, v: int) -> str:
        return self.view(v).condensed(self.adversary.names)

    def canonical_vertex(self, v: int) -> tuple[int, int]:
        # a round-1 view is determined by the colours it heard
        if self.rounds != 1:
            raise ValueError("canonical labels are defined for one-round complexes")
        return int(self.top.owner[v]), int(self.top.hb[v])


def build(
    adv: Adversary, rounds: int, budget: int | None = None, allow_unrooted: bool = False
) -> ProtocolComplex:
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    if not allow_unrooted:
        adv.require_rooted()
    limit = facet_budget() if budget is None else budget
    if len(adv) ** rounds > limit:
        raise BudgetExceededError(
            f"|D|^r = {len(adv)}^{rounds} = {len(adv) ** rounds} exceeds facet budget {limit}"
        )
    n = adv.n
    hear = _hear_table(adv)
    levels = [_initial_level(n)]
    facets = np.arange(n, dtype=np.int64)[None, :]
    for _ in range(rounds):
        lvl, facets = _next_level(levels[-1], facets, hear)
        levels.append(lvl)
    # distinct sequences must give distinct global views
    if rounds and np.unique(facets, axis=0).shape[0] != facets.shape[0]:
        raise AssertionError("two graph sequences produced the same facet")
    return ProtocolComplex(adv, rounds, levels, np.ascontiguousarray(facets))


def intersection(pc: ProtocolComplex, f1: int, f2: int) -> frozenset[int]:
    return pc.intersection(f1, f2)


def connected_components(pc: ProtocolComplex) -> np.ndarray:
    return pc.components


def pseudosphere(n: int, cap: int = 4) -> ProtocolComplex:
    from .digraph import enumerate_all_graphs

    return build(enumerate_all_graphs(n, cap), 1, allow_unrooted=True)


def boundary_consistency_violations(
    pc: ProtocolComplex, pairs: Iterable[tuple[int, int]] | None = None
) -> list[tuple[int, int]]:
    """Carrier pairs (s, t) of P_{r-1} where V(P(s)) & V(P(t)) differs from the
    vertices of P(s) whose children all lie in s & t."""
    if pc.rounds == 0:
        return []
    k = pc.k
    nprev = pc.facets.shape[0] // k
    prev_facets = _carrier_facets(pc)
    blocks = [set(pc.facets[c * k:(c + 1) * k].ravel().tolist()) for c in range(nprev)]
    if pairs is None:
        pairs = itertools.combinations(range(nprev), 2)
    bad = []
    kids = pc.top.kids
    for s, t in pairs:
        common = set(prev_facets[s].tolist()) & set(prev_facets[t].tolist())
        lhs = blocks[s] & blocks[t]
        rhs = {v for v in blocks[s] if all(c in common for c in kids[v] if c >= 0)}
        rhs_t = {v for v in blocks[t] if all(c in common for c in kids[v] if c >= 0)}
        if lhs != rhs or lhs != rhs_t:
            bad.append((s, t))
    return bad


def _carrier_facets(pc: ProtocolComplex) -> np.ndarray:
    """Vertex rows of P_{r-1}, recovered from the self-children of P_r facets."""
    k, n = pc.k, pc.n
    firsts = pc.facets[::k]  # the facet s*k + 0 for every carrier s
    return pc.top.kids[firsts, np.arange(n)[None, :]]


def carrier_facets(pc: ProtocolComplex) -> np.ndarray:
    return _carrier_facets(pc)


# ---------------------------------------------------------------- chromatic subdivision


@dataclass(frozen=True)
class ChromaticComplex:
    n: int
    vertices: frozenset[tuple[int, int]]  # (process, face mask)
    facets: frozenset[tuple[tuple[int, int], ...]]

    def counts(self) -> tuple[int, int, int]:
        edges = set()
        for f in self.facets:
            edges.update(itertools.combinations(f, 2))
        return len(self.vertices), len(edges), len(self.facets)


def chromatic_subdivision(n: int, cap: int = 4) -> ChromaticComplex:
    """Direct construction: vertices (p, s) with p in s; a facet assigns each
    process a face so that the faces form a chain and p_i in s_j implies s_i <= s_j."""
    if n < 1 or n > cap:
        raise CapExceededError(f"n={n} outside 1..{cap}")
    choices = [[m for m in range(1, 1 << n) if m >> i & 1] for i in range(n)]
    verts = frozenset((i, m) for i in range(n) for m in choices[i])
    facets = set()
    for sig in itertools.product(*choices):
        chain = sorted(sig, key=lambda m: bin(m).count("1"))
        if any(a & ~b for a, b in zip(chain, chain[1:])):
            continue
        if any(sig[i] & ~sig[j] for i in range(n) for j in range(n) if sig[j] >> i & 1):
            continue
        facets.add(tuple((i, sig[i]) for i in range(n)))
    return ChromaticComplex(n, verts, frozenset(facets))


def canonical_one_round(pc: ProtocolComplex) -> ChromaticComplex:
    verts = frozenset(pc.canonical_vertex(v) for v in range(pc.num_vertices))
    facets = frozenset(
        tuple(pc.canonical_vertex(int(v)) for v in pc.facets[f]) for f in range(pc.num_facets)
    )
    return ChromaticComplex(pc.n, verts, facets)


def iis_equivalence_check(n: int, cap: int = 4) -> bool:
    from .digraph import enumerate_iis_adversary

    pc = build(enumerate_iis_adversary(n, cap), 1)
    a = canonical_one_round(pc)
    b = chromatic_subdivision(n, cap)
    return a.vertices == b.vertices and a.facets == b.facets


# ---------------------------------------------------------------- DOT export


def _arrow(pc: ProtocolComplex, u: int, v: int) -> str:
    a, b = pc.owner(u), pc.owner(v)
    if pc.rounds == 0:
        return "none"
    kids = pc.top.kids
    b_hears_a = kids[v, a] >= 0
    a_hears_b = kids[u, b] >= 0
    if a_hears_b and b_hears_a:
        return "both"
    if b_hears_a:
        return "forward"
    if a_hears_b:
        return "back"
    return "none"


def export_dot(pc: ProtocolComplex, annotate: bool = True, name: str = "P") -> str:
    """One node per vertex, one edge per 1-face with information-flow arrows.

    With ``annotate``, border vertices get a double outline and vertices in the
    border component of some proper facet are filled."""
    names = pc.adversary.names
    full = pc.full
    in_b: set[int] = set()
    if annotate and pc.rounds >= 1 and pc.adversary.is_rooted():
        from .border import border_components

        for info in border_components(pc):
            if info.proper:
                in_b.update(info.b_face)
    lines = [f"graph {name} {{", '  node [shape=circle, fontsize=10];']
    lines.append(f'  label="n={pc.n} |D|={pc.k} r={pc.rounds} facets={pc.num_facets}";')
    for v in range(pc.num_vertices):
        attrs = [f'label="{pc.vertex_label(v)}"']
        if annotate and int(pc.top.hb[v]) != full:
            attrs.append("peripheries=2")
        if v in in_b:
            attrs.append('style=filled, fillcolor="lightgrey"')
        lines.append(f"  v{v} [{', '.join(attrs)}];")
    for u, v in pc.edge_array.tolist():
        if pc.owner(u) > pc.owner(v):
            u, v = v, u
        lines.append(f"  v{u} -- v{v} [dir={_arrow(pc, u, v)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
