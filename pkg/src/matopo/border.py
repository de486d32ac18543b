"""Border of P_r, root faces and border components.

A face lies on the border iff its members collectively did not hear from
every process. The border component of a proper facet is the least set of
processes containing the root and closed under heard-of.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .complex import ProtocolComplex
from .digraph import CapExceededError, NotRootedError, bits, root_masks
from .views import GlobalView, ViewStore, evolve


@dataclass(frozen=True)
class RootFace:
    facet: int
    vertices: frozenset[int]
    colors: int


@dataclass(frozen=True)
class BorderComponentInfo:
    facet: int
    proper: bool
    root: RootFace
    b_face: frozenset[int]
    carrier_colors: int


def face_in_border(face: Iterable[int], pc: ProtocolComplex) -> bool:
    face = list(face)
    if not face:
        raise ValueError("the empty face has no carrier")
    return pc.collective_heard(face) != pc.full


def _graph_roots(pc: ProtocolComplex) -> list[list[int]]:
    return [root_masks(g) for g in pc.adversary.graphs]


def root_faces(pc: ProtocolComplex, f: int) -> list[RootFace]:
    """All root faces of a facet (several only for non-rooted last graphs)."""
    g = pc.adversary.graphs[pc.last_graph(f)]
    return [RootFace(f, pc.face(f, m), m) for m in root_masks(g)]


def root_face(pc: ProtocolComplex, f: int) -> RootFace:
    faces = root_faces(pc, f)
    if len(faces) != 1:
        raise NotRootedError(f"facet {f}: last graph has {len(faces)} root components")
    return faces[0]


@dataclass(frozen=True)
class BorderArrays:
    """Per (facet, root) rows, vectorised. Rooted complexes have one row per facet."""

    facet: np.ndarray
    root: np.ndarray
    collective: np.ndarray
    closed: np.ndarray
    full: int

    @property
    def proper(self) -> np.ndarray:
        return self.collective != self.full

    @property
    def carrier(self) -> np.ndarray:
        return np.where(self.proper, self.closed, self.full)


def border_arrays(pc: ProtocolComplex, facets: np.ndarray | None = None) -> BorderArrays:
    if pc.rounds == 0:
        raise ValueError("border components need r >= 1")
    fidx = np.arange(pc.num_facets, dtype=np.int64) if facets is None else np.asarray(facets)
    groots = _graph_roots(pc)
    last = fidx % pc.k
    counts = np.array([len(groots[g]) for g in range(pc.k)])[last]
    if np.all(counts == 1):
        rows_f = fidx
        seeds = np.array([groots[g][0] for g in range(pc.k)], dtype=np.int64)[last]
    else:
        rows_f = np.repeat(fidx, counts)
        seeds = np.array([m for g in last for m in groots[g]], dtype=np.int64)
    collective, closed = _accel.closure(pc.facets, pc.top.hb, rows_f, seeds)
    return BorderArrays(rows_f, seeds, collective, closed, pc.full)


def _info(pc: ProtocolComplex, f: int, root: int, collective: int, closed: int) -> BorderComponentInfo:
    rf = RootFace(f, pc.face(f, root), root)
    if collective == pc.full:
        return BorderComponentInfo(f, False, rf, frozenset(pc.vertices(f)), pc.full)
    return BorderComponentInfo(f, True, rf, pc.face(f, closed), closed)


def border_component(pc: ProtocolComplex, f: int) -> BorderComponentInfo:
    rf = root_face(pc, f)
    arr = border_arrays(pc, np.array([f]))
    return _info(pc, f, rf.colors, int(arr.collective[0]), int(arr.closed[0]))


def border_components(pc: ProtocolComplex) -> list[BorderComponentInfo]:
    """One entry per (facet, root), in facet order."""
    arr = border_arrays(pc)
    return [
        _info(pc, int(f), int(r), int(c), int(s))
        for f, r, c, s in zip(arr.facet, arr.root, arr.collective, arr.closed)
    ]


def bdc(pc: ProtocolComplex) -> list[BorderComponentInfo]:
    return [b for b in border_components(pc) if b.proper]


def bdr(pc: ProtocolComplex) -> list[RootFace]:
    return [b.root for b in bdc(pc)]


# ---------------------------------------------------------------- reference versions


def closure_in_order(pc: ProtocolComplex, f: int, seed: int, order: Sequence[int]) -> int:
    """Heard-of closure adding one process at a time in the given order."""
    hb = [int(pc.top.hb[v]) for v in pc.facets[f]]
    order = list(order)
    s = seed
    changed = True
    while changed:
        changed = False
        for p in order:
            if s >> p & 1 and hb[p] & ~s:
                s |= hb[p]
                changed = True
    return s


def bruteforce_border_component(pc: ProtocolComplex, f: int) -> int:
    """Smallest nonempty subset S of the facet's colours with heard-of(S) inside S.

    Raises if the minimal closed sets are not unique."""
    n = pc.n
    hb = [int(pc.top.hb[v]) for v in pc.facets[f]]
    closed = []
    for s in range(1, 1 << n):
        h = 0
        for p in bits(s):
            h |= hb[p]
        if h & ~s == 0:
            closed.append(s)
    minimal = [s for s in closed if not any(t != s and t & ~s == 0 for t in closed)]
    if len(minimal) != 1:
        raise AssertionError(f"facet {f}: {len(minimal)} minimal closed faces")
    return minimal[0]


def border_subcomplex_direct(pc: ProtocolComplex, max_n: int = 3, max_rounds: int = 2) -> set[frozenset[int]]:
    """Maximal faces of P^r(boundary of the initial simplex), built directly.

    For each proper face t of the initial simplex we evolve a second initial
    simplex that agrees with it on t and carries foreign inputs elsewhere;
    interning makes the shared views exactly those of P^r(t)."""
    n, r = pc.n, pc.rounds
    if n > max_n or r > max_rounds:
        raise CapExceededError(f"direct border construction limited to n<={max_n}, r<={max_rounds}")
    store = ViewStore()
    vid = {view: v for v, view in enumerate(pc.materialize(store)[-1])}
    graphs = pc.adversary.graphs
    faces: set[frozenset[int]] = set()
    for tau in range(1, (1 << n) - 1):
        alt = [store.initial(i) if tau >> i & 1 else store.initial(i, tag="outside") for i in range(n)]
        frontier = [GlobalView(alt)]
        for _ in range(r):
            frontier = [evolve(gv, g, store) for gv in frontier for g in graphs]
        for gv in frontier:
            face = frozenset(vid[v] for v in gv if v in vid)
            if face:
                faces.add(face)
    return {f for f in faces if not any(f < h for h in faces)}


def face_in_direct_border(face: Iterable[int], maximal: set[frozenset[int]]) -> bool:
    s = frozenset(face)
    return any(s <= m for m in maximal)


def facet_subsets(pc: ProtocolComplex, f: int) -> Iterable[frozenset[int]]:
    verts = pc.vertices(f)
    for size in range(1, len(verts) + 1):
        for combo in itertools.combinations(verts, size):
            yield frozenset(combo)
