"""Root-reachability graphs.

RRG_0 has one node per border root face of P_1, joined when the faces lie in
the same component of P_1. RRG_1 substitutes a copy of RRG_0 for every
one-round facet F ("instance" nodes (F, R)) and adds one shared node per
class of instances that can hand the root face R from one copy to another.
Later graphs only remove edges: a shared node labelled R keeps its edges
while its component still contains an instance whose own root face is R.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import _accel
from .complex import ProtocolComplex, build
from .digraph import Adversary, root_masks


@dataclass(frozen=True)
class RrgNode:
    kind: str  # "root" (RRG_0), "instance" or "shared"
    label: int  # index of the root face
    instance: int = -1
    members: tuple[int, ...] = ()
    fat: bool = False
    colors: int = 0

    def key(self) -> tuple:
        return (self.kind, self.label, self.instance, self.members)


@dataclass(frozen=True)
class Rrg:
    adversary: Adversary
    level: int
    faces: tuple[frozenset[int], ...]
    face_colors: tuple[int, ...]
    face_carriers: tuple[frozenset[int], ...]  # one-round facets having this root face
    nodes: tuple[RrgNode, ...]
    edges: frozenset[tuple[int, int]]

    @property
    def n(self) -> int:
        return self.adversary.n

    def components(self) -> list[int]:
        parent = list(range(len(self.nodes)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in sorted(self.edges):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return [find(x) for x in range(len(self.nodes))]

    def kernels(self) -> dict[int, int]:
        full = (1 << self.n) - 1
        comp = self.components()
        ker: dict[int, int] = {}
        for i, nd in enumerate(self.nodes):
            k = ker.get(comp[i], full)
            if nd.fat:
                k &= nd.colors
            ker[comp[i]] = k
        return ker

    def compatible(self) -> bool:
        return all(self.kernels().values())


@dataclass(frozen=True)
class _OneRound:
    pc: ProtocolComplex
    faces: tuple[frozenset[int], ...]
    colors: tuple[int, ...]
    carriers: tuple[frozenset[int], ...]
    face_comp: tuple[int, ...]
    facet_faces: tuple[tuple[tuple[int, int], ...], ...]  # per facet: (face index, root mask)


def _one_round(adv: Adversary, allow_unrooted: bool) -> _OneRound:
    if not allow_unrooted:
        adv.require_rooted()
    pc = build(adv, 1, allow_unrooted=allow_unrooted)
    full = pc.full
    found: dict[frozenset[int], int] = {}
    raw: list[tuple[frozenset[int], int]] = []
    per_facet_raw = []
    for f in range(len(adv)):
        entries = []
        for m in root_masks(adv.graphs[f]):
            if m == full:
                continue
            face = pc.face(f, m)
            if face not in found:
                found[face] = len(raw)
                raw.append((face, m))
            entries.append((found[face], m))
        per_facet_raw.append(entries)
    order = sorted(range(len(raw)), key=lambda i: (raw[i][1], sorted(raw[i][0])))
    renum = {old: new for new, old in enumerate(order)}
    faces = tuple(raw[i][0] for i in order)
    colors = tuple(raw[i][1] for i in order)
    facet_faces = tuple(tuple((renum[i], m) for i, m in entries) for entries in per_facet_raw)
    carriers = tuple(
        frozenset(f for f, entries in enumerate(facet_faces) if any(i == R for i, _ in entries))
        for R in range(len(faces))
    )
    comp = pc.components
    face_comp = tuple(int(comp[min(carriers[R])]) for R in range(len(faces)))
    return _OneRound(pc, faces, colors, carriers, face_comp, facet_faces)


def build_rrg0(adv: Adversary, allow_unrooted: bool = False) -> Rrg:
    one = _one_round(adv, allow_unrooted)
    nodes = tuple(RrgNode("root", R, fat=True, colors=c) for R, c in enumerate(one.colors))
    edges = frozenset(
        (a, b)
        for a in range(len(nodes))
        for b in range(a + 1, len(nodes))
        if one.face_comp[a] == one.face_comp[b]
    )
    return Rrg(adv, 0, one.faces, one.colors, one.carriers, nodes, edges)


def build_rrg1(adv: Adversary, allow_unrooted: bool = False) -> Rrg:
    one = _one_round(adv, allow_unrooted)
    k, n = len(adv), adv.n
    full = (1 << n) - 1
    nfaces = len(one.faces)
    pc2 = build(adv, 2, allow_unrooted=allow_unrooted)
    # border component of every two-round facet F.M, one row per proper root of M
    rows_f, rows_seed, rows_key = [], [], []
    for F in range(k):
        for M in range(k):
            for R, m in one.facet_faces[M]:
                rows_f.append(F * k + M)
                rows_seed.append(m)
                rows_key.append((F, R))
    collective, closed = _accel.closure(
        pc2.facets, pc2.top.hb, np.array(rows_f, dtype=np.int64), np.array(rows_seed, dtype=np.int64)
    )
    fat: dict[tuple[int, int], bool] = {}
    color: dict[tuple[int, int], int] = {}
    for key, c, s in zip(rows_key, collective.tolist(), closed.tolist()):
        proper = c != full
        # the collective heard-of set of a root does not depend on which facet carries it
        if key in fat and fat[key] != proper:
            raise AssertionError(f"inconsistent round-2 properness for {key}")
        fat[key] = proper
        color[key] = color.get(key, full) & (s if proper else full)

    nodes: list[RrgNode] = []
    index: dict[tuple[int, int], int] = {}
    for F in range(k):
        for R in range(nfaces):
            index[(F, R)] = len(nodes)
            is_fat = fat[(F, R)]
            nodes.append(RrgNode("instance", R, F, (), is_fat, color[(F, R)] if is_fat else full))
    edges: set[tuple[int, int]] = set()
    for F in range(k):
        for R in range(nfaces):
            for R2 in range(R + 1, nfaces):
                if one.face_comp[R] == one.face_comp[R2]:
                    edges.add((index[(F, R)], index[(F, R2)]))
    pc1 = one.pc
    for R in range(nfaces):
        parent = list(range(k))

        def find(x: int) -> int:
            while parent[x] != x:
                x = parent[x]
            return x

        for a in range(k):
            for b in range(a + 1, k):
                if one.colors[R] & ~pc1.shared_mask(a, b) == 0:
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
        classes: dict[int, list[int]] = {}
        for a in range(k):
            classes.setdefault(find(a), []).append(a)
        for members in sorted(classes.values()):
            if len(members) < 2:
                continue
            s = len(nodes)
            nodes.append(RrgNode("shared", R, -1, tuple(members), False, full))
            for F in members:
                edges.add((index[(F, R)], s))
    return Rrg(adv, 1, one.faces, one.colors, one.carriers, tuple(nodes), frozenset(edges))


def rrg_iterate(g: Rrg) -> Rrg:
    comp = g.components()
    instances_in: dict[int, set[int]] = {}
    for i, nd in enumerate(g.nodes):
        if nd.kind == "instance":
            instances_in.setdefault(comp[i], set()).add(nd.instance)
    dead = set()
    for i, nd in enumerate(g.nodes):
        if nd.kind != "shared":
            continue
        if not (instances_in.get(comp[i], set()) & g.face_carriers[nd.label]):
            dead.add(i)
    edges = frozenset(e for e in g.edges if e[0] not in dead and e[1] not in dead)
    return replace(g, level=g.level + 1, edges=edges)


@dataclass
class RrgVerdict:
    solvable: bool
    level: int  # index i of the deciding RRG_i
    iterations: int  # graphs built, RRG_0 .. RRG_i
    k_round_bound: int | None
    final: Rrg
    trace: list[Rrg] = field(default_factory=list)


def rrg_decide(adv: Adversary, max_iterations: int = 64, allow_unrooted: bool = False) -> RrgVerdict:
    n = adv.n
    trace = [build_rrg0(adv, allow_unrooted)]
    g = build_rrg1(adv, allow_unrooted)
    trace.append(g)
    while True:
        if g.compatible():
            m = g.level + 1
            return RrgVerdict(True, g.level, m, m * (n - 1), g, trace)
        nxt = rrg_iterate(g)
        if nxt.edges == g.edges:
            return RrgVerdict(False, g.level, g.level + 1, None, g, trace)
        if nxt.level > max_iterations:
            raise RuntimeError(f"root reachability graph still changing after {max_iterations} iterations")
        g = nxt
        trace.append(g)


def rrg_recursive(adv: Adversary, cap: int = 5, budget: int | None = None) -> tuple[bool | None, int]:
    """Unfold the construction literally on P_{i+1} for i = 1..cap.

    Nodes are (facet, root) pairs of P_{i+1} whose last graph has a proper
    root. Two nodes merge if their root faces are the same vertex set, or if
    their facets have the same carrier and last graphs in the same component
    of P_1. Returns (True, i) at the first compatible level, else (None, cap)."""
    one = _one_round(adv, False)
    k, n = len(adv), adv.n
    full = (1 << n) - 1
    comp1 = one.pc.components
    for level in range(1, cap + 1):
        pc = build(adv, level + 1, budget)
        rows_f, rows_seed = [], []
        for f in range(pc.num_facets):
            for _, m in one.facet_faces[f % k]:
                rows_f.append(f)
                rows_seed.append(m)
        if not rows_f:
            return True, level
        fidx = np.array(rows_f, dtype=np.int64)
        seeds = np.array(rows_seed, dtype=np.int64)
        collective, closed = _accel.closure(pc.facets, pc.top.hb, fidx, seeds)
        parent = list(range(len(rows_f)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: int, b: int) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        by_face: dict[frozenset[int], int] = {}
        by_context: dict[tuple[int, int], int] = {}
        for t, (f, m) in enumerate(zip(rows_f, rows_seed)):
            face = pc.face(f, m)
            if face in by_face:
                union(by_face[face], t)
            else:
                by_face[face] = t
            ctx = (f // k, int(comp1[f % k]))
            if ctx in by_context:
                union(by_context[ctx], t)
            else:
                by_context[ctx] = t
        ker: dict[int, int] = {}
        for t in range(len(rows_f)):
            r = find(t)
            c = int(collective[t])
            ker[r] = ker.get(r, full) & (int(closed[t]) if c != full else full)
        if all(ker.values()):
            return True, level
    return None, cap


def rrg_to_dot(g: Rrg) -> str:
    adv = g.adversary
    colset = adv.color_set
    lines = [f"graph RRG{g.level} {{", "  node [fontsize=10];"]
    for i, nd in enumerate(g.nodes):
        face = colset(g.face_colors[nd.label])
        if nd.kind == "shared":
            members = ",".join(adv.graph_names[m] for m in nd.members)
            lines.append(f'  n{i} [shape=ellipse, style=dashed, label="{face}\\n[{members}]"];')
            continue
        where = "" if nd.kind == "root" else f"{adv.graph_names[nd.instance]}:"
        style = "penwidth=3" if nd.fat else "penwidth=1"
        extra = f"\\nB={colset(nd.colors)}" if nd.fat else ""
        lines.append(f'  n{i} [shape=box, {style}, label="{where}{face}{extra}"];')
    for a, b in sorted(g.edges):
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
