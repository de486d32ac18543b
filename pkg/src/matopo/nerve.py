"""Nerve-graph decision procedure over the facets of P_1.

Nodes are the one-round facets (one per graph). Two facets are joined when
they share a vertex; the edge carries the root faces whose colours fit inside
the shared face. Each iteration keeps a label only if its root face belongs
to some node of the edge's current component.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .complex import ProtocolComplex, build
from .digraph import Adversary, bits, root_masks


@dataclass(frozen=True)
class NerveGraph:
    adversary: Adversary
    faces: tuple[frozenset[int], ...]  # distinct border root faces (P_1 vertex sets)
    face_colors: tuple[int, ...]
    node_roots: tuple[tuple[int, ...], ...]  # per node: indices into faces, or -1 for improper roots
    node_colors: tuple[tuple[int, ...], ...]  # per node: colour masks of all its roots
    edges: dict[tuple[int, int], frozenset[int]]
    iteration: int = 0
    dropped_at_build: int = 0

    @property
    def n(self) -> int:
        return self.adversary.n

    @property
    def num_nodes(self) -> int:
        return len(self.node_roots)

    def components(self) -> list[int]:
        parent = list(range(self.num_nodes))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return [find(x) for x in range(self.num_nodes)]

    def kernels(self) -> dict[int, int]:
        full = (1 << self.n) - 1
        comp = self.components()
        ker: dict[int, int] = {}
        for a, colors in enumerate(self.node_colors):
            k = ker.get(comp[a], full)
            for c in colors:
                if c != full:
                    k &= c
            ker[comp[a]] = k
        return ker

    def compatible(self) -> bool:
        return all(self.kernels().values())

    def process_labels(self) -> dict[tuple[int, int], int]:
        """Edge labels flattened to the union of their root colours."""
        out = {}
        for e, lab in self.edges.items():
            m = 0
            for R in lab:
                m |= self.face_colors[R]
            out[e] = m
        return out

    def signature(self) -> tuple:
        return tuple(sorted((e, tuple(sorted(l))) for e, l in self.edges.items()))


def build_nerve(adv: Adversary, allow_unrooted: bool = False, pc: ProtocolComplex | None = None) -> NerveGraph:
    if not allow_unrooted:
        adv.require_rooted()
    pc = pc or build(adv, 1, allow_unrooted=allow_unrooted)
    n, k, full = adv.n, len(adv), (1 << adv.n) - 1
    face_index: dict[frozenset[int], int] = {}
    faces: list[frozenset[int]] = []
    colors: list[int] = []
    node_roots, node_colors = [], []
    for f in range(k):
        rs, cs = [], []
        for m in root_masks(adv.graphs[f]):
            cs.append(m)
            if m == full:
                rs.append(-1)
                continue
            face = pc.face(f, m)
            if face not in face_index:
                face_index[face] = len(faces)
                faces.append(face)
                colors.append(m)
            rs.append(face_index[face])
        node_roots.append(tuple(rs))
        node_colors.append(tuple(cs))
    # canonical face order: by colour set, then by sorted vertex ids
    order = sorted(range(len(faces)), key=lambda i: (colors[i], sorted(faces[i])))
    renum = {old: new for new, old in enumerate(order)}
    faces = [faces[i] for i in order]
    colors = [colors[i] for i in order]
    node_roots = [tuple(renum.get(r, -1) if r >= 0 else -1 for r in rs) for rs in node_roots]
    edges: dict[tuple[int, int], frozenset[int]] = {}
    dropped = 0
    for a in range(k):
        for b in range(a + 1, k):
            shared = pc.shared_mask(a, b)
            if not shared:
                continue
            label = frozenset(R for R, c in enumerate(colors) if c & ~shared == 0)
            if label:
                edges[(a, b)] = label
            else:
                dropped += 1
    return NerveGraph(
        adv, tuple(faces), tuple(colors), tuple(node_roots), tuple(node_colors), edges, 0, dropped
    )


def iterate(ng: NerveGraph) -> NerveGraph:
    comp = ng.components()
    present: dict[int, set[int]] = {}
    for a, rs in enumerate(ng.node_roots):
        present.setdefault(comp[a], set()).update(r for r in rs if r >= 0)
    edges = {}
    for e, lab in ng.edges.items():
        keep = frozenset(R for R in lab if R in present[comp[e[0]]])
        if keep:
            edges[e] = keep
    return replace(ng, edges=edges, iteration=ng.iteration + 1)


@dataclass
class NerveVerdict:
    solvable: bool
    iterations: int
    final: NerveGraph
    trace: list[NerveGraph] = field(default_factory=list)
    initial_edges: int = 0
    dropped_at_build: int = 0


def nerve_decide(adv: Adversary, max_iterations: int | None = None, allow_unrooted: bool = False) -> NerveVerdict:
    ng = build_nerve(adv, allow_unrooted)
    trace = [ng]
    limit = max_iterations if max_iterations is not None else 1 + sum(len(l) for l in ng.edges.values())
    while True:
        if ng.compatible():
            return NerveVerdict(True, ng.iteration, ng, trace, len(trace[0].edges) + trace[0].dropped_at_build, trace[0].dropped_at_build)
        nxt = iterate(ng)
        if nxt.signature() == ng.signature():
            return NerveVerdict(False, ng.iteration, ng, trace, len(trace[0].edges) + trace[0].dropped_at_build, trace[0].dropped_at_build)
        if nxt.iteration > limit:
            raise RuntimeError("nerve iteration did not converge within its label budget")
        ng = nxt
        trace.append(ng)


def nerve_to_dot(ng: NerveGraph, label_mode: str = "faces") -> str:
    adv = ng.adversary
    names = adv.names
    full = (1 << adv.n) - 1

    def colset(m: int) -> str:
        return "{" + ",".join(names[i] for i in bits(m)) + "}"

    lines = [f"graph N{ng.iteration} {{", "  node [shape=box, fontsize=10];"]
    for a in range(ng.num_nodes):
        roots = ",".join(
            colset(c) + ("" if c != full else "*") for c in ng.node_colors[a]
        )
        lines.append(f'  F{a} [label="{adv.graph_names[a]}\\nR={roots}"];')
    plabels = ng.process_labels()
    for (a, b), lab in sorted(ng.edges.items()):
        if label_mode == "processes":
            text = colset(plabels[(a, b)])
        else:
            text = " ".join(f"R{R}{colset(ng.face_colors[R])}" for R in sorted(lab))
        lines.append(f'  F{a} -- F{b} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
