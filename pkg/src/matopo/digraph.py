"""Directed communication graphs on a fixed process set.

A graph is stored as a tuple of in-neighbour bitmasks: bit ``j`` of
``inmasks[i]`` is set when process ``i`` hears process ``j`` in the round.
Self-loops are always present.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

ENUM_CAP = 4
DEFAULT_NAMES = "rgwpybcmk"


class NotRootedError(ValueError):
    """Raised when a decision entry point meets a graph with several roots."""


class CapExceededError(ValueError):
    pass


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def default_names(n: int) -> tuple[str, ...]:
    if n <= len(DEFAULT_NAMES):
        return tuple(DEFAULT_NAMES[:n])
    return tuple(f"p{i + 1}" for i in range(n))


@dataclass(frozen=True, order=False)
class CommGraph:
    n: int
    inmasks: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a communication graph needs at least one process")
        if len(self.inmasks) != self.n:
            raise ValueError("inmasks length must equal n")
        full = full_mask(self.n)
        fixed = tuple((m | (1 << i)) & full for i, m in enumerate(self.inmasks))
        if any(m >> self.n for m in self.inmasks):
            raise ValueError("in-neighbour mask refers to a process outside range")
        object.__setattr__(self, "inmasks", fixed)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "CommGraph":
        """Edges are pairs ``(src, dst)``: ``dst`` hears ``src``."""
        masks = [1 << i for i in range(n)]
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge {a}->{b} out of range for n={n}")
            masks[b] |= 1 << a
        return cls(n, tuple(masks))

    @classmethod
    def identity(cls, n: int) -> "CommGraph":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def complete(cls, n: int) -> "CommGraph":
        return cls(n, (full_mask(n),) * n)

    @property
    def adjacency(self) -> tuple[tuple[bool, ...], ...]:
        """``adjacency[j][i]`` is true iff there is an edge ``j -> i``."""
        return tuple(
            tuple(bool(self.inmasks[i] >> j & 1) for i in range(self.n)) for j in range(self.n)
        )

    def edges(self, with_loops: bool = False) -> list[tuple[int, int]]:
        return [
            (j, i)
            for j in range(self.n)
            for i in range(self.n)
            if self.inmasks[i] >> j & 1 and (with_loops or i != j)
        ]

    def outmasks(self) -> tuple[int, ...]:
        out = [0] * self.n
        for i, m in enumerate(self.inmasks):
            for j in bits(m):
                out[j] |= 1 << i
        return tuple(out)

    def sort_key(self) -> tuple[int, ...]:
        # row-major bits of the adjacency relation
        return tuple(int(b) for row in self.adjacency for b in row)

    def to_array(self) -> np.ndarray:
        return np.array(self.adjacency, dtype=bool)


def in_set(g: CommGraph, p: int) -> frozenset[int]:
    return frozenset(bits(g.inmasks[p]))


def reachability(g: CommGraph) -> list[int]:
    """``reach[i]`` = mask of processes reachable from ``i`` (``i`` included)."""
    out = g.outmasks()
    reach = []
    for i in range(g.n):
        seen = 1 << i
        frontier = seen
        while frontier:
            nxt = 0
            for u in bits(frontier):
                nxt |= out[u]
            frontier = nxt & ~seen
            seen |= nxt
        reach.append(seen)
    return reach


@dataclass(frozen=True)
class Condensation:
    components: tuple[int, ...]  # SCC masks, in discovery order (reverse topological)
    comp_of: tuple[int, ...]
    dag: tuple[frozenset[int], ...]  # dag[c] = components that c has edges into


def sccs(g: CommGraph) -> Condensation:
    """Tarjan's algorithm, iterative."""
    n = g.n
    out = g.outmasks()
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[int] = []
    comp_of = [-1] * n
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, iter(bits(out[root] & ~(1 << root))))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(bits(out[w] & ~(1 << w)))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                mask = 0
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_of[w] = len(comps)
                    mask |= 1 << w
                    if w == v:
                        break
                comps.append(mask)
    dag = []
    for c, mask in enumerate(comps):
        succ = set()
        for u in bits(mask):
            for w in bits(out[u]):
                if comp_of[w] != c:
                    succ.add(comp_of[w])
        dag.append(frozenset(succ))
    return Condensation(tuple(comps), tuple(comp_of), tuple(dag))


def root_components(g: CommGraph) -> list[frozenset[int]]:
    """SCCs with no edge entering from outside, ordered by smallest member."""
    roots = []
    for mask in sccs(g).components:
        if all(g.inmasks[i] & ~mask == 0 for i in bits(mask)):
            roots.append(mask)
    roots.sort(key=lambda m: (m & -m))
    return [frozenset(bits(m)) for m in roots]


def root_masks(g: CommGraph) -> list[int]:
    return [sum(1 << i for i in r) for r in root_components(g)]


def is_rooted(g: CommGraph) -> bool:
    return len(root_components(g)) == 1


def root_mask(g: CommGraph) -> int:
    masks = root_masks(g)
    if len(masks) != 1:
        raise NotRootedError(f"graph has {len(masks)} root components")
    return masks[0]


def is_transitively_closed(g: CommGraph) -> bool:
    # (a,b),(b,c) edges with b hearing a and c hearing b: c must hear a
    for c in range(g.n):
        need = 0
        for b in bits(g.inmasks[c]):
            need |= g.inmasks[b]
        if need & ~g.inmasks[c]:
            return False
    return True


def is_unilaterally_connected(g: CommGraph) -> bool:
    reach = reachability(g)
    return all(
        reach[a] >> b & 1 or reach[b] >> a & 1 for a in range(g.n) for b in range(a + 1, g.n)
    )


def _check_cap(n: int, cap: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise CapExceededError(f"n={n} exceeds enumeration cap {cap}")


def iter_all_graphs(n: int) -> Iterator[CommGraph]:
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    for chosen in itertools.product((False, True), repeat=len(pairs)):
        yield CommGraph.from_edges(n, (p for p, on in zip(pairs, chosen) if on))


@dataclass(frozen=True)
class Adversary:
    """A nonempty set of graphs on the same processes, kept in canonical order."""

    graphs: tuple[CommGraph, ...]
    names: tuple[str, ...] = ()
    graph_names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        graphs = tuple(self.graphs)
        if not graphs:
            raise ValueError("an adversary needs at least one graph")
        n = graphs[0].n
        if any(g.n != n for g in graphs):
            raise ValueError("all graphs must have the same number of processes")
        gnames = tuple(self.graph_names) or tuple(f"G{i + 1}" for i in range(len(graphs)))
        if len(gnames) != len(graphs):
            raise ValueError("one name per graph expected")
        if len(set(gnames)) != len(gnames):
            raise ValueError("graph names must be unique")
        pairs = {}
        for g, name in zip(graphs, gnames):
            if g in pairs:
                continue
            pairs[g] = name
        ordered = sorted(pairs.items(), key=lambda kv: kv[0].sort_key())
        names = tuple(self.names) or default_names(n)
        if len(names) != n or len(set(names)) != n:
            raise ValueError("process names must be unique, one per process")
        object.__setattr__(self, "graphs", tuple(g for g, _ in ordered))
        object.__setattr__(self, "graph_names", tuple(nm for _, nm in ordered))
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.graphs[0].n

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self) -> Iterator[CommGraph]:
        return iter(self.graphs)

    def index(self, graph_name: str) -> int:
        return self.graph_names.index(graph_name)

    def pid(self, name: str) -> int:
        return self.names.index(name)

    def is_rooted(self) -> bool:
        return all(is_rooted(g) for g in self.graphs)

    def require_rooted(self) -> None:
        for g, name in zip(self.graphs, self.graph_names):
            if not is_rooted(g):
                raise NotRootedError(
                    f"graph {name} has {len(root_components(g))} root components; "
                    "consensus is trivially impossible"
                )

    def color_set(self, mask: int) -> str:
        return "{" + ",".join(self.names[i] for i in bits(mask)) + "}"


def enumerate_all_graphs(n: int, cap: int = ENUM_CAP) -> Adversary:
    _check_cap(n, cap)
    return Adversary(tuple(iter_all_graphs(n)))


def enumerate_iis_adversary(n: int, cap: int = ENUM_CAP) -> Adversary:
    _check_cap(n, cap)
    return Adversary(
        tuple(
            g
            for g in iter_all_graphs(n)
            if is_transitively_closed(g) and is_unilaterally_connected(g)
        )
    )


def rooted_graph_count(n: int) -> int:
    return sum(1 for g in iter_all_graphs(n) if is_rooted(g))


def random_rooted_graph(n: int, rng: np.random.Generator, p: float = 0.5) -> CommGraph:
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    while True:
        draws = rng.random(len(pairs)) < p
        g = CommGraph.from_edges(n, (e for e, on in zip(pairs, draws) if on))
        if is_rooted(g):
            return g


def random_rooted_adversary(
    n: int, k: int, seed: int | np.random.Generator, names: Sequence[str] = ()
) -> Adversary:
    if k < 1:
        raise ValueError("k must be at least 1")
    if n <= ENUM_CAP and k > rooted_graph_count(n):
        raise ValueError(f"only {rooted_graph_count(n)} rooted graphs exist on {n} processes")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    found: dict[CommGraph, None] = {}
    while len(found) < k:
        found.setdefault(random_rooted_graph(n, rng))
    return Adversary(tuple(found), tuple(names))
