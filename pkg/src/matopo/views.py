"""Heard-of histories under the full-information protocol.

Views are hash-consed: building the same history twice returns the same
object, so ``is`` comparison is structural equality.
"""

from __future__ import annotations

import threading
from typing import Hashable, Sequence

from .digraph import CommGraph, bits, default_names


class View:
    __slots__ = ("round", "owner", "children", "heard_of", "tag", "__weakref__")

    round: int
    owner: int
    children: tuple[tuple[int, "View"], ...]
    heard_of: int
    tag: Hashable

    def __init__(self, *args, **kwargs):
        raise TypeError("views are created through a ViewStore")

    def __repr__(self) -> str:
        return f"View(round={self.round}, owner={self.owner}, heard_of={bin(self.heard_of)})"

    def heard_set(self) -> frozenset[int]:
        return frozenset(bits(self.heard_of))

    def in_neighbours(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.children)

    def condensed(self, names: Sequence[str] | None = None) -> str:
        """Readable label, with round-1 children written by process name only."""
        nm = names or default_names(max(self.heard_of.bit_length(), self.owner + 1))
        return f"({nm[self.owner]},{self._body(nm)})"

    def _body(self, nm: Sequence[str]) -> str:
        if self.round == 0:
            return "{" + nm[self.owner] + "}"
        if self.round == 1:
            return "{" + ",".join(nm[p] for p, _ in self.children) + "}"
        return "{" + ",".join(c.condensed(nm) for _, c in self.children) + "}"

    def expanded(self, names: Sequence[str] | None = None) -> str:
        nm = names or default_names(max(self.heard_of.bit_length(), self.owner + 1))
        if self.round == 0:
            return f"({nm[self.owner]},{{{nm[self.owner]}}})"
        return f"({nm[self.owner]},{{" + ",".join(c.expanded(nm) for _, c in self.children) + "})"


class ViewStore:
    """Interning table. Insertion is locked, so the first writer wins."""

    def __init__(self) -> None:
        self._table: dict[tuple, View] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._table)

    def _intern(self, key: tuple, make) -> View:
        v = self._table.get(key)
        if v is not None:
            return v
        with self._lock:
            v = self._table.get(key)
            if v is None:
                v = make()
                self._table[key] = v
            return v

    def initial(self, owner: int, tag: Hashable = None) -> View:
        def make() -> View:
            v = object.__new__(View)
            v.round, v.owner, v.children, v.heard_of, v.tag = 0, owner, (), 1 << owner, tag
            return v

        return self._intern((owner, None, tag), make)

    def view(self, owner: int, children: Sequence[tuple[int, View]]) -> View:
        kids = tuple(sorted(children, key=lambda pc: pc[0]))
        if not kids or owner not in (p for p, _ in kids):
            raise ValueError("a view must contain its owner's previous view")
        rnd = kids[0][1].round
        if any(c.round != rnd for _, c in kids):
            raise ValueError("children must belong to the same round")
        if any(c.owner != p for p, c in kids):
            raise ValueError("child view owner does not match its process id")
        # children are interned, so identity of the child objects is a valid key
        key = (owner, tuple((p, id(c)) for p, c in kids))

        def make() -> View:
            v = object.__new__(View)
            h = 0
            for _, c in kids:
                h |= c.heard_of
            v.round, v.owner, v.children, v.heard_of, v.tag = rnd + 1, owner, kids, h, None
            return v

        return self._intern(key, make)


DEFAULT_STORE = ViewStore()


class GlobalView(tuple):
    """One view per process, all from the same round."""

    def __new__(cls, views: Sequence[View]):
        views = tuple(views)
        if not views:
            raise ValueError("empty global view")
        if any(v.owner != i for i, v in enumerate(views)):
            raise ValueError("view i must be owned by process i")
        if len({v.round for v in views}) != 1:
            raise ValueError("views from different rounds")
        return super().__new__(cls, views)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def round(self) -> int:
        return self[0].round

    def heard_of(self) -> tuple[int, ...]:
        return tuple(v.heard_of for v in self)


def initial_global_view(
    n: int, tag: Hashable = None, store: ViewStore | None = None
) -> GlobalView:
    if n < 1:
        raise ValueError("n must be positive")
    st = DEFAULT_STORE if store is None else store
    return GlobalView([st.initial(i, tag) for i in range(n)])


def evolve(gv: GlobalView, g: CommGraph, store: ViewStore | None = None) -> GlobalView:
    if g.n != gv.n:
        raise ValueError(f"graph on {g.n} processes applied to {gv.n} views")
    st = DEFAULT_STORE if store is None else store
    return GlobalView(
        [st.view(i, [(j, gv[j]) for j in bits(g.inmasks[i])]) for i in range(gv.n)]
    )


def run_sequence(
    n: int, graphs: Sequence[CommGraph], store: ViewStore | None = None, tag: Hashable = None
) -> GlobalView:
    gv = initial_global_view(n, tag, store)
    for g in graphs:
        gv = evolve(gv, g, store)
    return gv


def top_level_graph(gv: GlobalView) -> CommGraph:
    if gv.round == 0:
        raise ValueError("round-0 views carry no graph")
    return CommGraph(gv.n, tuple(sum(1 << p for p, _ in v.children) for v in gv))


def previous(gv: GlobalView) -> GlobalView:
    """The round r-1 global view, read off the self-loop children."""
    if gv.round == 0:
        raise ValueError("round-0 views have no predecessor")
    return GlobalView([dict(v.children)[i] for i, v in enumerate(gv)])
