"""Built-in adversaries, addressable by name (``2c``, ``iis:3`` ...)."""

from __future__ import annotations

from .digraph import (
    Adversary,
    CommGraph,
    default_names,
    enumerate_all_graphs,
    enumerate_iis_adversary,
)
from .formats import AdversaryFile, parse_adversary

# Two chains that differ only in their first two members, plus a star from r.
TWO_CHAIN = """\
title: two chains (2C)
source: chain example with a star
processes: y g w r
graph G1: y->g, g->w, w->r
graph G2: g->y, y->w, w->r
graph G3: r->{y,w,g}
"""

# Same shape with p inserted between w and r; the red vertex survives one round longer.
TWO_CHAIN_PLUS = """\
title: two chains, extended (2C+)
source: chain example with p inserted between w and r
processes: y g w p r
graph G1: y->g, g->w, w->p, p->r
graph G2: g->y, y->w, w->p, p->r
graph G3: r->{y,w,g,p}
"""


def _star(n: int) -> Adversary:
    return Adversary((CommGraph.from_edges(n, [(0, i) for i in range(1, n)]),), graph_names=("S",))


def _identity(n: int) -> Adversary:
    return Adversary((CommGraph.identity(n),), graph_names=("I",))


FAMILIES = {
    "iis": lambda n: enumerate_iis_adversary(n),
    "full": lambda n: enumerate_all_graphs(n),
    "star": _star,
    "identity": _identity,
}

FIXED = {"2c": TWO_CHAIN, "2c+": TWO_CHAIN_PLUS}


def catalog_names() -> list[str]:
    return sorted(FIXED) + [f"{fam}:<n>" for fam in sorted(FAMILIES)]


def load_example(name: str) -> AdversaryFile:
    key = name.strip().lower()
    if key in FIXED:
        return parse_adversary(FIXED[key])
    fam, sep, arg = key.partition(":")
    if sep and fam in FAMILIES:
        try:
            n = int(arg)
        except ValueError:
            raise KeyError(f"bad process count in {name!r}") from None
        adv = FAMILIES[fam](n)
        if adv.names != default_names(n):
            adv = Adversary(adv.graphs, default_names(n), adv.graph_names)
        return AdversaryFile(adv, title=f"{fam} adversary on {n} processes")
    raise KeyError(f"unknown example {name!r}; known: {', '.join(catalog_names())}")


def is_example(name: str) -> bool:
    try:
        load_example(name)
    except KeyError:
        return False
    return True
