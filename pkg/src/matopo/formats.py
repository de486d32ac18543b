"""Plain-text adversary files.

    title: two chains
    processes: y g w r
    graph G1: y->g, g->w, w->r
    graph G3: r->{y,w,g}

Self-loops are implicit. Edges may continue on following lines until the
next ``graph`` header; ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .digraph import Adversary, CommGraph

_EDGE = re.compile(r"^([^\s,{}>-]+)->(\{[^}]*\}|[^\s,{}>-]+)$")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class AdversaryFile:
    adversary: Adversary
    title: str = ""
    source: str = ""


def _tokens(text: str) -> list[str]:
    # split on commas/whitespace, but keep brace groups together
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if depth == 0 and (ch.isspace() or ch == ","):
            if cur:
                out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        out.append(cur)
    return out


def parse_adversary(text: str) -> AdversaryFile:
    title = source = ""
    names: list[str] | None = None
    blocks: list[tuple[str, int, list[tuple[int, str]]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        word = head.strip().split()
        if sep and word and word[0] == "graph":
            if len(word) != 2:
                raise ParseError(lineno, "expected 'graph NAME:'")
            blocks.append((word[1], lineno, []))
            if rest.strip():
                blocks[-1][2].append((lineno, rest))
        elif sep and head.strip() in ("title", "source", "processes") and not blocks:
            key = head.strip()
            if key == "title":
                title = rest.strip()
            elif key == "source":
                source = rest.strip()
            else:
                names = _tokens(rest)
        elif blocks:
            blocks[-1][2].append((lineno, line))
        else:
            raise ParseError(lineno, f"unexpected text {line!r}")
    if names is None:
        raise ParseError(1, "missing 'processes:' line")
    if not names or len(set(names)) != len(names):
        raise ParseError(1, "process names must be nonempty and unique")
    if not blocks:
        raise ParseError(1, "no graphs given")
    pid = {nm: i for i, nm in enumerate(names)}
    graphs, gnames = [], []
    for gname, gline, parts in blocks:
        edges = []
        for lineno, chunk in parts:
            for tok in _tokens(chunk):
                m = _EDGE.match(tok)
                if not m:
                    raise ParseError(lineno, f"bad edge {tok!r}")
                src, dst = m.group(1), m.group(2)
                dsts = _tokens(dst[1:-1]) if dst.startswith("{") else [dst]
                for d in [src, *dsts]:
                    if d not in pid:
                        raise ParseError(lineno, f"unknown process {d!r}")
                edges.extend((pid[src], pid[d]) for d in dsts)
        if gname in gnames:
            raise ParseError(gline, f"duplicate graph name {gname!r}")
        graphs.append(CommGraph.from_edges(len(names), edges))
        gnames.append(gname)
    try:
        adv = Adversary(tuple(graphs), tuple(names), tuple(gnames))
    except ValueError as exc:
        raise ParseError(1, str(exc)) from exc
    if len(adv) != len(graphs):
        raise ParseError(1, "two graph blocks describe the same graph")
    return AdversaryFile(adv, title, source)


def format_adversary(doc: AdversaryFile | Adversary) -> str:
    if isinstance(doc, Adversary):
        doc = AdversaryFile(doc)
    adv = doc.adversary
    out = []
    if doc.title:
        out.append(f"title: {doc.title}")
    if doc.source:
        out.append(f"source: {doc.source}")
    out.append("processes: " + " ".join(adv.names))
    for g, gname in zip(adv.graphs, adv.graph_names):
        edges = [f"{adv.names[a]}->{adv.names[b]}" for a, b in sorted(g.edges())]
        out.append(f"graph {gname}: " + ", ".join(edges) if edges else f"graph {gname}:")
    return "\n".join(out) + "\n"


def describe_graph(adv: Adversary, g: CommGraph) -> str:
    return ", ".join(f"{adv.names[a]}->{adv.names[b]}" for a, b in sorted(g.edges())) or "(self-loops only)"

