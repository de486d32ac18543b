"""Command-line entry point: ``matopo decide|complex|simulate|verify|show|examples``.

Exit codes
    0  solvable / pass
    1  usage or parse error
    2  unsolvable / check failed
    3  undecided at the cap, or facet budget exceeded
    4  input contains a non-rooted graph (consensus is trivially impossible)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .border import border_components
from .catalog import catalog_names, is_example, load_example
from .complex import BudgetExceededError, ProtocolComplex, build, export_dot
from .digraph import Adversary, NotRootedError, bits, root_components
from .formats import AdversaryFile, ParseError, format_adversary, parse_adversary
from .nerve import nerve_decide, nerve_to_dot
from .oracle import DEFAULT_CAP, NotSolvableError, OracleCapExceeded, analyze_complex, extract_decision_map, min_termination_rounds, simulate
from .rrg import rrg_decide, rrg_to_dot

EXIT_OK, EXIT_PARSE, EXIT_NO, EXIT_CAP, EXIT_UNROOTED = 0, 1, 2, 3, 4
SCHEMA = "ma-topo/1"


class UsageError(Exception):
    pass


def load_source(src: str) -> AdversaryFile:
    path = Path(src)
    if path.exists():
        try:
            return parse_adversary(path.read_text())
        except ParseError as exc:
            raise UsageError(f"{src}: {exc}") from exc
    if is_example(src):
        return load_example(src)
    raise UsageError(f"{src!r} is neither a file nor a built-in example ({', '.join(catalog_names())})")


def _names(adv: Adversary, mask: int) -> list[str]:
    return [adv.names[i] for i in bits(mask)]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _unrooted_message(adv: Adversary) -> str:
    bad = [nm for g, nm in zip(adv.graphs, adv.graph_names) if len(root_components(g)) != 1]
    return (
        f"verdict: unsolvable\nreason: graph(s) {', '.join(bad)} not rooted "
        "(several root components; consensus is trivially impossible)\n"
    )


# ------------------------------------------------------------------ decide


def cmd_decide(args: argparse.Namespace) -> int:
    doc = load_source(args.source)
    adv = doc.adversary
    out = [f"adversary: {doc.title or args.source} (n={adv.n}, |D|={len(adv)})", f"method: {args.method}"]
    if not adv.is_rooted() and not args.allow_unrooted:
        sys.stdout.write("\n".join(out) + "\n" + _unrooted_message(adv))
        return EXIT_UNROOTED
    result: dict = {"schema": SCHEMA, "kind": "verdict", "method": args.method, "n": adv.n, "graphs": len(adv)}
    trace_dir = Path(args.trace) if args.trace else None
    if trace_dir:
        trace_dir.mkdir(parents=True, exist_ok=True)
    if args.method == "nerve":
        v = nerve_decide(adv, allow_unrooted=args.allow_unrooted)
        result.update(solvable=v.solvable, iterations=v.iterations, edges_initial=v.initial_edges,
                      edges_dropped_at_build=v.dropped_at_build)
        out += [f"verdict: {'solvable' if v.solvable else 'unsolvable'}", f"iterations: {v.iterations}",
                f"edges: {v.initial_edges} intersecting pairs, {v.dropped_at_build} dropped for empty labels"]
        if trace_dir:
            for ng in v.trace:
                (trace_dir / f"N{ng.iteration}.dot").write_text(nerve_to_dot(ng, args.labels))
        code = EXIT_OK if v.solvable else EXIT_NO
    elif args.method == "rrg":
        v = rrg_decide(adv, allow_unrooted=args.allow_unrooted)
        result.update(solvable=v.solvable, level=v.level, iterations=v.iterations, bound=v.k_round_bound)
        out += [f"verdict: {'solvable' if v.solvable else 'unsolvable'}", f"level: RRG_{v.level}",
                f"iterations: {v.iterations}"]
        if v.solvable:
            out.append(f"k-round bound: {v.k_round_bound} (= {v.iterations}*(n-1))")
        if trace_dir:
            for g in v.trace:
                (trace_dir / f"RRG{g.level}.dot").write_text(rrg_to_dot(g))
        code = EXIT_OK if v.solvable else EXIT_NO
    else:
        try:
            r = min_termination_rounds(adv, args.cap, allow_unrooted=args.allow_unrooted)
        except OracleCapExceeded as exc:
            result.update(solvable=None, cap=args.cap, reason=str(exc))
            out += [f"verdict: undecided ({exc})"]
            code = EXIT_CAP
        else:
            rep = analyze_complex(build(adv, r, allow_unrooted=args.allow_unrooted))
            result.update(solvable=True, rounds=r, components=rep.num_components,
                          kernels=[_names(adv, k) for k in rep.kernel_vertex])
            out += ["verdict: solvable", f"minimal rounds: {r}", f"components: {rep.num_components}"]
            code = EXIT_OK
    sys.stdout.write(_dump(result) if args.json else "\n".join(out) + "\n")
    return code


# ------------------------------------------------------------------ complex


def complex_json(pc: ProtocolComplex) -> dict:
    adv = pc.adversary
    rep = analyze_complex(pc)
    info = {}
    if pc.rounds >= 1 and adv.is_rooted():
        info = {b.facet: b for b in border_components(pc)}
    full = pc.full
    vertices = [
        {
            "id": v,
            "process": adv.names[pc.owner(v)],
            "heard_of": _names(adv, int(pc.top.hb[v])),
            "label": pc.vertex_label(v),
            "border": int(pc.top.hb[v]) != full,
        }
        for v in range(pc.num_vertices)
    ]
    facets = []
    for f in range(pc.num_facets):
        entry = {
            "id": f,
            "sequence": [adv.graph_names[g] for g in pc.sequence(f)],
            "vertices": list(pc.vertices(f)),
            "component": int(rep.components[f]),
        }
        if f in info:
            b = info[f]
            entry.update(proper=b.proper, root=_names(adv, b.root.colors),
                         b_face=sorted(b.b_face) if b.proper else [],
                         carrier=_names(adv, b.carrier_colors))
        facets.append(entry)
    comps = [
        {
            "id": c,
            "facets": [int(x) for x in members],
            "kernel_vertex": _names(adv, rep.kernel_vertex[c]),
            "kernel_facet": _names(adv, rep.kernel_facet[c]),
        }
        for c, members in enumerate(pc.component_facets())
    ]
    v, e, nf = pc.counts()
    return {
        "schema": SCHEMA,
        "kind": "complex",
        "n": pc.n,
        "processes": list(adv.names),
        "graphs": [{"name": nm, "edges": [[adv.names[a], adv.names[b]] for a, b in g.edges()]}
                   for g, nm in zip(adv.graphs, adv.graph_names)],
        "rounds": pc.rounds,
        "counts": {"vertices": v, "edges": e, "facets": nf, "components": rep.num_components},
        "strict_solvable": rep.strict_solvable,
        "border_solvable": rep.border_solvable,
        "vertices": vertices,
        "facets": facets,
        "components": comps,
    }


def cmd_complex(args: argparse.Namespace) -> int:
    doc = load_source(args.source)
    adv = doc.adversary
    try:
        pc = build(adv, args.rounds, allow_unrooted=True)
    except BudgetExceededError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    v, e, f = pc.counts()
    lines = [f"complex: P_{pc.rounds} of {doc.title or args.source}", f"vertices: {v}", f"edges: {e}",
             f"facets: {f}", f"components: {pc.num_components}"]
    if pc.rounds >= 1 and adv.is_rooted():
        proper = sum(1 for b in border_components(pc) if b.proper)
        lines.append(f"proper border facets: {proper}")
    if args.dot:
        Path(args.dot).write_text(export_dot(pc))
        lines.append(f"dot: {args.dot}")
    if args.json:
        Path(args.json).write_text(_dump(complex_json(pc)))
        lines.append(f"json: {args.json}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


# ------------------------------------------------------------------ simulate


def cmd_simulate(args: argparse.Namespace) -> int:
    doc = load_source(args.source)
    adv = doc.adversary
    if not adv.is_rooted():
        sys.stdout.write(_unrooted_message(adv))
        return EXIT_UNROOTED
    if args.rounds == "auto":
        try:
            r = min_termination_rounds(adv, args.cap)
        except OracleCapExceeded as exc:
            sys.stdout.write(f"not simulated: {exc}\n")
            return EXIT_CAP
    else:
        r = int(args.rounds)
    try:
        dm = extract_decision_map(adv, r)
    except NotSolvableError as exc:
        sys.stdout.write(f"not simulated: {exc}\n")
        return EXIT_NO
    except BudgetExceededError as exc:
        sys.stdout.write(f"not simulated: {exc}\n")
        return EXIT_CAP
    mode = "random" if args.random else "exhaustive"
    res = simulate(adv, dm, mode, count=args.random or 0, seed=args.seed)
    body = res.json(adv) if args.format == "json" else res.text(adv)
    lines = [f"rounds: {r}", f"mode: {mode}", f"sequences: {res.sequences}",
             f"result: {'pass' if res.passed else 'FAIL'}"]
    if args.transcript:
        Path(args.transcript).write_text(body)
        lines.append(f"transcript: {args.transcript}")
    else:
        lines.append("")
        lines.append(body.rstrip("\n"))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if res.passed else EXIT_NO


# ------------------------------------------------------------------ verify


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import VerifyOptions, check_adversary, exhaustive_corpus, minimize, random_corpus, run_corpus

    ns = [int(x) for x in str(args.n).split(",")]
    if args.exhaustive:
        advs = [a for n in ns for a in exhaustive_corpus(n, args.graphs)]
    else:
        advs = random_corpus(ns, args.graphs, args.count, args.seed)
    opts = VerifyOptions(cap=args.cap, simulate=not args.no_simulate)

    def progress(c) -> None:
        if args.verbose:
            sys.stderr.write(f"[{c.index}] n={c.n} |D|={c.graphs} nerve={c.nerve_solvable} min={c.min_rounds}\n")

    rep = run_corpus(advs, opts, args.seed, progress)
    s = rep.summary()
    lines = [f"{k}: {s[k]}" for k in sorted(s)]
    for c in rep.gap_cases()[: args.show_gaps]:
        lines.append(
            f"gap: case {c.index} nerve iterations {c.nerve_iterations} < minimal rounds {c.min_rounds} "
            f"(rrg bound {c.rrg_bound})"
        )
    bad = [c for c in rep.cases if c.violations]
    for c in bad:
        lines.append(f"VIOLATION case {c.index}: {'; '.join(c.violations[:3])}")
        small = minimize(advs[c.index], lambda a: bool(check_adversary(a, c.index, opts).violations))
        lines.append("minimized counterexample:")
        lines.extend("  " + ln for ln in format_adversary(small).splitlines())
    if args.out:
        Path(args.out).write_text(_dump(rep.to_dict()))
        lines.append(f"report: {args.out}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_NO if bad else EXIT_OK


# ------------------------------------------------------------------ misc


def cmd_show(args: argparse.Namespace) -> int:
    sys.stdout.write(format_adversary(load_source(args.source)))
    return EXIT_OK


def cmd_examples(args: argparse.Namespace) -> int:
    sys.stdout.write("\n".join(catalog_names()) + "\n")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with parse errors; 2 means "unsolvable"
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="matopo", description="Consensus solvability under oblivious message adversaries.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", help="decide consensus solvability")
    d.add_argument("source", help="adversary file or built-in example name")
    d.add_argument("--method", choices=("nerve", "rrg", "oracle"), default="nerve")
    d.add_argument("--cap", type=int, default=DEFAULT_CAP, help="round cap for the oracle")
    d.add_argument("--trace", metavar="DIR", help="write one DOT file per iteration")
    d.add_argument("--labels", choices=("faces", "processes"), default="faces", help="nerve edge labels in traces")
    d.add_argument("--json", action="store_true")
    d.add_argument("--allow-unrooted", action="store_true", help="run the procedures on non-rooted graphs too")
    d.set_defaults(func=cmd_decide)

    c = sub.add_parser("complex", help="build P_r and export it")
    c.add_argument("source")
    c.add_argument("--rounds", type=int, default=1)
    c.add_argument("--dot")
    c.add_argument("--json")
    c.set_defaults(func=cmd_complex)

    s = sub.add_parser("simulate", help="run the full-information protocol with the extracted decision map")
    s.add_argument("source")
    s.add_argument("--rounds", default="auto")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", help="all graph sequences (default)")
    g.add_argument("--random", type=int, metavar="N", help="N sampled sequences")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--transcript")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="cross-validate procedures and oracle on a corpus")
    v.add_argument("--n", default="3", help="process count(s), comma separated")
    v.add_argument("--graphs", type=int, default=3, help="maximum graphs per adversary")
    v.add_argument("--count", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cap", type=int, default=DEFAULT_CAP)
    v.add_argument("--exhaustive", action="store_true", help="every rooted adversary with at most --graphs graphs")
    v.add_argument("--no-simulate", action="store_true")
    v.add_argument("--show-gaps", type=int, default=5)
    v.add_argument("--out")
    v.add_argument("--verbose", action="store_true")
    v.set_defaults(func=cmd_verify)

    sh = sub.add_parser("show", help="print an adversary in canonical file form")
    sh.add_argument("source")
    sh.set_defaults(func=cmd_show)

    ex = sub.add_parser("examples", help="list built-in adversaries")
    ex.set_defaults(func=cmd_examples)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except NotRootedError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_UNROOTED
    except (KeyError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
