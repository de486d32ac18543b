"""Brute-force ground truth: kernels per component, minimal rounds, decision
maps and end-to-end simulation of the full-information protocol."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .border import border_arrays
from .complex import BudgetExceededError, ProtocolComplex, build
from .digraph import Adversary, CapExceededError, bits
from .views import View, ViewStore, evolve, initial_global_view

DEFAULT_CAP = 6


@dataclass(frozen=True)
class SolvabilityReport:
    rounds: int
    n: int
    components: np.ndarray  # facet -> component label
    kernel_vertex: tuple[int, ...]
    kernel_facet: tuple[int, ...]

    @property
    def num_components(self) -> int:
        return len(self.kernel_vertex)

    @property
    def strict_solvable(self) -> bool:
        return all(k != 0 for k in self.kernel_vertex)

    @property
    def border_solvable(self) -> bool:
        return all(k != 0 for k in self.kernel_facet)

    def kernels_nested(self) -> bool:
        return all(kv & ~kf == 0 for kv, kf in zip(self.kernel_vertex, self.kernel_facet))


class NotSolvableError(ValueError):
    pass


class OracleCapExceeded(CapExceededError):
    def __init__(self, cap: int, report: SolvabilityReport | None, message: str = ""):
        super().__init__(message or f"no strictly solvable round up to r={cap}")
        self.cap = cap
        self.report = report


def analyze_complex(pc: ProtocolComplex) -> SolvabilityReport:
    full = pc.full
    lab = pc.components
    ncomp = pc.num_components
    per_facet = np.bitwise_and.reduce(pc.top.hb[pc.facets], axis=1)
    kv = _accel.component_and(lab, per_facet, ncomp, full)
    if pc.rounds == 0:
        kf = np.full(ncomp, full, dtype=np.int64)
    else:
        arr = border_arrays(pc)
        kf = _accel.component_and(lab[arr.facet], arr.carrier, ncomp, full)
    return SolvabilityReport(
        pc.rounds, pc.n, lab, tuple(int(x) for x in kv), tuple(int(x) for x in kf)
    )


def analyze(
    adv: Adversary, rounds: int, budget: int | None = None, allow_unrooted: bool = False
) -> SolvabilityReport:
    return analyze_complex(build(adv, rounds, budget, allow_unrooted))


def min_termination_rounds(
    adv: Adversary, cap: int = DEFAULT_CAP, budget: int | None = None, allow_unrooted: bool = False
) -> int:
    """Smallest r <= cap at which P_r admits a decision map.

    Raises OracleCapExceeded (carrying the last report) when none exists,
    including when the facet budget stops the scan early."""
    if not allow_unrooted:
        adv.require_rooted()
    report = None
    for r in range(cap + 1):
        try:
            report = analyze(adv, r, budget, allow_unrooted)
        except BudgetExceededError as exc:
            raise OracleCapExceeded(r - 1, report, f"facet budget reached at r={r}: {exc}") from exc
        if report.strict_solvable:
            return r
    raise OracleCapExceeded(cap, report)


def strict_profile(adv: Adversary, cap: int, budget: int | None = None) -> list[SolvabilityReport]:
    out = []
    for r in range(cap + 1):
        try:
            out.append(analyze(adv, r, budget))
        except BudgetExceededError:
            break
    return out


# ---------------------------------------------------------------- decision maps


@dataclass
class DecisionMap:
    rounds: int
    n: int
    deciders: tuple[int, ...]  # per component
    complex: ProtocolComplex = field(repr=False)
    vertex_component: np.ndarray = field(repr=False)
    _lookup: list[dict] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        self._lookup = [
            {(int(o), tuple(row)): v for v, (o, row) in enumerate(zip(L.owner.tolist(), L.kids.tolist()))}
            for L in self.complex.levels
        ]
        self._memo: dict[int, tuple[View, int]] = {}

    def locate(self, view: View) -> int:
        """Vertex id of a view in the top level of the complex, or -1."""
        # the memo holds the view itself so its id cannot be recycled
        hit = self._memo.get(id(view))
        if hit is not None and hit[0] is view:
            return hit[1]
        if view.round == 0:
            vid = self._lookup[0].get((view.owner, (-1,) * self.n), -1)
        else:
            row = [-1] * self.n
            for p, child in view.children:
                c = self.locate(child)
                if c < 0:
                    return -1
                row[p] = c
            vid = self._lookup[view.round].get((view.owner, tuple(row)), -1)
        self._memo[id(view)] = (view, vid)
        return vid

    def decide(self, view: View) -> int:
        if view.round != self.rounds:
            raise ValueError(f"decision map is for round {self.rounds}, got a round-{view.round} view")
        v = self.locate(view)
        if v < 0:
            raise KeyError("view does not occur in the protocol complex")
        return self.deciders[int(self.vertex_component[v])]


def extract_decision_map(adv: Adversary, rounds: int, budget: int | None = None) -> DecisionMap:
    pc = build(adv, rounds, budget)
    rep = analyze_complex(pc)
    if not rep.strict_solvable:
        raise NotSolvableError(f"no decision map at r={rounds}: some component has an empty kernel")
    deciders = tuple(bits(k)[0] for k in rep.kernel_vertex)
    vc = np.full(pc.num_vertices, -1, dtype=np.int64)
    vc[pc.facets.ravel()] = np.repeat(rep.components, pc.n)
    return DecisionMap(rounds, pc.n, deciders, pc, vc)


# ---------------------------------------------------------------- simulation


@dataclass(frozen=True)
class TranscriptLine:
    sequence: tuple[int, ...]
    process: int
    round: int
    decision: int


@dataclass
class SimulationResult:
    rounds: int
    sequences: int
    passed: bool
    lines: list[TranscriptLine]
    violations: list[str]

    def text(self, adv: Adversary) -> str:
        out = [f"# rounds={self.rounds} sequences={self.sequences} passed={self.passed}"]
        for ln in self.lines:
            seq = ".".join(adv.graph_names[g] for g in ln.sequence) or "-"
            out.append(
                f"seq={seq} proc={adv.names[ln.process]} round={ln.round} "
                f"decision={adv.names[ln.decision]}"
            )
        out.extend(f"VIOLATION {v}" for v in self.violations)
        return "\n".join(out) + "\n"

    def json(self, adv: Adversary) -> str:
        doc = {
            "schema": "ma-topo/1",
            "kind": "transcript",
            "rounds": self.rounds,
            "sequences": self.sequences,
            "passed": self.passed,
            "lines": [
                {
                    "sequence": [adv.graph_names[g] for g in ln.sequence],
                    "process": adv.names[ln.process],
                    "round": ln.round,
                    "decision": adv.names[ln.decision],
                }
                for ln in self.lines
            ],
            "violations": self.violations,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _sequences(k: int, r: int, mode: str, count: int, seed: int):
    if mode == "exhaustive":
        return list(itertools.product(range(k), repeat=r))
    if mode == "random":
        rng = np.random.default_rng(seed)
        return [tuple(int(x) for x in row) for row in rng.integers(0, k, size=(count, r))]
    raise ValueError(f"unknown simulation mode {mode!r}")


def simulate(
    adv: Adversary,
    dm: DecisionMap,
    mode: str = "exhaustive",
    count: int = 100,
    seed: int = 0,
) -> SimulationResult:
    """Run the full-information protocol along graph sequences of length dm.rounds.

    Each process decides the moment its view reaches round dm.rounds. The run
    checks termination (exactly one decision each), agreement, and validity:
    the decided id must be a process every decider has heard of."""
    n, r = adv.n, dm.rounds
    store = ViewStore()
    lines: list[TranscriptLine] = []
    violations: list[str] = []
    seqs = _sequences(len(adv), r, mode, count, seed)
    for seq in seqs:
        gv = initial_global_view(n, store=store)
        decided: dict[int, list[tuple[int, int]]] = {p: [] for p in range(n)}
        for t in range(r + 1):
            if t > 0:
                gv = evolve(gv, adv.graphs[seq[t - 1]], store)
            for p in range(n):
                if gv[p].round == r and not decided[p]:
                    try:
                        d = dm.decide(gv[p])
                    except KeyError:
                        violations.append(f"seq={seq} proc={p}: view not in complex")
                        continue
                    decided[p].append((t, d))
        values = set()
        for p in range(n):
            if len(decided[p]) != 1:
                violations.append(f"seq={seq} proc={p}: {len(decided[p])} decisions")
                continue
            t, d = decided[p][0]
            lines.append(TranscriptLine(tuple(seq), p, t, d))
            values.add(d)
            if not gv[p].heard_of >> d & 1:
                violations.append(f"seq={seq} proc={p}: decided {d} without having heard of it")
        if len(values) > 1:
            violations.append(f"seq={seq}: disagreement {sorted(values)}")
    return SimulationResult(r, len(seqs), not violations, lines, violations)
