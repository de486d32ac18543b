"""Cross-validation harness: decision procedures against the brute-force oracle,
plus the structural invariants of complexes and border components."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from .border import (
    border_arrays,
    bruteforce_border_component,
    border_subcomplex_direct,
    closure_in_order,
    face_in_border,
    face_in_direct_border,
    facet_subsets,
)
from .complex import BudgetExceededError, ProtocolComplex, boundary_consistency_violations, build, carrier_facets
from .digraph import Adversary, iter_all_graphs, is_rooted, random_rooted_adversary, rooted_graph_count
from .formats import format_adversary
from .nerve import nerve_decide
from .oracle import analyze_complex, extract_decision_map, simulate
from .rrg import rrg_decide


@dataclass
class CaseResult:
    index: int
    n: int
    graphs: int
    nerve_solvable: bool
    nerve_iterations: int
    rrg_solvable: bool
    rrg_level: int
    rrg_iterations: int
    rrg_bound: int | None
    min_rounds: int | None
    checked_rounds: int
    simulated_sequences: int = 0
    violations: list[str] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)
    text: str = ""


@dataclass
class VerifyOptions:
    cap: int = 6
    budget: int = 200_000
    b_rounds: int = 2  # rounds on which border components are brute-forced
    bc_rounds: int = 2  # rounds for boundary-consistency checks
    bc_pairs: int = 60  # sampled carrier pairs when exhaustive is too large
    direct_border: bool = True
    simulate: bool = True


def _profile(adv: Adversary, upto: int, opts: VerifyOptions) -> list[ProtocolComplex]:
    out = []
    for r in range(upto + 1):
        try:
            out.append(build(adv, r, opts.budget))
        except BudgetExceededError:
            break
    return out


def _check_border(pc: ProtocolComplex, res: CaseResult) -> None:
    arr = border_arrays(pc)
    full = pc.full
    order = list(range(pc.n))
    rev = order[::-1]
    for f, root, coll, closed in zip(arr.facet.tolist(), arr.root.tolist(), arr.collective.tolist(), arr.closed.tolist()):
        proper = coll != full
        if pc.rounds == 1 and proper != (root != full):
            res.violations.append(f"r=1 facet {f}: properness differs from root != all")
        if not proper:
            continue
        brute = bruteforce_border_component(pc, f)
        if brute != closed:
            res.violations.append(f"r={pc.rounds} facet {f}: fixpoint {closed:b} vs brute force {brute:b}")
        for ordr in (order, rev):
            if closure_in_order(pc, f, root, ordr) != closed:
                res.violations.append(f"r={pc.rounds} facet {f}: closure depends on order")
        if root & ~closed:
            res.violations.append(f"r={pc.rounds} facet {f}: root not inside B(F)")
        # R(F) <= B(F) <= F & Bd(P_r) and B(F) != F: asserted at r=1; for r >= 2
        # counterexamples exist (B(F) can absorb every process), so those are findings
        sink = res.violations if pc.rounds == 1 else res.findings
        off = [v for v in pc.face(f, closed) if not face_in_border([v], pc)]
        if off:
            sink.append(f"r={pc.rounds} facet {f}: {len(off)} B(F) vertices off the border")
        if closed == full:
            sink.append(f"r={pc.rounds} facet {f}: proper facet with B(F) = F")
        if pc.collective_heard(pc.face(f, closed)) & ~closed:
            res.violations.append(f"r={pc.rounds} facet {f}: B(F) not closed")


def _check_structure(pc: ProtocolComplex, res: CaseResult, opts: VerifyOptions, rng: np.random.Generator) -> None:
    if pc.rounds == 0:
        return
    nprev = pc.num_facets // pc.k
    total = nprev * (nprev - 1) // 2
    if pc.n <= 3 or total <= opts.bc_pairs:
        pairs: Iterable[tuple[int, int]] = itertools.combinations(range(nprev), 2)
    else:
        raw = rng.integers(0, nprev, size=(opts.bc_pairs, 2))
        pairs = [(int(a), int(b)) for a, b in raw if a != b]
    bad = boundary_consistency_violations(pc, pairs)
    if bad:
        res.violations.append(f"r={pc.rounds}: boundary consistency fails for carriers {bad[:3]}")
    if pc.num_facets <= 256:
        prev = carrier_facets(pc)
        for a, b in pc.facet_adjacency():
            ca, cb = a // pc.k, b // pc.k
            if ca != cb and not np.any(prev[ca] == prev[cb]):
                res.violations.append(f"r={pc.rounds}: facets {a},{b} adjacent but carriers are not")
                break
    if not all(pc.colors(pc.facets[f]) == pc.full for f in range(min(pc.num_facets, 64))):
        res.violations.append("facet not chromatic")


def _check_direct_border(pc: ProtocolComplex, res: CaseResult) -> None:
    maximal = border_subcomplex_direct(pc)
    for f in range(pc.num_facets):
        for face in facet_subsets(pc, f):
            if face_in_border(face, pc) != face_in_direct_border(face, maximal):
                res.violations.append(f"r={pc.rounds} facet {f}: border predicate differs from direct construction")
                return


def check_adversary(adv: Adversary, index: int = 0, opts: VerifyOptions | None = None, seed: int = 0) -> CaseResult:
    opts = opts or VerifyOptions()
    rng = np.random.default_rng(seed)
    nv = nerve_decide(adv)
    rv = rrg_decide(adv)
    res = CaseResult(
        index, adv.n, len(adv), nv.solvable, nv.iterations, rv.solvable, rv.level,
        rv.iterations, rv.k_round_bound, None, -1, text=format_adversary(adv),
    )
    if nv.solvable != rv.solvable:
        res.violations.append(f"nerve says {nv.solvable}, rrg says {rv.solvable}")
    if rv.level < nv.iterations:
        res.violations.append(f"rrg decided at level {rv.level} before nerve iteration {nv.iterations}")

    complexes = _profile(adv, opts.cap, opts)
    reports = []
    for pc in complexes:
        rep = analyze_complex(pc)
        reports.append(rep)
        if not rep.kernels_nested():
            res.violations.append(f"r={pc.rounds}: vertex kernel not inside facet kernel")
        if rep.strict_solvable and not rep.border_solvable:
            res.violations.append(f"r={pc.rounds}: strict but not border solvable")
        if 1 <= pc.rounds <= opts.b_rounds:
            _check_border(pc, res)
        if pc.rounds <= opts.bc_rounds:
            _check_structure(pc, res, opts, rng)
        if opts.direct_border and pc.n == 3 and pc.rounds <= 2:
            _check_direct_border(pc, res)
    res.checked_rounds = len(reports) - 1
    strict = [r.strict_solvable for r in reports]
    for r in range(len(strict) - 1):
        if strict[r] and not strict[r + 1]:
            res.violations.append(f"strict solvability lost between r={r} and r={r + 1}")
    res.min_rounds = strict.index(True) if True in strict else None
    for r, rep in enumerate(reports):
        # at r=0 no facet is proper, so border solvability is vacuous there
        if r >= 1 and rep.border_solvable and not rep.strict_solvable:
            horizon = r + adv.n - 1
            if horizon < len(strict) and not any(strict[r:horizon + 1]):
                res.findings.append(f"border solvable at r={r} but not strict by r={horizon}")

    if nv.solvable:
        if res.min_rounds is None:
            res.violations.append(f"procedures say solvable, oracle finds no round <= {res.checked_rounds}")
        else:
            if rv.k_round_bound is not None and rv.k_round_bound < res.min_rounds:
                res.violations.append(f"rrg bound {rv.k_round_bound} below oracle minimum {res.min_rounds}")
            if rv.level * (adv.n - 1) < res.min_rounds:
                res.findings.append(
                    f"level-index bound {rv.level}*(n-1) below oracle minimum {res.min_rounds}"
                )
            if opts.simulate:
                dm = extract_decision_map(adv, res.min_rounds, opts.budget)
                sim = simulate(adv, dm, "exhaustive")
                res.simulated_sequences = sim.sequences
                if not sim.passed:
                    res.violations.append("simulation failed: " + "; ".join(sim.violations[:3]))
    elif res.min_rounds is not None:
        res.violations.append(f"procedures say unsolvable, oracle solves at r={res.min_rounds}")
    return res


def minimize(adv: Adversary, failing: Callable[[Adversary], bool]) -> Adversary:
    """Greedily drop graphs while the failure persists."""
    cur = adv
    changed = True
    while changed and len(cur) > 1:
        changed = False
        for i in range(len(cur)):
            cand = Adversary(cur.graphs[:i] + cur.graphs[i + 1:], cur.names, cur.graph_names[:i] + cur.graph_names[i + 1:])
            if failing(cand):
                cur, changed = cand, True
                break
    return cur


def random_corpus(ns: list[int], max_graphs: int, count: int, seed: int) -> list[Adversary]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.choice(ns))
        kmax = min(max_graphs, rooted_graph_count(n))
        k = int(rng.integers(1, kmax + 1))
        out.append(random_rooted_adversary(n, k, rng))
    return out


def exhaustive_corpus(n: int, max_graphs: int) -> list[Adversary]:
    rooted = [g for g in iter_all_graphs(n) if is_rooted(g)]
    return [
        Adversary(combo)
        for k in range(1, max_graphs + 1)
        for combo in itertools.combinations(rooted, k)
    ]


@dataclass
class CorpusReport:
    cases: list[CaseResult]

    @property
    def violations(self) -> int:
        return sum(len(c.violations) for c in self.cases)

    def gap_cases(self) -> list[CaseResult]:
        return [c for c in self.cases if c.nerve_solvable and c.min_rounds is not None and c.nerve_iterations < c.min_rounds]

    def bound_holds(self) -> bool:
        return all(
            c.rrg_bound is not None and c.rrg_bound >= c.min_rounds
            for c in self.cases
            if c.nerve_solvable and c.min_rounds is not None
        )

    def level_bound_failures(self) -> int:
        return sum(1 for c in self.cases if c.rrg_solvable and c.min_rounds is not None and c.rrg_level * (c.n - 1) < c.min_rounds)

    def summary(self) -> dict:
        solv = [c for c in self.cases if c.nerve_solvable]
        return {
            "adversaries": len(self.cases),
            "solvable": len(solv),
            "unsolvable": len(self.cases) - len(solv),
            "violations": self.violations,
            "gap_cases": len(self.gap_cases()),
            "max_gap": max((c.min_rounds - c.nerve_iterations for c in self.gap_cases()), default=0),
            "rrg_bound_holds": self.bound_holds(),
            "level_index_bound_failures": self.level_bound_failures(),
            "findings": sum(len(c.findings) for c in self.cases),
            "simulated_sequences": sum(c.simulated_sequences for c in self.cases),
        }

    def to_dict(self) -> dict:
        return {"schema": "ma-topo/1", "kind": "verify", "summary": self.summary(), "cases": [asdict(c) for c in self.cases]}


def run_corpus(advs: list[Adversary], opts: VerifyOptions | None = None, seed: int = 0, progress: Callable[[CaseResult], None] | None = None) -> CorpusReport:
    cases = []
    for i, adv in enumerate(advs):
        res = check_adversary(adv, i, opts, seed + i)
        cases.append(res)
        if progress:
            progress(res)
    return CorpusReport(cases)

