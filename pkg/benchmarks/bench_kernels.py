"""Time the numba kernels against the numpy/scipy fallback on real facet tables.

    python benchmarks/bench_kernels.py [--rounds 4] [--repeat 5]

Both backends are called directly, so the MATOPO_DISABLE_NUMBA flag does not
matter here. Results are checked for equality before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from matopo import _accel
from matopo.catalog import load_example
from matopo.complex import build


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(rounds: int):
    for name, r in (("2c", rounds + 2), ("iis:3", rounds), ("full:3", 2)):
        adv = load_example(name).adversary
        pc = build(adv, r, allow_unrooted=True)
        yield f"{name} r={r}", pc


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if "numba" not in _accel.BACKENDS:
        raise SystemExit("numba is not importable; nothing to compare")
    nb, npb = _accel.BACKENDS["numba"], _accel.BACKENDS["numpy"]

    print(f"{'workload':<16}{'kernel':<18}{'facets':>8}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}")
    for label, pc in workloads(args.rounds):
        facets, hb, nv = pc.facets, pc.top.hb, pc.num_vertices
        lab = npb["facet_components"](facets, nv)
        ncomp = int(lab.max()) + 1
        vals = hb[facets].min(axis=1)
        fidx = np.arange(facets.shape[0])
        seeds = np.array([1 << (f % pc.n) for f in range(facets.shape[0])], dtype=np.int64)
        cases = {
            "facet_components": (facets, nv),
            "component_and": (lab, vals, ncomp, pc.full),
            "closure": (facets, hb, fidx, seeds),
        }
        for kernel, call_args in cases.items():
            a, b = npb[kernel](*call_args), nb[kernel](*call_args)  # also warms the jit
            same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else np.array_equal(a, b)
            assert same, f"{kernel} backends disagree on {label}"
            t_np = _best(lambda: npb[kernel](*call_args), args.repeat)
            t_nb = _best(lambda: nb[kernel](*call_args), args.repeat)
            print(f"{label:<16}{kernel:<18}{facets.shape[0]:>8}{t_np * 1e3:>11.3f}{t_nb * 1e3:>11.3f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
