"""Hot kernels over facet/vertex tables.

Each kernel exists twice: a numba ``@njit`` version and a pure numpy/scipy
version. Set ``MATOPO_DISABLE_NUMBA=1`` to force the numpy path; it is also
used when numba cannot be imported. Both produce identical arrays.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("MATOPO_DISABLE_NUMBA", "") not in ("1", "true", "yes")


def _relabel(raw: np.ndarray) -> np.ndarray:
    """Renumber labels in order of first appearance."""
    _, first, inv = np.unique(raw, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inv.ravel()].astype(np.int64)


# ---------------------------------------------------------------- numpy path


def facet_components_np(facets: np.ndarray, nverts: int) -> np.ndarray:
    nf, n = facets.shape
    if nf == 0:
        return np.zeros(0, dtype=np.int64)
    rows = np.repeat(np.arange(nf, dtype=np.int64), n)
    cols = nf + facets.ravel().astype(np.int64)
    size = nf + nverts
    adj = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(size, size))
    _, lab = connected_components(adj, directed=False)
    return _relabel(lab[:nf])


def component_and_np(labels: np.ndarray, values: np.ndarray, ncomp: int, full: int) -> np.ndarray:
    out = np.full(ncomp, full, dtype=np.int64)
    np.bitwise_and.at(out, labels, values.astype(np.int64))
    return out


def closure_np(
    facets: np.ndarray, hb: np.ndarray, fidx: np.ndarray, seeds: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    n = facets.shape[1]
    heard = hb[facets[fidx]].astype(np.int64)  # (m, n)
    shifts = np.arange(n, dtype=np.int64)
    seeds = seeds.astype(np.int64)

    def spread(s: np.ndarray) -> np.ndarray:
        member = (s[:, None] >> shifts) & 1
        return np.bitwise_or.reduce(np.where(member == 1, heard, 0), axis=1)

    collective = spread(seeds)
    s = seeds | collective
    while True:
        t = s | spread(s)
        if np.array_equal(t, s):
            return collective, s
        s = t


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    @njit(cache=True)
    def _facet_components_nb(facets, nverts):
        nf, n = facets.shape
        parent = np.arange(nf)
        first = np.full(nverts, -1, dtype=np.int64)
        for f in range(nf):
            for i in range(n):
                v = facets[f, i]
                if first[v] < 0:
                    first[v] = f
                else:
                    a = _find(parent, f)
                    b = _find(parent, first[v])
                    if a != b:
                        if a < b:
                            parent[b] = a
                        else:
                            parent[a] = b
        lab = np.empty(nf, dtype=np.int64)
        rank = np.full(nf, -1, dtype=np.int64)
        nxt = 0
        for f in range(nf):
            r = _find(parent, f)
            if rank[r] < 0:
                rank[r] = nxt
                nxt += 1
            lab[f] = rank[r]
        return lab

    @njit(cache=True)
    def _component_and_nb(labels, values, ncomp, full):
        out = np.full(ncomp, full, dtype=np.int64)
        for i in range(labels.shape[0]):
            out[labels[i]] &= values[i]
        return out

    @njit(cache=True)
    def _closure_nb(facets, hb, fidx, seeds):
        m = fidx.shape[0]
        n = facets.shape[1]
        collective = np.zeros(m, dtype=np.int64)
        closed = np.zeros(m, dtype=np.int64)
        for t in range(m):
            f = fidx[t]
            s = seeds[t]
            c = 0
            for i in range(n):
                if (s >> i) & 1:
                    c |= hb[facets[f, i]]
            collective[t] = c
            s |= c
            while True:
                u = s
                for i in range(n):
                    if (s >> i) & 1:
                        u |= hb[facets[f, i]]
                if u == s:
                    break
                s = u
            closed[t] = s
        return collective, closed


def facet_components_nb(facets: np.ndarray, nverts: int) -> np.ndarray:
    return _facet_components_nb(np.ascontiguousarray(facets, dtype=np.int64), int(nverts))


def component_and_nb(labels: np.ndarray, values: np.ndarray, ncomp: int, full: int) -> np.ndarray:
    return _component_and_nb(
        np.ascontiguousarray(labels, dtype=np.int64),
        np.ascontiguousarray(values, dtype=np.int64),
        int(ncomp),
        int(full),
    )


def closure_nb(facets, hb, fidx, seeds):
    return _closure_nb(
        np.ascontiguousarray(facets, dtype=np.int64),
        np.ascontiguousarray(hb, dtype=np.int64),
        np.ascontiguousarray(fidx, dtype=np.int64),
        np.ascontiguousarray(seeds, dtype=np.int64),
    )


BACKENDS = {
    "numpy": {
        "facet_components": facet_components_np,
        "component_and": component_and_np,
        "closure": closure_np,
    }
}
if HAVE_NUMBA:
    BACKENDS["numba"] = {
        "facet_components": facet_components_nb,
        "component_and": component_and_nb,
        "closure": closure_nb,
    }


def backend_name() -> str:
    return "numba" if numba_enabled() else "numpy"


def facet_components(facets: np.ndarray, nverts: int) -> np.ndarray:
    return BACKENDS[backend_name()]["facet_components"](facets, nverts)


def component_and(labels: np.ndarray, values: np.ndarray, ncomp: int, full: int) -> np.ndarray:
    return BACKENDS[backend_name()]["component_and"](labels, values, ncomp, full)


def closure(facets, hb, fidx, seeds) -> tuple[np.ndarray, np.ndarray]:
    """For each (facet, seed) pair: collective heard-of of the seed members, and
    the least superset closed under heard-of within that facet."""
    fidx = np.asarray(fidx, dtype=np.int64)
    if fidx.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return BACKENDS[backend_name()]["closure"](facets, hb, fidx, np.asarray(seeds, dtype=np.int64))
