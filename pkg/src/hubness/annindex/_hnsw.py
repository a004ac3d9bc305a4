"""Hierarchical navigable small-world graph kernels.

The graph lives in flat integer arrays so both build and search run in
nopython mode. Searches use an internal surrogate distance that preserves
neighbor order (squared L2 for Euclidean metrics, ``1 - dot`` on normalized
vectors for cosine); callers rescore the returned ids with the true metric.
"""
from heapq import heappop, heappush

import numpy as np
from numba import njit

KIND_L2 = 0
KIND_IP = 1


@njit(cache=True)
def _dist(V, i, q, kind):
    s = 0.0
    if kind == KIND_L2:
        for t in range(V.shape[1]):
            diff = V[i, t] - q[t]
            s += diff * diff
        return s
    for t in range(V.shape[1]):
        s += V[i, t] * q[t]
    return 1.0 - s


@njit(cache=True)
def _search_layer(V, kind, q, ep_ids, ep_d, ef, links, counts, visited, tag):
    """Beam search on one layer; returns up to ``ef`` ids sorted by (dist, id)."""
    cand = [(ep_d[0], ep_ids[0])]
    # max-heap via negation; on equal distance the larger id is evicted first
    res = [(-ep_d[0], -ep_ids[0])]
    visited[ep_ids[0]] = tag
    for a in range(1, ep_ids.shape[0]):
        visited[ep_ids[a]] = tag
        heappush(cand, (ep_d[a], ep_ids[a]))
        heappush(res, (-ep_d[a], -ep_ids[a]))
        if len(res) > ef:
            heappop(res)
    while len(cand) > 0:
        d, c = heappop(cand)
        if d > -res[0][0] and len(res) >= ef:
            break
        for m in range(counts[c]):
            e = links[c, m]
            if visited[e] == tag:
                continue
            visited[e] = tag
            de = _dist(V, e, q, kind)
            if len(res) < ef or de < -res[0][0]:
                heappush(cand, (de, e))
                heappush(res, (-de, -e))
                if len(res) > ef:
                    heappop(res)
    m = len(res)
    ids = np.empty(m, dtype=np.int64)
    ds = np.empty(m, dtype=np.float64)
    for a in range(m - 1, -1, -1):
        nd, ne = heappop(res)
        ids[a] = -ne
        ds[a] = -nd
    return ids, ds


@njit(cache=True)
def _select_neighbors(V, kind, cand_ids, cand_d, max_conn):
    """Diversity heuristic: keep a candidate only if it is closer to the base
    than to every already kept neighbor. Candidates must be sorted."""
    out = np.empty(max_conn, dtype=np.int64)
    cnt = 0
    for a in range(cand_ids.shape[0]):
        c = cand_ids[a]
        good = True
        for b in range(cnt):
            if _dist(V, out[b], V[c], kind) < cand_d[a]:
                good = False
                break
        if good:
            out[cnt] = c
            cnt += 1
            if cnt == max_conn:
                break
    return out[:cnt]


@njit(cache=True)
def _connect(V, kind, e, new, links, counts, max_conn):
    """Add edge e -> new, re-pruning e's list when it overflows."""
    if counts[e] < max_conn:
        links[e, counts[e]] = new
        counts[e] += 1
        return
    m = counts[e] + 1
    ids = np.empty(m, dtype=np.int64)
    for a in range(m - 1):
        ids[a] = links[e, a]
    ids[m - 1] = new
    ids = np.sort(ids)
    ds = np.empty(m, dtype=np.float64)
    for a in range(m):
        ds[a] = _dist(V, ids[a], V[e], kind)
    order = np.argsort(ds, kind="mergesort")
    keep = _select_neighbors(V, kind, ids[order], ds[order], max_conn)
    for a in range(keep.shape[0]):
        links[e, a] = keep[a]
    counts[e] = keep.shape[0]


@njit(cache=True)
def build_graph(V, kind, levels, M, ef_construction):
    n = V.shape[0]
    M0 = 2 * M
    max_level = 0
    for i in range(n):
        if levels[i] > max_level:
            max_level = levels[i]
    L0 = np.full((n, M0), -1, dtype=np.int64)
    c0 = np.zeros(n, dtype=np.int64)
    Lup = np.full((max(max_level, 1), n, M), -1, dtype=np.int64)
    cup = np.zeros((max(max_level, 1), n), dtype=np.int64)
    visited = np.zeros(n, dtype=np.int64)
    tag = 0
    ep = 0
    top = levels[0]
    for i in range(1, n):
        q = V[i]
        li = levels[i]
        cur = np.array([ep], dtype=np.int64)
        cur_d = np.array([_dist(V, ep, q, kind)])
        for lc in range(top, li, -1):
            tag += 1
            cur, cur_d = _search_layer(V, kind, q, cur[:1], cur_d[:1], 1,
                                       Lup[lc - 1], cup[lc - 1], visited, tag)
        for lc in range(min(top, li), -1, -1):
            tag += 1
            if lc == 0:
                W, Wd = _search_layer(V, kind, q, cur, cur_d, ef_construction,
                                      L0, c0, visited, tag)
                nb = _select_neighbors(V, kind, W, Wd, M)
                for a in range(nb.shape[0]):
                    L0[i, a] = nb[a]
                c0[i] = nb.shape[0]
                for a in range(nb.shape[0]):
                    _connect(V, kind, nb[a], i, L0, c0, M0)
            else:
                W, Wd = _search_layer(V, kind, q, cur, cur_d, ef_construction,
                                      Lup[lc - 1], cup[lc - 1], visited, tag)
                nb = _select_neighbors(V, kind, W, Wd, M)
                for a in range(nb.shape[0]):
                    Lup[lc - 1, i, a] = nb[a]
                cup[lc - 1, i] = nb.shape[0]
                for a in range(nb.shape[0]):
                    _connect(V, kind, nb[a], i, Lup[lc - 1], cup[lc - 1], M)
            cur, cur_d = W, Wd
        if li > top:
            top = li
            ep = i
    return L0, c0, Lup, cup, ep, top


@njit(cache=True)
def search_batch(V, kind, Q, ef, L0, c0, Lup, cup, ep, top):
    """Beam-search every query row; returns (ids, dists) padded with -1 / inf."""
    n = V.shape[0]
    n_q = Q.shape[0]
    out_ids = np.full((n_q, ef), -1, dtype=np.int64)
    out_d = np.full((n_q, ef), np.inf)
    visited = np.zeros(n, dtype=np.int64)
    tag = 0
    for r in range(n_q):
        q = Q[r]
        cur = np.array([ep], dtype=np.int64)
        cur_d = np.array([_dist(V, ep, q, kind)])
        for lc in range(top, 0, -1):
            tag += 1
            cur, cur_d = _search_layer(V, kind, q, cur, cur_d, 1,
                                       Lup[lc - 1], cup[lc - 1], visited, tag)
        tag += 1
        W, Wd = _search_layer(V, kind, q, cur, cur_d, ef, L0, c0, visited, tag)
        m = W.shape[0]
        out_ids[r, :m] = W
        out_d[r, :m] = Wd
    return out_ids, out_d


def draw_levels(n: int, M: int, seed) -> np.ndarray:
    """Geometric layer assignment with normalization 1/ln(M)."""
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # in (0, 1]
    return np.floor(-np.log(u) / np.log(M)).astype(np.int64)
