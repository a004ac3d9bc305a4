"""Random-hyperplane LSH kernels for cosine similarity."""
from itertools import combinations

import numpy as np
from numba import njit


def draw_hyperplanes(n_tables: int, n_hyperplanes: int, dim: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n_tables, n_hyperplanes, dim))


def signatures(X: np.ndarray, hyperplanes: np.ndarray) -> np.ndarray:
    """Bit signatures, shape (n_tables, n); bit b is set when x lies on the
    positive side of hyperplane b."""
    weights = np.left_shift(np.uint64(1), np.arange(hyperplanes.shape[1], dtype=np.uint64))
    codes = np.empty((hyperplanes.shape[0], X.shape[0]), dtype=np.uint64)
    for t, H in enumerate(hyperplanes):
        bits = (X @ H.T) > 0
        codes[t] = (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
    return codes


def probe_masks(n_hyperplanes: int, radius: int) -> np.ndarray:
    """XOR masks of every bucket within Hamming distance ``radius``."""
    masks = [0]
    for r in range(1, radius + 1):
        for bits in combinations(range(n_hyperplanes), r):
            masks.append(sum(1 << b for b in bits))
    return np.array(masks, dtype=np.uint64)


def bucket_tables(codes: np.ndarray):
    """Per-table sorted bucket keys with member ranges.

    Returns ``(keys, starts, members, offsets)``: table ``t`` owns
    ``keys[offsets[t]:offsets[t+1]]``; bucket ``b`` holds
    ``members[t, starts[b]:starts[b+1]]``.
    """
    n_tables, n = codes.shape
    members = np.empty((n_tables, n), dtype=np.int64)
    keys, starts, offsets = [], [], [0]
    for t in range(n_tables):
        order = np.argsort(codes[t], kind="stable")
        members[t] = order
        sorted_codes = codes[t, order]
        uniq, first = np.unique(sorted_codes, return_index=True)
        keys.append(uniq)
        starts.append(np.append(first, n))
        offsets.append(offsets[-1] + uniq.size)
    # starts are per-table; store them flattened alongside an offset per table
    flat_starts = np.concatenate(starts).astype(np.int64)
    return (
        np.concatenate(keys).astype(np.uint64),
        flat_starts,
        members,
        np.asarray(offsets, dtype=np.int64),
    )


@njit(cache=True)
def collect_candidates(q_codes, masks, keys, starts, members, offsets, n, exclude):
    """Union of probed buckets over all tables, CSR layout, ids ascending."""
    n_q, n_tables = q_codes.shape
    mark = np.zeros(n, dtype=np.bool_)
    indptr = np.zeros(n_q + 1, dtype=np.int64)
    buf = np.empty(16 * n, dtype=np.int64)
    size = 0
    for r in range(n_q):
        found = np.empty(n, dtype=np.int64)
        cnt = 0
        for t in range(n_tables):
            lo = offsets[t]
            hi = offsets[t + 1]
            tk = keys[lo:hi]
            # table t's bucket boundaries start after t earlier tables' sentinels
            st = starts[lo + t: hi + t + 1]
            for p in range(masks.shape[0]):
                code = q_codes[r, t] ^ masks[p]
                b = np.searchsorted(tk, code)
                if b < tk.shape[0] and tk[b] == code:
                    for a in range(st[b], st[b + 1]):
                        z = members[t, a]
                        if not mark[z] and z != exclude[r]:
                            mark[z] = True
                            found[cnt] = z
                            cnt += 1
        res = np.sort(found[:cnt])
        for a in range(cnt):
            mark[res[a]] = False
        if size + cnt > buf.shape[0]:
            grown = np.empty(2 * (size + cnt), dtype=np.int64)
            grown[:size] = buf[:size]
            buf = grown
        buf[size:size + cnt] = res
        size += cnt
        indptr[r + 1] = size
    return indptr, buf[:size]
