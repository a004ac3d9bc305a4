"""Approximate k-neighbor search: HNSW and random-hyperplane LSH.

Both backends return exact metric values for the ids they find; only the
choice of ids is approximate.
"""
from __future__ import annotations

import numpy as np

from ..core import NeighborGraph
from ._base import HNSW, ApproximateNeighbors, RandomProjectionLSH
from ._io import dumps_index, load_index, loads_index, save_index

__all__ = [
    "ApproximateNeighbors",
    "HNSW",
    "RandomProjectionLSH",
    "build",
    "query",
    "kneighbors_graph_ann",
    "recall",
    "save_index",
    "load_index",
    "dumps_index",
    "loads_index",
]

_BACKENDS = {"hnsw": HNSW, "rp_lsh": RandomProjectionLSH, "lsh": RandomProjectionLSH}


def build(X, backend="hnsw", metric="euclidean", **config) -> ApproximateNeighbors:
    """Build an index over the rows of ``X``.

    ``config`` is forwarded to the backend class, e.g. ``M``,
    ``ef_construction``, ``ef_search``, ``random_state`` for HNSW or
    ``n_tables``, ``n_hyperplanes``, ``probe_radius`` for LSH.
    """
    try:
        cls = _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}; expected 'hnsw' or 'rp_lsh'") from None
    return cls(metric=metric, **config).fit(X)


def query(index: ApproximateNeighbors, q, k: int, ef_search=None, exclude_id=None):
    """k nearest indexed points of a single row, as ``[(id, dissimilarity), ...]``.

    ``exclude_id`` drops that indexed id from the result (self-exclusion).
    """
    if ef_search is not None and isinstance(index, HNSW):
        if ef_search < k:
            raise ValueError(f"ef_search={ef_search} must be >= k={k}")
        index = _with_ef(index, ef_search)
    q = np.asarray(q, dtype=np.float64).reshape(1, -1)
    if exclude_id is None:
        dist, ind = index.kneighbors(q, k)
        return list(zip(ind[0].tolist(), dist[0].tolist()))
    dist, ind = index.kneighbors(q, min(k + 1, index.n_samples_fit_))
    pairs = [(i, d) for i, d in zip(ind[0].tolist(), dist[0].tolist()) if i != exclude_id]
    return pairs[:k]


def _with_ef(index: HNSW, ef_search: int) -> HNSW:
    if index.ef_search == ef_search:
        return index
    clone = HNSW.__new__(HNSW)
    clone.__dict__.update(index.__dict__)
    clone.ef_search = int(ef_search)
    return clone


def kneighbors_graph_ann(index: ApproximateNeighbors, n_candidates: int,
                         ef_search=None) -> NeighborGraph:
    """Self-excluding candidate graph of all indexed points."""
    if ef_search is not None and isinstance(index, HNSW):
        index = _with_ef(index, ef_search)
    return index.kneighbors_graph(n_candidates)


def recall(approx_ind, exact_ind) -> float:
    """Mean fraction of true neighbors retrieved per query."""
    approx_ind = np.asarray(approx_ind)
    exact_ind = np.asarray(exact_ind)
    hits = sum(np.intersect1d(a, e).size for a, e in zip(approx_ind, exact_ind))
    return hits / exact_ind.size
