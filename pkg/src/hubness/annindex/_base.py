"""Approximate nearest neighbor indexes with a scikit-learn style surface."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..core import (
    NeighborGraph,
    _cdist,
    check_features,
    check_metric,
)
from ..exceptions import DimensionMismatchError, KTooLargeError, UnsupportedMetricError
from . import _hnsw, _lsh

__all__ = ["ApproximateNeighbors", "HNSW", "RandomProjectionLSH"]


class ApproximateNeighbors(BaseEstimator):
    """Shared query plumbing: candidate retrieval is approximate, distances
    of returned ids are exact metric values."""

    _supported_metrics = ("euclidean", "squared_euclidean", "cosine")

    def fit(self, X, y=None):
        metric = check_metric(self.metric)
        if metric not in self._supported_metrics:
            raise UnsupportedMetricError(
                f"{type(self).__name__} supports {self._supported_metrics}, got {metric!r}"
            )
        X = check_features(X, metric)
        self.metric_ = metric
        self.X_ = X
        self.n_samples_fit_, self.n_features_in_ = X.shape
        self._build(X)
        return self

    def kneighbors(self, X=None, n_neighbors=10, return_distance=True):
        """k approximate nearest neighbors.

        With ``X=None`` the indexed points themselves are queried and each
        point's own id is excluded from its result.
        """
        check_is_fitted(self, "X_")
        n = self.n_samples_fit_
        if X is None:
            Q = self.X_
            exclude = np.arange(n, dtype=np.int64)
            available = n - 1
        else:
            Q = check_features(X, self.metric_, name="Q")
            if Q.shape[1] != self.n_features_in_:
                raise DimensionMismatchError(
                    f"query dimensionality {Q.shape[1]} != indexed {self.n_features_in_}"
                )
            exclude = np.full(Q.shape[0], -1, dtype=np.int64)
            available = n
        k = int(n_neighbors)
        if k < 1:
            raise ValueError(f"n_neighbors must be >= 1, got {n_neighbors}")
        if k > available:
            raise KTooLargeError(f"n_neighbors={k} exceeds the {available} available points")
        cand = self._candidates(Q, exclude, k)
        ind = np.empty((Q.shape[0], k), dtype=np.int64)
        dist = np.empty((Q.shape[0], k), dtype=np.float64)
        for r, ids in enumerate(cand):
            if ids.size < k:
                ids = self._fallback_ids(exclude[r])
            d = _cdist(Q[r: r + 1], self.X_[ids], self.metric_)[0]
            order = np.lexsort((ids, d))[:k]
            ind[r] = ids[order]
            dist[r] = d[order]
        if return_distance:
            return dist, ind
        return ind

    def kneighbors_graph(self, n_neighbors=10, X=None) -> NeighborGraph:
        dist, ind = self.kneighbors(X, n_neighbors)
        return NeighborGraph(ind, dist, self.n_samples_fit_)

    def _fallback_ids(self, exclude):
        ids = np.arange(self.n_samples_fit_, dtype=np.int64)
        return ids[ids != exclude]


class HNSW(ApproximateNeighbors):
    """Hierarchical navigable small-world graph index.

    Parameters
    ----------
    M : int, default=16
        Links per node on upper layers; layer 0 keeps up to ``2 * M``.
    ef_construction : int, default=200
        Beam width while inserting.
    ef_search : int, default=50
        Beam width at query time, raised to ``n_neighbors`` (+1 for
        self-excluding queries) when smaller.
    metric : {"euclidean", "squared_euclidean", "cosine"}, default="euclidean"
    random_state : int, default=0
        Seed of the level assignment. The build is single-threaded, so a
        fixed seed gives an identical graph.
    """

    backend = "hnsw"

    def __init__(self, M=16, ef_construction=200, ef_search=50, metric="euclidean",
                 random_state=0):
        self.M = M
        self.ef_construction = ef_construction
        self.ef_search = ef_search
        self.metric = metric
        self.random_state = random_state

    def _check_config(self):
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")
        if self.ef_construction < self.M:
            raise ValueError(
                f"ef_construction must be >= M, got {self.ef_construction} < {self.M}"
            )

    def _internal(self, X):
        if self.metric_ == "cosine":
            return np.ascontiguousarray(X / np.linalg.norm(X, axis=1, keepdims=True)), _hnsw.KIND_IP
        return X, _hnsw.KIND_L2

    def _build(self, X):
        self._check_config()
        V, kind = self._internal(X)
        self.levels_ = _hnsw.draw_levels(X.shape[0], self.M, self.random_state)
        L0, c0, Lup, cup, ep, top = _hnsw.build_graph(
            V, kind, self.levels_, int(self.M), int(self.ef_construction)
        )
        self._set_graph(L0, c0, Lup, cup, ep, top)

    def _set_graph(self, L0, c0, Lup, cup, ep, top):
        self.links0_, self.counts0_ = L0, c0
        self.links_up_, self.counts_up_ = Lup, cup
        self.entry_point_, self.max_level_ = int(ep), int(top)
        self._V, self._kind = self._internal(self.X_)

    def _candidates(self, Q, exclude, k):
        Qv = Q
        if self.metric_ == "cosine":
            Qv = np.ascontiguousarray(Q / np.linalg.norm(Q, axis=1, keepdims=True))
        ef = max(int(self.ef_search), k + int(np.any(exclude >= 0)))
        ef = min(ef, self.n_samples_fit_)
        ids, _ = _hnsw.search_batch(
            self._V, self._kind, Qv, ef, self.links0_, self.counts0_,
            self.links_up_, self.counts_up_, self.entry_point_, self.max_level_,
        )
        out = []
        for r in range(ids.shape[0]):
            row = ids[r]
            row = row[(row >= 0) & (row != exclude[r])]
            out.append(row)
        return out


class RandomProjectionLSH(ApproximateNeighbors):
    """Random-hyperplane LSH for cosine similarity.

    Candidates are the union over all tables of every bucket within Hamming
    distance ``probe_radius`` of the query's signature; they are rescored
    with the exact cosine distance. Queries that collect fewer than
    ``n_neighbors`` candidates fall back to a linear scan.

    Parameters
    ----------
    n_tables : int, default=20
    n_hyperplanes : int, default=12
        Signature bits per table (at most 63).
    probe_radius : int, default=1
        0 probes only the query's own bucket.
    metric : {"cosine"}, default="cosine"
    random_state : int, default=0
    """

    backend = "rp_lsh"
    _supported_metrics = ("cosine",)

    def __init__(self, n_tables=20, n_hyperplanes=12, probe_radius=1, metric="cosine",
                 random_state=0):
        self.n_tables = n_tables
        self.n_hyperplanes = n_hyperplanes
        self.probe_radius = probe_radius
        self.metric = metric
        self.random_state = random_state

    def _build(self, X):
        if self.n_tables < 1 or self.n_hyperplanes < 1:
            raise ValueError("n_tables and n_hyperplanes must be >= 1")
        if self.n_hyperplanes > 63:
            raise ValueError("n_hyperplanes must be <= 63")
        if not 0 <= self.probe_radius <= self.n_hyperplanes:
            raise ValueError("probe_radius must lie in [0, n_hyperplanes]")
        self.hyperplanes_ = _lsh.draw_hyperplanes(
            self.n_tables, self.n_hyperplanes, X.shape[1], self.random_state
        )
        self._set_codes(_lsh.signatures(X, self.hyperplanes_))

    def _set_codes(self, codes):
        self.codes_ = codes
        self._tables = _lsh.bucket_tables(codes)
        self._masks = _lsh.probe_masks(self.n_hyperplanes, self.probe_radius)

    def _candidates(self, Q, exclude, k):
        q_codes = np.ascontiguousarray(_lsh.signatures(Q, self.hyperplanes_).T)
        keys, starts, members, offsets = self._tables
        indptr, flat = _lsh.collect_candidates(
            q_codes, self._masks, keys, starts, members, offsets,
            self.n_samples_fit_, exclude,
        )
        return [flat[indptr[r]: indptr[r + 1]] for r in range(Q.shape[0])]

