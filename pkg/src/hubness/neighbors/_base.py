"""Shared machinery of the neighbors-based estimators.

Neighbor retrieval runs in two stages. A candidate stage finds ``s``
candidate training objects per query, either all of them (``algorithm=
"exact"``) or via an approximate index. A reduction stage then rescales
the candidate distances with a fitted hubness reducer. Hubness statistics
always come from the training data alone.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..annindex import HNSW, RandomProjectionLSH
from ..core import (
    MAX_DENSE_SAMPLES,
    NeighborGraph,
    check_features,
    check_metric,
    kneighbors_exact,
    kneighbors_query,
    query_dissimilarity,
)
from ..exceptions import DimensionMismatchError, KTooLargeError, MatrixTooLargeError
from ..reduction import check_reduction_method, make_reducer

VALID_ALGORITHMS = ("exact", "hnsw", "lsh")

_ALGORITHM_ALIASES = {
    "exact": "exact",
    "brute": "exact",
    "auto": "exact",
    "hnsw": "hnsw",
    "lsh": "lsh",
    "rp_lsh": "lsh",
}

_INDEX_PARAMS = {
    "hnsw": ("M", "ef_construction", "ef_search", "random_state"),
    "lsh": ("n_tables", "n_hyperplanes", "probe_radius", "random_state"),
}

DEFAULT_CANDIDATES = 100


class NeighborsBase(BaseEstimator):
    """Parameters common to every estimator in this package.

    Parameters
    ----------
    n_neighbors : int, default=5
    metric : {"euclidean", "squared_euclidean", "cosine"}, default="euclidean"
    hubness : str or None, default=None
        Hubness reduction: "mp"/"mutual_proximity" (empiric), "mp_gauss",
        "ls"/"local_scaling", "nicdm", "dsl"/"dissim_local", or None.
    hubness_params : dict, optional
        ``{"k_local": int}``, the neighborhood of LS/NICDM scales and
        DisSimLocal centroids (default 5).
    algorithm : {"exact", "hnsw", "lsh"}, default="exact"
    algorithm_params : dict, optional
        Index configuration plus ``n_candidates``, the number of candidates
        retrieved per object before hubness reduction (default 100).
    """

    def __init__(self, n_neighbors=5, metric="euclidean", hubness=None, hubness_params=None,
                 algorithm="exact", algorithm_params=None):
        self.n_neighbors = n_neighbors
        self.metric = metric
        self.hubness = hubness
        self.hubness_params = hubness_params
        self.algorithm = algorithm
        self.algorithm_params = algorithm_params

    # -- fitting ---------------------------------------------------------------

    def _fit(self, X):
        metric = check_metric(self.metric)
        hubness = check_reduction_method(self.hubness)
        algorithm = _ALGORITHM_ALIASES.get(str(self.algorithm).lower())
        if algorithm is None:
            raise ValueError(f"algorithm must be one of {VALID_ALGORITHMS}, got {self.algorithm!r}")
        if hubness == "dissim_local" and metric != "squared_euclidean":
            raise ValueError(
                f"hubness='dissim_local' requires metric='squared_euclidean', got {metric!r}"
            )
        hub_params = dict(self.hubness_params or {})
        k_local = int(hub_params.pop("k_local", 5))
        if hub_params:
            raise ValueError(f"unknown hubness_params: {sorted(hub_params)}")
        algo_params = dict(self.algorithm_params or {})
        n_candidates = algo_params.pop("n_candidates", DEFAULT_CANDIDATES)

        X = check_features(X, metric)
        n = X.shape[0]
        self.X_fit_ = X
        self.n_samples_fit_, self.n_features_in_ = X.shape
        self.metric_ = metric
        self.hubness_ = hubness
        self.algorithm_ = algorithm
        self.k_local_ = k_local

        self.index_ = None
        if algorithm != "exact":
            unknown = set(algo_params) - set(_INDEX_PARAMS[algorithm])
            if unknown:
                raise ValueError(f"unknown algorithm_params for {algorithm}: {sorted(unknown)}")
            cls = HNSW if algorithm == "hnsw" else RandomProjectionLSH
            self.index_ = cls(metric=metric, **algo_params).fit(X)
        elif algo_params:
            raise ValueError(f"exact search takes no algorithm_params besides n_candidates, "
                             f"got {sorted(algo_params)}")

        if algorithm == "exact":
            self.n_candidates_ = n - 1
        else:
            self.n_candidates_ = min(int(n_candidates), n - 1)
        self.reducer_ = None
        if hubness is not None:
            if algorithm == "exact":
                if n > MAX_DENSE_SAMPLES:
                    raise MatrixTooLargeError(
                        f"exact hubness reduction limited to n <= {MAX_DENSE_SAMPLES}; "
                        f"use algorithm='hnsw' or 'lsh'"
                    )
                train_graph = kneighbors_exact(X, n - 1, metric)
            else:
                train_graph = self.index_.kneighbors_graph(self.n_candidates_)
            self.train_graph_ = train_graph
            self.reducer_ = make_reducer(hubness, k_local).fit(train_graph, X)
        return self

    # -- querying --------------------------------------------------------------

    def _check_query(self, X):
        check_is_fitted(self, "X_fit_")
        if X is None:
            return None
        Q = check_features(X, self.metric_, name="X")
        if Q.shape[1] != self.n_features_in_:
            raise DimensionMismatchError(
                f"X has {Q.shape[1]} features, estimator was fitted with {self.n_features_in_}"
            )
        return Q

    def _candidate_graph(self, Q, n_candidates):
        """Primary-distance candidates; ``Q=None`` queries the training set."""
        if self.algorithm_ == "exact":
            if Q is None:
                return kneighbors_exact(self.X_fit_, n_candidates, self.metric_)
            return kneighbors_query(Q, self.X_fit_, n_candidates, self.metric_)
        return self.index_.kneighbors_graph(n_candidates, X=Q)

    def _reduced_graph(self, Q, n_neighbors=None, keep_all=False) -> NeighborGraph:
        n = self.n_samples_fit_
        available = n - 1 if Q is None else n
        if n_neighbors is not None and n_neighbors > available:
            raise KTooLargeError(f"n_neighbors={n_neighbors} exceeds the {available} "
                                 f"available training objects")
        if self.reducer_ is None:
            # keep_all without a reducer only happens in approximate mode
            k = min(self.n_candidates_, available) if keep_all else n_neighbors
            return self._candidate_graph(Q, k)
        if Q is None:
            graph, ids = self.train_graph_, np.arange(n, dtype=np.int64)
        else:
            s = n if self.algorithm_ == "exact" else min(self.n_candidates_, n)
            graph, ids = self._candidate_graph(Q, s), None
        if n_neighbors is not None and n_neighbors > graph.k:
            raise KTooLargeError(
                f"n_neighbors={n_neighbors} exceeds the {graph.k} retrieved candidates"
            )
        features = self.X_fit_ if Q is None else Q
        return self.reducer_.transform(
            graph, features, query_ids=ids, n_neighbors=None if keep_all else n_neighbors
        )

    def kneighbors(self, X=None, n_neighbors=None, return_distance=True):
        """Nearest training neighbors under the (optionally reduced) dissimilarity.

        ``X=None`` queries the training objects, each excluding itself.

        Returns
        -------
        dist : ndarray of shape (n_queries, n_neighbors)
            Only when ``return_distance`` is true.
        ind : ndarray of shape (n_queries, n_neighbors)
        """
        Q = self._check_query(X)
        k = self.n_neighbors if n_neighbors is None else int(n_neighbors)
        graph = self._reduced_graph(Q, k)
        if return_distance:
            return graph.distances, graph.indices
        return graph.indices

    def kneighbors_graph(self, X=None, n_neighbors=None) -> NeighborGraph:
        """Like :meth:`kneighbors` but returns a :class:`NeighborGraph`."""
        dist, ind = self.kneighbors(X, n_neighbors)
        return NeighborGraph(ind, dist, self.n_samples_fit_)

    def radius_neighbors(self, X=None, radius=None, return_distance=True):
        """All training objects with dissimilarity <= ``radius``, ascending.

        In exact mode every training object is considered; approximate
        modes filter the retrieved candidates. Secondary dissimilarities
        may be negative (DisSimLocal), so any real radius is accepted then.

        Returns
        -------
        dist, ind : object arrays of per-query 1-D arrays
        """
        Q = self._check_query(X)
        r = getattr(self, "radius", None) if radius is None else radius
        if r is None:
            raise ValueError("radius must be given")
        if self.reducer_ is None and r < 0:
            raise ValueError(f"radius must be >= 0 for primary dissimilarities, got {r}")
        if self.reducer_ is None and self.algorithm_ == "exact":
            D = self._primary_rows(Q)
            graph = None
        else:
            graph = self._reduced_graph(Q, keep_all=True)
        n_q = self.n_samples_fit_ if Q is None else Q.shape[0]
        dist = np.empty(n_q, dtype=object)
        ind = np.empty(n_q, dtype=object)
        for i in range(n_q):
            if graph is None:
                row = D[i]
                ids = np.flatnonzero(row <= r)
                if Q is None:
                    ids = ids[ids != i]
                ids = ids[np.argsort(row[ids], kind="stable")]
                d = row[ids]
            else:
                keep = graph.distances[i] <= r
                ids, d = graph.indices[i][keep], graph.distances[i][keep]
            ind[i], dist[i] = ids, d
        if return_distance:
            return dist, ind
        return ind

    def _primary_rows(self, Q):
        if Q is None:
            return query_dissimilarity(self.X_fit_, self.X_fit_, self.metric_)
        return query_dissimilarity(Q, self.X_fit_, self.metric_)
