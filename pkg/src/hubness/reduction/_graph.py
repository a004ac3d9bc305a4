"""Hubness reduction on stored candidate lists (the linear-complexity path).

Each reducer is fitted on the self-excluding candidate graph of the indexed
objects, with ``s`` stored neighbors per object. ``transform`` rescales the
candidate edges of a query graph using statistics of both endpoints:
the query's from its own row and the indexed object's from the fitted graph.
Querying with the fitted graph itself (``query_ids=arange(n)``) gives the
approximate secondary graph among the indexed objects.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..core import NeighborGraph, check_features
from ..exceptions import (
    CandidateCountTooSmallError,
    DegenerateScaleError,
    DimensionMismatchError,
    MissingFeaturesError,
)
from ._exact import local_centroid_offsets, normal_sf

__all__ = [
    "REDUCTION_METHODS",
    "check_reduction_method",
    "GraphReduction",
    "MutualProximity",
    "LocalScaling",
    "DisSimLocal",
    "make_reducer",
    "reduce_graph",
]

REDUCTION_METHODS = ("mp_empiric", "mp_gauss", "local_scaling", "nicdm", "dissim_local")

_ALIASES = {
    "mp": "mp_empiric",
    "mp_empiric": "mp_empiric",
    "mutual_proximity": "mp_empiric",
    "mutual_proximity_empiric": "mp_empiric",
    "mp_gauss": "mp_gauss",
    "mutual_proximity_gauss": "mp_gauss",
    "ls": "local_scaling",
    "local_scaling": "local_scaling",
    "nicdm": "nicdm",
    "dsl": "dissim_local",
    "dissim_local": "dissim_local",
    "dissimlocal": "dissim_local",
}


def check_reduction_method(method: Optional[str]) -> Optional[str]:
    """Canonical reduction name, or None for no reduction."""
    if method is None or str(method).lower() in ("none", ""):
        return None
    try:
        return _ALIASES[str(method).lower()]
    except KeyError:
        raise ValueError(
            f"Unknown hubness reduction {method!r}; expected one of "
            f"{sorted(_ALIASES)}"
        ) from None


@njit(cache=True)
def _mp_empiric_kernel(q_ind, q_dist, q_self, t_ind, t_dist, n_indexed):
    n_q, s = q_ind.shape
    s_t = t_ind.shape[1]
    out = np.empty((n_q, s))
    dq = np.full(n_indexed, np.inf)
    dt = np.full(n_indexed, np.inf)
    for i in range(n_q):
        for j in range(s):
            dq[q_ind[i, j]] = q_dist[i, j]
        me = q_self[i]
        for j in range(s):
            t = q_ind[i, j]
            d = q_dist[i, j]
            for m in range(s_t):
                dt[t_ind[t, m]] = t_dist[t, m]
            count = 0
            support = 0
            for jj in range(s):
                z = q_ind[i, jj]
                if z == t or z == me:
                    continue
                support += 1
                # unknown d(t, z) lies beyond t's candidate radius
                if dq[z] > d and dt[z] > d:
                    count += 1
            for m in range(s_t):
                z = t_ind[t, m]
                if z == t or z == me or dq[z] < np.inf:
                    continue
                support += 1
                if t_dist[t, m] > d:
                    count += 1
            for m in range(s_t):
                dt[t_ind[t, m]] = np.inf
            if support == 0:
                out[i, j] = 1.0
            else:
                out[i, j] = 1.0 - count / support
        for j in range(s):
            dq[q_ind[i, j]] = np.inf
    return out


def _sort_rows(ind: np.ndarray, values: np.ndarray, n_indexed: int, k: Optional[int]):
    order = np.lexsort((ind, values), axis=1)
    new_ind = np.take_along_axis(ind, order, axis=1)
    new_val = np.take_along_axis(values, order, axis=1)
    if k is not None:
        new_ind, new_val = new_ind[:, :k], new_val[:, :k]
    return NeighborGraph(new_ind, new_val, n_indexed)


class GraphReduction(BaseEstimator):
    """Common fit/transform plumbing for candidate-graph hubness reduction."""

    #: smallest number of stored candidates the method can work with
    _min_candidates = 1

    def _required_candidates(self) -> int:
        return self._min_candidates

    def fit(self, graph: NeighborGraph, X=None):
        """Store per-object statistics of the indexed set.

        Parameters
        ----------
        graph : NeighborGraph
            Self-excluding candidate graph of the indexed objects, ``s``
            candidates per row.
        X : array-like, optional
            Indexed features; only DisSimLocal needs them.
        """
        s = graph.k
        need = self._required_candidates()
        if s < need:
            raise CandidateCountTooSmallError(
                f"{type(self).__name__} needs >= {need} stored candidates, graph has {s}"
            )
        self.fit_graph_ = graph
        self.n_indexed_ = graph.n_indexed
        self._fit_stats(graph, X)
        return self

    def transform(self, graph: NeighborGraph, X=None, query_ids=None, n_neighbors=None):
        """Rescale and re-sort the candidate edges of a query graph.

        Parameters
        ----------
        graph : NeighborGraph
            Query-to-indexed candidate graph.
        X : array-like, optional
            Query features (DisSimLocal only).
        query_ids : array-like of int, optional
            Ids of the queries inside the indexed set when they are members of
            it; ``-1`` (default) marks external queries.
        n_neighbors : int, optional
            Keep only this many edges per row after re-sorting.
        """
        check_is_fitted(self, "fit_graph_")
        if graph.n_indexed != self.n_indexed_:
            raise DimensionMismatchError(
                f"query graph indexes {graph.n_indexed} objects, fitted on {self.n_indexed_}"
            )
        need = self._required_candidates()
        if graph.k < need:
            raise CandidateCountTooSmallError(
                f"{type(self).__name__} needs >= {need} candidates per query, got {graph.k}"
            )
        if n_neighbors is not None and n_neighbors > graph.k:
            raise CandidateCountTooSmallError(
                f"cannot return {n_neighbors} neighbors from {graph.k} candidates"
            )
        if query_ids is None:
            query_ids = np.full(graph.n_queries, -1, dtype=np.int64)
        query_ids = np.asarray(query_ids, dtype=np.int64)
        values = self._edge_values(graph, X, query_ids)
        return _sort_rows(graph.indices, values, graph.n_indexed, n_neighbors)


class MutualProximity(GraphReduction):
    """Mutual proximity on candidate lists.

    Parameters
    ----------
    method : {"empiric", "gauss"}, default="empiric"
        ``"empiric"`` counts objects farther from both endpoints over the
        union of the two endpoints' candidate lists. ``"gauss"`` models each
        object's candidate distances as an independent normal distribution.
    """

    _min_candidates = 2

    def __init__(self, method="empiric"):
        self.method = method

    def _fit_stats(self, graph, X):
        if self.method not in ("empiric", "gauss"):
            raise ValueError(f"method must be 'empiric' or 'gauss', got {self.method!r}")
        self.mu_ = graph.distances.mean(axis=1)
        self.sd_ = graph.distances.std(axis=1)

    def _edge_values(self, graph, X, query_ids):
        ind, dist = graph.indices, graph.distances
        if self.method == "gauss":
            mu_q = dist.mean(axis=1)[:, None]
            sd_q = dist.std(axis=1)[:, None]
            sf_q = normal_sf(dist, mu_q, sd_q)
            sf_t = normal_sf(dist, self.mu_[ind], self.sd_[ind])
            return 1.0 - sf_q * sf_t
        return _mp_empiric_kernel(
            np.ascontiguousarray(ind),
            np.ascontiguousarray(dist),
            query_ids,
            np.ascontiguousarray(self.fit_graph_.indices),
            np.ascontiguousarray(self.fit_graph_.distances),
            self.n_indexed_,
        )


class LocalScaling(GraphReduction):
    """Local scaling or NICDM on candidate lists.

    Parameters
    ----------
    k : int, default=5
        Neighborhood used for the per-object scale.
    method : {"standard", "nicdm"}, default="standard"
        ``"standard"`` uses the k-th candidate distance as radius in
        ``1 - exp(-d^2 / (r_q r_t))``; ``"nicdm"`` divides by the geometric
        mean of the two mean k-candidate distances.
    """

    def __init__(self, k=5, method="standard"):
        self.k = k
        self.method = method

    def _required_candidates(self):
        return max(1, int(self.k))

    def _scale(self, dist):
        head = np.ascontiguousarray(dist[:, : self.k])
        if self.method == "standard":
            return head[:, -1]
        mean = head.mean(axis=1)
        if np.any(mean == 0):
            bad = int(np.flatnonzero(mean == 0)[0])
            raise DegenerateScaleError(
                f"row {bad} has zero mean distance to its {self.k} nearest candidates"
            )
        return mean

    def _fit_stats(self, graph, X):
        if self.method not in ("standard", "nicdm"):
            raise ValueError(f"method must be 'standard' or 'nicdm', got {self.method!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        self.scale_ = self._scale(graph.distances)

    def _edge_values(self, graph, X, query_ids):
        dist = graph.distances
        scale = self._scale(dist)[:, None] * self.scale_[graph.indices]
        if self.method == "nicdm":
            return dist / np.sqrt(scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 - np.exp(-(dist ** 2) / scale)
        zero = scale == 0
        out[zero] = (dist[zero] != 0).astype(np.float64)
        return out


class DisSimLocal(GraphReduction):
    """DisSimLocal on squared Euclidean candidate lists.

    Parameters
    ----------
    k : int, default=5
        Number of candidates whose centroid defines each object's local center.
    """

    def __init__(self, k=5):
        self.k = k

    def _required_candidates(self):
        return max(1, int(self.k))

    def _fit_stats(self, graph, X):
        if X is None:
            raise MissingFeaturesError("DisSimLocal needs the indexed feature matrix")
        X = check_features(X)
        if X.shape[0] != graph.n_indexed:
            raise DimensionMismatchError(
                f"X has {X.shape[0]} rows, graph indexes {graph.n_indexed} objects"
            )
        self.X_fit_ = X
        self.offset_ = local_centroid_offsets(X, graph.indices[:, : self.k])

    def _edge_values(self, graph, X, query_ids):
        if X is None:
            raise MissingFeaturesError("DisSimLocal needs the query feature matrix")
        X = check_features(X)
        if X.shape[0] != graph.n_queries or X.shape[1] != self.X_fit_.shape[1]:
            raise DimensionMismatchError(
                f"query features of shape {X.shape} do not match the query graph"
            )
        centroids = self.X_fit_[graph.indices[:, : self.k]].mean(axis=1)
        offset_q = np.sum((X - centroids) ** 2, axis=1)
        return graph.distances - (offset_q[:, None] + self.offset_[graph.indices])


def make_reducer(method: str, k_local: int = 5) -> GraphReduction:
    """Instantiate the reducer for a canonical or aliased method name."""
    kind = check_reduction_method(method)
    if kind is None:
        raise ValueError("no reduction method given")
    if kind == "mp_empiric":
        return MutualProximity("empiric")
    if kind == "mp_gauss":
        return MutualProximity("gauss")
    if kind == "local_scaling":
        return LocalScaling(k_local, "standard")
    if kind == "nicdm":
        return LocalScaling(k_local, "nicdm")
    return DisSimLocal(k_local)


def reduce_graph(
    graph: NeighborGraph,
    method: str,
    k_local: int = 5,
    n_neighbors: Optional[int] = None,
    X=None,
) -> NeighborGraph:
    """Hubness-reduce a self-excluding candidate graph.

    Only the ``s`` stored edges of every row are rescaled, using per-object
    statistics estimated from stored edges only, then each row is re-sorted
    and cut to ``n_neighbors`` (default: keep all ``s``).

    Raises
    ------
    CandidateCountTooSmallError
        If ``s`` is smaller than the method needs or than ``n_neighbors``.
    MissingFeaturesError
        For DisSimLocal without ``X``.
    """
    reducer = make_reducer(method, k_local)
    if isinstance(reducer, DisSimLocal) and X is None:
        raise MissingFeaturesError("DisSimLocal needs the feature matrix X")
    reducer.fit(graph, X)
    ids = np.arange(graph.n_queries, dtype=np.int64)
    return reducer.transform(graph, X, query_ids=ids, n_neighbors=n_neighbors)
