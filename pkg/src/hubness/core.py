"""Datasets, metrics, exact distances and the neighbor-graph structure.

Everything else in the package exchanges :class:`NeighborGraph` objects:
per-query rows of ``k`` neighbor indices with their dissimilarities, sorted
ascending with ties broken by ascending index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist, pdist, squareform

from .exceptions import (
    DimensionMismatchError,
    KTooLargeError,
    MatrixTooLargeError,
    NonFiniteError,
    ShapeMismatchError,
    UnsupportedMetricError,
    ZeroVectorError,
)

__all__ = [
    "VALID_METRICS",
    "MAX_DENSE_SAMPLES",
    "Dataset",
    "NeighborGraph",
    "check_features",
    "check_metric",
    "pairwise_dissimilarity",
    "query_dissimilarity",
    "kneighbors_exact",
    "kneighbors_query",
    "graph_from_matrix",
]

VALID_METRICS = ("euclidean", "squared_euclidean", "cosine")

_METRIC_ALIASES = {
    "euclidean": "euclidean",
    "l2": "euclidean",
    "squared_euclidean": "squared_euclidean",
    "sqeuclidean": "squared_euclidean",
    "cosine": "cosine",
}

_SCIPY_NAMES = {
    "euclidean": "euclidean",
    "squared_euclidean": "sqeuclidean",
    "cosine": "cosine",
}

#: Largest n for which a dense n x n matrix is materialized.
MAX_DENSE_SAMPLES = 20_000

# rows per block when streaming distances for exact kNN
_CHUNK = 512


def check_metric(metric: str) -> str:
    """Return the canonical metric name or raise UnsupportedMetricError."""
    try:
        return _METRIC_ALIASES[str(metric).lower()]
    except KeyError:
        raise UnsupportedMetricError(
            f"Unsupported metric {metric!r}; expected one of {VALID_METRICS}"
        ) from None


def check_features(X, metric: Optional[str] = None, name: str = "X") -> np.ndarray:
    """Validate a feature matrix and return it as a C-contiguous float64 array.

    Sparse input is densified. With ``metric="cosine"`` every row must have a
    nonzero norm.
    """
    if sparse.issparse(X):
        X = X.toarray()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ShapeMismatchError(f"{name} must be 2-dimensional, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ShapeMismatchError(f"{name} must have n >= 1 and d >= 1, got {X.shape}")
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise NonFiniteError(
            f"{name} contains a non-finite value at row {bad[0]}, column {bad[1]}"
        )
    if metric is not None and check_metric(metric) == "cosine":
        norms = np.linalg.norm(X, axis=1)
        zero = np.flatnonzero(norms == 0)
        if zero.size:
            raise ZeroVectorError(
                f"cosine metric requires nonzero rows; row {zero[0]} of {name} has zero norm"
            )
    return np.ascontiguousarray(X)


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with optional labels (class ids or regression targets)."""

    features: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        X = check_features(self.features)
        X.setflags(write=False)
        object.__setattr__(self, "features", X)
        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.ndim != 1 or y.shape[0] != X.shape[0]:
                raise ShapeMismatchError(
                    f"labels must have length {X.shape[0]}, got shape {y.shape}"
                )
            y = y.copy()
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class NeighborGraph:
    """Sorted k-neighbor lists.

    Attributes
    ----------
    indices : ndarray of int64, shape (n_queries, k)
        Neighbor ids into the indexed set.
    distances : ndarray of float64, shape (n_queries, k)
        Dissimilarities matching ``indices``, ascending per row.
    n_indexed : int
        Size of the indexed set. Equals ``n_queries`` for self graphs.
    """

    indices: np.ndarray
    distances: np.ndarray
    n_indexed: int = field(default=-1)

    def __post_init__(self):
        ind = np.array(self.indices, dtype=np.int64, copy=True)
        dist = np.array(self.distances, dtype=np.float64, copy=True)
        if ind.ndim != 2 or ind.shape != dist.shape:
            raise ShapeMismatchError(
                f"indices and distances must be equal-shape 2-D arrays, "
                f"got {ind.shape} and {dist.shape}"
            )
        n_indexed = self.n_indexed if self.n_indexed >= 0 else ind.shape[0]
        ind.setflags(write=False)
        dist.setflags(write=False)
        object.__setattr__(self, "indices", ind)
        object.__setattr__(self, "distances", dist)
        object.__setattr__(self, "n_indexed", int(n_indexed))

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    @property
    def n_queries(self) -> int:
        return self.indices.shape[0]

    def validate(self, self_graph: bool = True) -> "NeighborGraph":
        """Check sortedness, tie order, id range, duplicates and self-exclusion.

        Raises ValueError describing the first violation.
        """
        ind, dist = self.indices, self.distances
        if ind.size and (ind.min() < 0 or ind.max() >= self.n_indexed):
            raise ValueError("neighbor index out of range")
        if not np.all(np.isfinite(dist)):
            raise ValueError("non-finite dissimilarity in graph")
        if self.k > 1:
            d0, d1 = dist[:, :-1], dist[:, 1:]
            i0, i1 = ind[:, :-1], ind[:, 1:]
            ok = (d0 < d1) | ((d0 == d1) & (i0 < i1))
            if not np.all(ok):
                row = int(np.argwhere(~ok)[0, 0])
                raise ValueError(f"row {row} is not sorted by (dissimilarity, index)")
            srt = np.sort(ind, axis=1)
            if np.any(srt[:, 1:] == srt[:, :-1]):
                raise ValueError("duplicate neighbor within a row")
        if self_graph:
            if self.n_queries != self.n_indexed:
                raise ValueError("self graph must have one row per indexed sample")
            if np.any(ind == np.arange(self.n_queries)[:, None]):
                raise ValueError("self loop in neighbor graph")
        return self

    def head(self, k: int) -> "NeighborGraph":
        """Keep only the first ``k`` neighbors of every row."""
        if k > self.k:
            raise KTooLargeError(f"cannot take {k} neighbors from a graph with k={self.k}")
        return NeighborGraph(self.indices[:, :k], self.distances[:, :k], self.n_indexed)

    def to_csr(self) -> sparse.csr_matrix:
        """Sparse distance matrix (n_queries x n_indexed), scikit-learn layout."""
        n_q, k = self.indices.shape
        indptr = np.arange(0, n_q * k + 1, k)
        return sparse.csr_matrix(
            (self.distances.ravel(), self.indices.ravel(), indptr),
            shape=(n_q, self.n_indexed),
        )

    def __eq__(self, other):
        if not isinstance(other, NeighborGraph):
            return NotImplemented
        return (
            self.n_indexed == other.n_indexed
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.distances, other.distances)
        )

    __hash__ = None


def pairwise_dissimilarity(X, metric: str = "euclidean") -> np.ndarray:
    """Dense n x n primary dissimilarity matrix.

    Each pair is computed once and mirrored, so the result is exactly
    symmetric with a zero diagonal. Cosine distance is
    ``1 - x.y / (|x| |y|)``, clipped at zero.

    Raises
    ------
    MatrixTooLargeError
        For more than ``MAX_DENSE_SAMPLES`` rows.
    """
    metric = check_metric(metric)
    X = check_features(X, metric)
    n = X.shape[0]
    if n > MAX_DENSE_SAMPLES:
        raise MatrixTooLargeError(
            f"dense dissimilarity matrix limited to n <= {MAX_DENSE_SAMPLES} "
            f"(got n={n}); use an approximate neighbor graph instead"
        )
    if n == 1:
        return np.zeros((1, 1))
    D = squareform(pdist(X, _SCIPY_NAMES[metric]))
    if metric == "cosine":
        np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def query_dissimilarity(Q, X, metric: str = "euclidean") -> np.ndarray:
    """Dissimilarities between query rows and indexed rows.

    Uses the same per-pair kernel as :func:`pairwise_dissimilarity`, so
    ``query_dissimilarity(X[i:i+1], X)`` reproduces row ``i`` of the matrix
    bit for bit (off the diagonal).
    """
    metric = check_metric(metric)
    Q = check_features(Q, metric, name="Q")
    X = check_features(X, metric)
    if Q.shape[1] != X.shape[1]:
        raise DimensionMismatchError(
            f"query dimensionality {Q.shape[1]} != indexed dimensionality {X.shape[1]}"
        )
    return _cdist(Q, X, metric)


def _cdist(Q: np.ndarray, X: np.ndarray, metric: str) -> np.ndarray:
    D = cdist(Q, X, _SCIPY_NAMES[metric])
    if metric == "cosine":
        np.maximum(D, 0.0, out=D)
    return D


def _topk_sorted(D: np.ndarray, k: int):
    """Row-wise k smallest entries, ascending, ties by ascending column.

    Entries equal to +inf are treated as excluded.
    """
    n_rows, n_cols = D.shape
    ind = np.empty((n_rows, k), dtype=np.int64)
    dist = np.empty((n_rows, k), dtype=np.float64)
    if k == n_cols:
        order = np.argsort(D, axis=1, kind="stable")
    else:
        kth = np.partition(D, k - 1, axis=1)[:, k - 1]
        order = None
    for r in range(n_rows):
        row = D[r]
        if order is not None:
            sel = order[r]
        else:
            cand = np.flatnonzero(row <= kth[r])
            sel = cand[np.argsort(row[cand], kind="stable")[:k]]
        ind[r] = sel
        dist[r] = row[sel]
    return ind, dist


def _check_k(k: int, n_available: int, what: str = "samples"):
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k > n_available:
        raise KTooLargeError(
            f"k={k} exceeds the {n_available} available {what} (self excluded)"
        )


def kneighbors_exact(X, k: int, metric: str = "euclidean") -> NeighborGraph:
    """Brute-force self-excluding k-neighbor graph of ``X``.

    Distances are streamed in row blocks, so memory stays O(block * n).
    """
    metric = check_metric(metric)
    X = check_features(X, metric)
    n = X.shape[0]
    _check_k(k, n - 1)
    ind = np.empty((n, k), dtype=np.int64)
    dist = np.empty((n, k), dtype=np.float64)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        D = _cdist(X[start:stop], X, metric)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        ind[start:stop], dist[start:stop] = _topk_sorted(D, k)
    return NeighborGraph(ind, dist, n)


def kneighbors_query(Q, X, k: int, metric: str = "euclidean") -> NeighborGraph:
    """k nearest rows of ``X`` for each row of ``Q`` (no self-exclusion)."""
    metric = check_metric(metric)
    X = check_features(X, metric)
    Q = check_features(Q, metric, name="Q")
    if Q.shape[1] != X.shape[1]:
        raise DimensionMismatchError(
            f"query dimensionality {Q.shape[1]} != indexed dimensionality {X.shape[1]}"
        )
    _check_k(k, X.shape[0])
    ind = np.empty((Q.shape[0], k), dtype=np.int64)
    dist = np.empty((Q.shape[0], k), dtype=np.float64)
    for start in range(0, Q.shape[0], _CHUNK):
        stop = min(start + _CHUNK, Q.shape[0])
        ind[start:stop], dist[start:stop] = _topk_sorted(_cdist(Q[start:stop], X, metric), k)
    return NeighborGraph(ind, dist, X.shape[0])


def graph_from_matrix(M, k: int) -> NeighborGraph:
    """Self-excluding top-k graph from a square (possibly secondary) matrix.

    The diagonal is ignored; negative entries are allowed and rank first.
    """
    M = np.array(M, dtype=np.float64, copy=True)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteError("dissimilarity matrix contains non-finite values")
    n = M.shape[0]
    _check_k(k, n - 1)
    np.fill_diagonal(M, np.inf)
    ind, dist = _topk_sorted(M, k)
    return NeighborGraph(ind, dist, n)
