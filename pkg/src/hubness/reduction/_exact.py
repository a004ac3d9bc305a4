"""Exact (quadratic) secondary distances on full dissimilarity matrices."""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from ..core import check_features, graph_from_matrix, pairwise_dissimilarity
from ..exceptions import (
    DegenerateScaleError,
    KTooLargeError,
    NonFiniteError,
    ShapeMismatchError,
    TooFewSamplesError,
)

__all__ = [
    "mp_empiric_exact",
    "mp_gauss_exact",
    "local_scaling_exact",
    "nicdm_exact",
    "dissim_local_exact",
]


def _check_primary(D) -> np.ndarray:
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise NonFiniteError("dissimilarity matrix contains non-finite values")
    if not np.array_equal(D, D.T):
        raise ValueError("primary dissimilarity matrix must be exactly symmetric")
    return D


def _check_k_local(k_local: int, n: int):
    if k_local < 1:
        raise ValueError(f"k_local must be >= 1, got {k_local}")
    if k_local > n - 1:
        raise KTooLargeError(f"k_local={k_local} exceeds n-1={n - 1}")


def _sorted_rows(D: np.ndarray, k: int) -> np.ndarray:
    """First ``k`` off-diagonal values of each row, ascending."""
    M = D.copy()
    np.fill_diagonal(M, np.inf)
    return np.ascontiguousarray(np.sort(M, axis=1)[:, :k])


def normal_sf(d, mu, sigma):
    """Normal survival function with a step for ``sigma == 0``.

    The step convention: 1 strictly below the mean, 0 at or above it.
    """
    d, mu, sigma = np.broadcast_arrays(
        np.asarray(d, dtype=np.float64),
        np.asarray(mu, dtype=np.float64),
        np.asarray(sigma, dtype=np.float64),
    )
    out = np.empty(d.shape)
    flat = sigma == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (d - mu) / sigma
    out[~flat] = ndtr(-z[~flat])
    out[flat] = (d[flat] < mu[flat]).astype(np.float64)
    return out


def mp_empiric_exact(D) -> np.ndarray:
    """Empiric mutual proximity, returned as dissimilarity ``1 - MP``.

    ``MP(x, y)`` is the share of objects ``z`` (other than x and y) farther
    from both x and y than they are from each other, counted with strict
    comparisons over the ``n - 2`` remaining objects.
    """
    D = _check_primary(D)
    n = D.shape[0]
    if n < 3:
        raise TooFewSamplesError(f"mutual proximity needs n >= 3, got n={n}")
    counts = np.zeros((n, n), dtype=np.int64)
    for x in range(n - 1):
        ys = np.arange(x + 1, n)
        thr = D[x, ys][:, None]
        farther = (D[x][None, :] > thr) & (D[ys] > thr)
        # z = x and z = y never satisfy the strict comparison for d >= 0,
        # but drop them explicitly so negative inputs can't sneak in
        farther[:, x] = False
        farther[np.arange(ys.size), ys] = False
        counts[x, ys] = farther.sum(axis=1)
    counts = counts + counts.T
    out = 1.0 - counts / (n - 2)
    np.fill_diagonal(out, 0.0)
    return out


def mp_gauss_exact(D) -> np.ndarray:
    """Mutual proximity under independent per-object normal distance models."""
    D = _check_primary(D)
    n = D.shape[0]
    if n < 3:
        raise TooFewSamplesError(f"mutual proximity needs n >= 3, got n={n}")
    off = ~np.eye(n, dtype=bool)
    vals = D[off].reshape(n, n - 1)
    mu = vals.mean(axis=1)
    sd = vals.std(axis=1)
    # sf[x, y] = P(X_x > d(x, y)); the matrix is symmetric so sf.T holds y's view
    sf = normal_sf(D, mu[:, None], sd[:, None])
    out = 1.0 - sf * sf.T
    np.fill_diagonal(out, 0.0)
    return out


def _local_scaling(D: np.ndarray, radius: np.ndarray) -> np.ndarray:
    scale = np.outer(radius, radius)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 - np.exp(-(D ** 2) / scale)
    zero = scale == 0
    out[zero] = (D[zero] != 0).astype(np.float64)
    return out


def local_scaling_exact(D, k_local: int = 5) -> np.ndarray:
    """Local scaling ``1 - exp(-d^2 / (r_x r_y))`` with ``r`` the k_local-th NN distance."""
    D = _check_primary(D)
    _check_k_local(k_local, D.shape[0])
    radius = _sorted_rows(D, k_local)[:, -1]
    out = _local_scaling(D, radius)
    np.fill_diagonal(out, 0.0)
    return out


def nicdm_exact(D, k_local: int = 5) -> np.ndarray:
    """NICDM: ``d(x, y) / sqrt(m_x m_y)`` with ``m`` the mean k_local-NN distance.

    Raises
    ------
    DegenerateScaleError
        If some object has ``k_local`` duplicates, making its mean zero.
    """
    D = _check_primary(D)
    _check_k_local(k_local, D.shape[0])
    mean = _sorted_rows(D, k_local).mean(axis=1)
    if np.any(mean == 0):
        bad = int(np.flatnonzero(mean == 0)[0])
        raise DegenerateScaleError(
            f"object {bad} has zero mean distance to its {k_local} nearest neighbors"
        )
    out = D / np.sqrt(np.outer(mean, mean))
    np.fill_diagonal(out, 0.0)
    return out


def local_centroid_offsets(X: np.ndarray, neighbor_ind: np.ndarray) -> np.ndarray:
    """Squared distance of each row of ``X`` to the centroid of its listed neighbors."""
    centroids = X[neighbor_ind].mean(axis=1)
    return np.sum((X - centroids) ** 2, axis=1)


def dissim_local_exact(X, k_local: int = 5) -> np.ndarray:
    """DisSimLocal on squared Euclidean distances; values may be negative.

    ``out(x, y) = |x - y|^2 - |x - c_x|^2 - |y - c_y|^2`` where ``c_x`` is the
    centroid of the ``k_local`` nearest neighbors of x, x itself excluded.
    The diagonal carries the formula value and should be ignored.
    """
    X = check_features(X)
    n = X.shape[0]
    _check_k_local(k_local, n)
    D = pairwise_dissimilarity(X, "squared_euclidean")
    nn = graph_from_matrix(D, k_local).indices
    offset = local_centroid_offsets(X, nn)
    return D - (offset[:, None] + offset[None, :])
