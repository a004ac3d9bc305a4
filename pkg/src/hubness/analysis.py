"""Hubness measures on k-neighbor graphs.

Typical use::

    graph = kneighbors_exact(X, k=10, metric="cosine")
    estimate = analyze(graph)
    estimate.skewness, estimate.robin_hood
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import NeighborGraph, check_features, check_metric, kneighbors_exact
from .exceptions import ConservationViolatedError

__all__ = [
    "HubnessEstimate",
    "Hubness",
    "k_occurrence",
    "skewness",
    "robin_hood",
    "antihub_rate",
    "hub_rate",
    "analyze",
]


def k_occurrence(graph: NeighborGraph) -> np.ndarray:
    """Number of neighbor lists each indexed object appears in."""
    return np.bincount(graph.indices.ravel(), minlength=graph.n_indexed).astype(np.int64)


def skewness(occurrence) -> float:
    """Population (biased) Fisher-Pearson skewness, 0 for constant input."""
    o = np.asarray(occurrence, dtype=np.float64)
    centered = o - o.mean()
    m2 = np.mean(centered ** 2)
    if m2 == 0:
        return 0.0
    m3 = np.mean(centered ** 3)
    return float(m3 / m2 ** 1.5)


def robin_hood(occurrence, k: int) -> float:
    """Share of all k-occurrences that must move to equalize the distribution.

    Parameters
    ----------
    occurrence : array-like of int
        k-occurrence of every indexed object; must sum to ``n * k``.
    k : int
        Neighborhood size the occurrences were counted at.

    Raises
    ------
    ConservationViolatedError
        If ``sum(occurrence) != n * k``.
    """
    o = np.asarray(occurrence, dtype=np.int64)
    total = o.size * int(k)
    if o.sum() != total:
        raise ConservationViolatedError(
            f"k-occurrences sum to {o.sum()}, expected n*k = {total}"
        )
    return float(np.maximum(o - k, 0).sum() / total)


def antihub_rate(occurrence) -> float:
    """Fraction of objects that are never retrieved as a neighbor."""
    o = np.asarray(occurrence)
    return float(np.count_nonzero(o == 0) / o.size)


def hub_rate(occurrence, k: int, hub_size: float = 2.0) -> float:
    """Fraction of objects with k-occurrence above ``hub_size * k``."""
    o = np.asarray(occurrence)
    return float(np.count_nonzero(o > hub_size * k) / o.size)


@dataclass(frozen=True)
class HubnessEstimate:
    k: int
    k_occurrence: np.ndarray
    skewness: float
    robin_hood: float
    antihub_rate: float
    hub_rate: float

    def histogram(self) -> dict:
        """Map k-occurrence value -> number of objects with that value."""
        values, counts = np.unique(self.k_occurrence, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def to_dict(self) -> dict:
        return {
            "k": int(self.k),
            "skewness": float(self.skewness),
            "robin_hood": float(self.robin_hood),
            "antihub_rate": float(self.antihub_rate),
            "hub_rate": float(self.hub_rate),
            "k_occurrence_histogram": {str(v): c for v, c in self.histogram().items()},
        }


def analyze(graph: NeighborGraph, hub_size: float = 2.0) -> HubnessEstimate:
    """Compute all hubness measures of a neighbor graph."""
    occ = k_occurrence(graph)
    k = graph.k
    return HubnessEstimate(
        k=k,
        k_occurrence=occ,
        skewness=skewness(occ),
        robin_hood=robin_hood(occ, k),
        antihub_rate=antihub_rate(occ),
        hub_rate=hub_rate(occ, k, hub_size),
    )


class Hubness(BaseEstimator):
    """Estimate hubness of vector data.

    Parameters
    ----------
    k : int, default=10
        Neighborhood size.
    metric : {"euclidean", "squared_euclidean", "cosine"}, default="euclidean"
    hub_size : float, default=2.0
        Hubs are objects with k-occurrence > ``hub_size * k``.
    return_value : str, default="skewness"
        Measure returned by :meth:`score`; one of "skewness", "robin_hood",
        "antihub_rate", "hub_rate" or "all" (dict).
    """

    def __init__(self, k=10, metric="euclidean", hub_size=2.0, return_value="skewness"):
        self.k = k
        self.metric = metric
        self.hub_size = hub_size
        self.return_value = return_value

    def fit(self, X, y=None):
        metric = check_metric(self.metric)
        X = check_features(X, metric)
        self.n_features_in_ = X.shape[1]
        graph = kneighbors_exact(X, self.k, metric)
        self.estimate_ = analyze(graph, self.hub_size)
        return self

    def score(self, X=None, y=None):
        check_is_fitted(self, "estimate_")
        if self.return_value == "all":
            return self.estimate_.to_dict()
        valid = ("skewness", "robin_hood", "antihub_rate", "hub_rate")
        if self.return_value not in valid:
            raise ValueError(f"return_value must be 'all' or one of {valid}")
        return getattr(self.estimate_, self.return_value)
