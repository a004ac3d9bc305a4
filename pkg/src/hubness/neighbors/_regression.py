"""Neighbors-based regression."""
import numpy as np
from sklearn.base import RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import EmptyNeighborhoodError, MissingLabelsError, ShapeMismatchError
from ._base import NeighborsBase
from ._weights import check_weights, neighbor_weights


class _RegressorBase(RegressorMixin, NeighborsBase):

    def fit(self, X, y=None):
        if y is None:
            raise MissingLabelsError(f"{type(self).__name__}.fit requires targets y")
        y = np.asarray(y, dtype=np.float64)
        if y.ndim != 1:
            raise ShapeMismatchError(f"y must be 1-dimensional, got shape {y.shape}")
        check_weights(self.weights, self.hubness)
        self._fit(X)
        if y.shape[0] != self.n_samples_fit_:
            raise ShapeMismatchError(
                f"y has {y.shape[0]} entries, X has {self.n_samples_fit_} rows"
            )
        self._y = y
        return self


class KNeighborsRegressor(_RegressorBase):
    """Mean (or inverse-distance weighted mean) target of the k nearest neighbors.

    Parameters are those of :class:`KNeighborsClassifier`.
    """

    def __init__(self, n_neighbors=5, weights="uniform", metric="euclidean", hubness=None,
                 hubness_params=None, algorithm="exact", algorithm_params=None):
        super().__init__(n_neighbors=n_neighbors, metric=metric, hubness=hubness,
                         hubness_params=hubness_params, algorithm=algorithm,
                         algorithm_params=algorithm_params)
        self.weights = weights

    def predict(self, X):
        check_is_fitted(self, "_y")
        dist, ind = self.kneighbors(X)
        w = neighbor_weights(dist, self.weights)
        return np.sum(w * self._y[ind], axis=1) / np.sum(w, axis=1)


class RadiusNeighborsRegressor(_RegressorBase):
    """Average target of all training objects within ``radius``.

    Parameters
    ----------
    radius : float, default=1.0
        Inclusive dissimilarity threshold. Under DisSimLocal it may be negative.
    weights : {"uniform", "distance"}, default="uniform"
    metric, hubness, hubness_params, algorithm, algorithm_params
        See :class:`~hubness.neighbors.NearestNeighbors`.

    Raises
    ------
    EmptyNeighborhoodError
        From :meth:`predict` when some query has no training object in range.
    """

    def __init__(self, radius=1.0, weights="uniform", metric="euclidean", hubness=None,
                 hubness_params=None, algorithm="exact", algorithm_params=None):
        super().__init__(n_neighbors=5, metric=metric, hubness=hubness,
                         hubness_params=hubness_params, algorithm=algorithm,
                         algorithm_params=algorithm_params)
        self.radius = radius
        self.weights = weights

    def predict(self, X):
        check_is_fitted(self, "_y")
        dist, ind = self.radius_neighbors(X)
        out = np.empty(len(ind))
        for i, (d, idx) in enumerate(zip(dist, ind)):
            if idx.size == 0:
                raise EmptyNeighborhoodError(
                    f"query {i} has no training object within radius {self.radius}"
                )
            w = neighbor_weights(d[None, :], self.weights)[0]
            out[i] = np.sum(w * self._y[idx]) / np.sum(w)
        return out
