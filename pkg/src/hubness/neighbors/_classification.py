"""k-nearest-neighbor classification with optional hubness reduction."""
import numpy as np
from sklearn.base import ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import MissingLabelsError, ShapeMismatchError
from ._base import NeighborsBase
from ._weights import check_weights, neighbor_weights


class KNeighborsClassifier(ClassifierMixin, NeighborsBase):
    """Majority or inverse-distance vote among the k nearest training objects.

    Parameters
    ----------
    n_neighbors : int, default=5
    weights : {"uniform", "distance"}, default="uniform"
        With "distance", votes are weighted by ``1 / dissimilarity``; a
        neighbor at dissimilarity 0 outvotes every nonzero one.
    metric, hubness, hubness_params, algorithm, algorithm_params
        See :class:`~hubness.neighbors.NearestNeighbors`.

    Vote ties go to the smallest class label.

    Examples
    --------
    >>> clf = KNeighborsClassifier(n_neighbors=5, metric="cosine",
    ...                            hubness="mutual_proximity")  # doctest: +SKIP
    """

    def __init__(self, n_neighbors=5, weights="uniform", metric="euclidean", hubness=None,
                 hubness_params=None, algorithm="exact", algorithm_params=None):
        super().__init__(n_neighbors=n_neighbors, metric=metric, hubness=hubness,
                         hubness_params=hubness_params, algorithm=algorithm,
                         algorithm_params=algorithm_params)
        self.weights = weights

    def fit(self, X, y=None):
        if y is None:
            raise MissingLabelsError("KNeighborsClassifier.fit requires labels y")
        y = np.asarray(y)
        if y.ndim != 1:
            raise ShapeMismatchError(f"y must be 1-dimensional, got shape {y.shape}")
        check_weights(self.weights, self.hubness)
        self._fit(X)
        if y.shape[0] != self.n_samples_fit_:
            raise ShapeMismatchError(
                f"y has {y.shape[0]} entries, X has {self.n_samples_fit_} rows"
            )
        self.classes_, self._y = np.unique(y, return_inverse=True)
        return self

    def predict_proba(self, X):
        """Per-class vote shares, columns ordered as ``classes_``."""
        check_is_fitted(self, "classes_")
        dist, ind = self.kneighbors(X)
        w = neighbor_weights(dist, self.weights)
        labels = self._y[ind]
        n_classes = self.classes_.size
        votes = np.zeros((ind.shape[0], n_classes))
        for c in range(n_classes):
            votes[:, c] = np.sum(w * (labels == c), axis=1)
        return votes / votes.sum(axis=1, keepdims=True)

    def predict(self, X):
        proba = self.predict_proba(X)
        # argmax returns the first maximum, i.e. the smallest label on ties
        return self.classes_[np.argmax(proba, axis=1)]
