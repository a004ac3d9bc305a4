"""Deterministic stratified cross-validation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import clone

from .exceptions import ClassTooSmallError

__all__ = ["CvReport", "StratifiedFolds", "stratified_folds", "stratified_cv"]


@dataclass(frozen=True)
class CvReport:
    fold_accuracies: np.ndarray
    mean_accuracy: float
    fold_assignment: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n_folds": int(self.fold_accuracies.size),
            "fold_accuracies": [float(a) for a in self.fold_accuracies],
            "mean_accuracy": float(self.mean_accuracy),
            "fold_sizes": np.bincount(self.fold_assignment).tolist(),
        }


def stratified_folds(y, n_folds: int) -> np.ndarray:
    """Fold id of every sample, without shuffling.

    Within each class, samples keep dataset order and are dealt in
    contiguous blocks; block sizes differ by at most one, with the larger
    blocks going to the earlier folds.

    Raises
    ------
    ClassTooSmallError
        If some class has fewer members than ``n_folds``.
    """
    if n_folds < 2:
        raise ValueError(f"n_folds must be >= 2, got {n_folds}")
    y = np.asarray(y)
    folds = np.empty(y.shape[0], dtype=np.int64)
    for label in np.unique(y):
        members = np.flatnonzero(y == label)
        m = members.size
        if m < n_folds:
            raise ClassTooSmallError(
                f"class {label!r} has {m} members, fewer than n_folds={n_folds}"
            )
        sizes = np.full(n_folds, m // n_folds)
        sizes[: m % n_folds] += 1
        folds[members] = np.repeat(np.arange(n_folds), sizes)
    return folds


class StratifiedFolds:
    """scikit-learn compatible splitter for :func:`stratified_folds`.

    Usable as ``cv=`` argument of ``sklearn.model_selection.cross_val_score``.
    """

    def __init__(self, n_splits=5):
        self.n_splits = n_splits

    def get_n_splits(self, X=None, y=None, groups=None):
        return self.n_splits

    def split(self, X, y, groups=None):
        folds = stratified_folds(y, self.n_splits)
        for f in range(self.n_splits):
            yield np.flatnonzero(folds != f), np.flatnonzero(folds == f)


def stratified_cv(estimator, X, y, n_folds: int = 5) -> CvReport:
    """Fit a fresh clone of ``estimator`` per fold and score accuracy on the fold."""
    y = np.asarray(y)
    X = np.asarray(X) if not hasattr(X, "tocsr") else X.tocsr()
    folds = stratified_folds(y, n_folds)
    acc = np.empty(n_folds)
    for f in range(n_folds):
        test = folds == f
        model = clone(estimator).fit(X[~test], y[~test])
        acc[f] = np.mean(model.predict(X[test]) == y[test])
    return CvReport(fold_accuracies=acc, mean_accuracy=float(np.mean(acc)),
                    fold_assignment=folds)
