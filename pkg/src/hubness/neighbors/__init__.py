"""Neighbors-based learning with transparent hubness reduction."""
from ._base import VALID_ALGORITHMS, NeighborsBase
from ._classification import KNeighborsClassifier
from ._regression import KNeighborsRegressor, RadiusNeighborsRegressor
from ._unsupervised import NearestNeighbors, kneighbors_graph

__all__ = [
    "VALID_ALGORITHMS",
    "KNeighborsClassifier",
    "KNeighborsRegressor",
    "NearestNeighbors",
    "NeighborsBase",
    "RadiusNeighborsRegressor",
    "kneighbors_graph",
]
