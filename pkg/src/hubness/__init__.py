"""Hubness analysis and reduction for k-nearest-neighbor search."""
__version__ = "0.1.0"

from .analysis import Hubness, HubnessEstimate, analyze  # noqa: E402
from .core import Dataset, NeighborGraph, kneighbors_exact, pairwise_dissimilarity  # noqa: E402
from .neighbors import (  # noqa: E402
    KNeighborsClassifier,
    KNeighborsRegressor,
    NearestNeighbors,
    RadiusNeighborsRegressor,
    kneighbors_graph,
)
from .reduction import DisSimLocal, LocalScaling, MutualProximity, reduce_graph  # noqa: E402

__all__ = [
    "__version__",
    "Dataset",
    "NeighborGraph",
    "Hubness",
    "HubnessEstimate",
    "analyze",
    "kneighbors_exact",
    "pairwise_dissimilarity",
    "NearestNeighbors",
    "KNeighborsClassifier",
    "KNeighborsRegressor",
    "RadiusNeighborsRegressor",
    "kneighbors_graph",
    "MutualProximity",
    "LocalScaling",
    "DisSimLocal",
    "reduce_graph",
]
