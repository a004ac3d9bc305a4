"""Unsupervised neighbor search and graph construction."""
from ..core import NeighborGraph
from ._base import NeighborsBase


class NearestNeighbors(NeighborsBase):
    """Neighbor queries under an optionally hubness-reduced dissimilarity.

    Parameters
    ----------
    n_neighbors : int, default=5
    radius : float, default=1.0
        Default threshold of :meth:`radius_neighbors`.
    metric : {"euclidean", "squared_euclidean", "cosine"}, default="euclidean"
    hubness : str or None, default=None
        "mp", "mp_gauss", "ls", "nicdm", "dsl" (or their long names).
    hubness_params : dict, optional
        ``{"k_local": 5}``.
    algorithm : {"exact", "hnsw", "lsh"}, default="exact"
    algorithm_params : dict, optional
        Index parameters and ``n_candidates``.
    """

    def __init__(self, n_neighbors=5, radius=1.0, metric="euclidean", hubness=None,
                 hubness_params=None, algorithm="exact", algorithm_params=None):
        super().__init__(n_neighbors=n_neighbors, metric=metric, hubness=hubness,
                         hubness_params=hubness_params, algorithm=algorithm,
                         algorithm_params=algorithm_params)
        self.radius = radius

    def fit(self, X, y=None):
        return self._fit(X)


def kneighbors_graph(X, n_neighbors, metric="euclidean", hubness=None, hubness_params=None,
                     algorithm="exact", algorithm_params=None) -> NeighborGraph:
    """Self-excluding k-neighbor graph of ``X``, hubness-reduced if requested."""
    nn = NearestNeighbors(n_neighbors=n_neighbors, metric=metric, hubness=hubness,
                          hubness_params=hubness_params, algorithm=algorithm,
                          algorithm_params=algorithm_params).fit(X)
    return nn.kneighbors_graph()
