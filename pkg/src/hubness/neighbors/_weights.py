import numpy as np

from ..reduction import check_reduction_method

VALID_WEIGHTS = ("uniform", "distance")


def check_weights(weights, hubness=None):
    if weights not in VALID_WEIGHTS:
        raise ValueError(f"weights must be one of {VALID_WEIGHTS}, got {weights!r}")
    if weights == "distance" and check_reduction_method(hubness) == "dissim_local":
        raise ValueError("inverse-distance weights need nonnegative dissimilarities; "
                         "DisSimLocal values can be negative")


def neighbor_weights(dist, weights):
    """Vote weights per neighbor.

    For "distance", rows containing a zero dissimilarity give weight 1 to the
    zero-distance neighbors and 0 to all others.
    """
    if weights == "uniform":
        return np.ones_like(dist)
    zero = dist == 0
    with np.errstate(divide="ignore"):
        w = 1.0 / dist
    has_zero = zero.any(axis=1)
    w[has_zero] = zero[has_zero].astype(np.float64)
    return w
