"""Secondary distances that reduce hubness.

Exact functions take a full dissimilarity matrix (quadratic cost); the
reducer classes and :func:`reduce_graph` work on stored candidate lists.
"""
from ._exact import (
    dissim_local_exact,
    local_scaling_exact,
    mp_empiric_exact,
    mp_gauss_exact,
    nicdm_exact,
)
from ._graph import (
    REDUCTION_METHODS,
    DisSimLocal,
    GraphReduction,
    LocalScaling,
    MutualProximity,
    check_reduction_method,
    make_reducer,
    reduce_graph,
)


def exact_secondary(method, D=None, X=None, k_local=5):
    """Dispatch to the exact transform for ``method``.

    DisSimLocal needs the features ``X``; every other method needs ``D``.
    """
    kind = check_reduction_method(method)
    if kind == "dissim_local":
        return dissim_local_exact(X, k_local)
    if kind == "mp_empiric":
        return mp_empiric_exact(D)
    if kind == "mp_gauss":
        return mp_gauss_exact(D)
    if kind == "local_scaling":
        return local_scaling_exact(D, k_local)
    if kind == "nicdm":
        return nicdm_exact(D, k_local)
    raise ValueError("no reduction method given")


__all__ = [
    "REDUCTION_METHODS",
    "DisSimLocal",
    "GraphReduction",
    "LocalScaling",
    "MutualProximity",
    "check_reduction_method",
    "dissim_local_exact",
    "exact_secondary",
    "local_scaling_exact",
    "make_reducer",
    "mp_empiric_exact",
    "mp_gauss_exact",
    "nicdm_exact",
    "reduce_graph",
]
