import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hubness.analysis import (
    Hubness,
    analyze,
    antihub_rate,
    hub_rate,
    k_occurrence,
    robin_hood,
    skewness,
)
from hubness.core import NeighborGraph, kneighbors_exact
from hubness.exceptions import ConservationViolatedError

STAR_O = [5, 1, 0, 0, 0, 0]


def ring(n=6):
    t = 2 * np.pi * np.arange(n) / n
    return np.c_[np.cos(t), np.sin(t)]


def star():
    return np.vstack([np.zeros(5), 10 * np.eye(5)])


def test_ring_occurrence_is_flat():
    o = k_occurrence(kneighbors_exact(ring(), 2))
    assert o.tolist() == [2] * 6
    assert skewness(o) == 0
    assert robin_hood(o, 2) == 0
    assert antihub_rate(o) == 0 and hub_rate(o, 2) == 0


def test_star_occurrence():
    o = k_occurrence(kneighbors_exact(star(), 1))
    assert o[0] == 5
    assert sorted(o[1:].tolist()) == [0, 0, 0, 0, 1]
    # brute force agrees
    ind, _ = oracles.knn(oracles.pairwise(star()), 1)
    assert o.tolist() == oracles.k_occurrence(ind, 6)


def test_skewness_hand_value():
    m2, m3 = 20 / 6, 10.0
    assert skewness(STAR_O) == pytest.approx(m3 / m2 ** 1.5, abs=1e-12)
    assert skewness(STAR_O) == pytest.approx(1.6432, abs=1e-4)
    assert skewness(STAR_O) == pytest.approx(oracles.moments_skewness(STAR_O), abs=1e-12)


def test_skewness_permutation_invariant():
    assert skewness(STAR_O) == skewness(STAR_O[::-1])


def test_robin_hood_hand_value():
    assert robin_hood(STAR_O, 1) == pytest.approx(4 / 6)


def test_rates_hand_value():
    assert antihub_rate(STAR_O) == pytest.approx(4 / 6)
    assert hub_rate(STAR_O, 1) == pytest.approx(1 / 6)
    assert hub_rate(STAR_O, 1, hub_size=5) == 0


def test_conservation_violation():
    with pytest.raises(ConservationViolatedError):
        robin_hood([3, 1, 0], 2)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(4, 80), d=st.integers(1, 30), seed=st.integers(0, 2**32 - 1),
       data=st.data())
def test_measures_against_oracles(n, d, seed, data):
    k = data.draw(st.integers(1, n - 1))
    X = np.random.default_rng(seed).standard_normal((n, d))
    g = kneighbors_exact(X, k)
    o = k_occurrence(g)
    assert o.sum() == n * k
    assert o.tolist() == oracles.k_occurrence(g.indices, n)
    half_abs = 0.5 * np.abs(o - k).sum() / (n * k)
    assert robin_hood(o, k) == pytest.approx(half_abs, abs=1e-15)
    assert skewness(o) == pytest.approx(oracles.moments_skewness(o.tolist()), abs=1e-12)
    assert antihub_rate(o) < 1
    perm = np.random.default_rng(seed).permutation(n)
    assert robin_hood(o[perm], k) == pytest.approx(robin_hood(o, k), abs=1e-15)


def test_analyze_to_dict():
    est = analyze(kneighbors_exact(star(), 1))
    d = est.to_dict()
    assert set(d) == {"k", "skewness", "robin_hood", "antihub_rate", "hub_rate",
                      "k_occurrence_histogram"}
    assert d["k_occurrence_histogram"] == {"0": 4, "1": 1, "5": 1}


def test_hubness_estimator():
    X = np.random.default_rng(0).standard_normal((300, 100))
    h = Hubness(k=10).fit(X)
    assert h.score() == pytest.approx(analyze(kneighbors_exact(X, 10)).skewness)
    assert Hubness(k=10, return_value="robin_hood").fit(X).score() == pytest.approx(
        analyze(kneighbors_exact(X, 10)).robin_hood)
    assert h.get_params()["k"] == 10


def test_dimensionality_raises_hubness():
    rng = np.random.default_rng(0)
    low = analyze(kneighbors_exact(rng.standard_normal((500, 3)), 10))
    high = analyze(kneighbors_exact(rng.standard_normal((500, 200)), 10))
    assert high.skewness > low.skewness
    assert high.robin_hood > low.robin_hood


def test_empty_graph_row_sum():
    g = NeighborGraph(np.zeros((0, 2), dtype=int), np.zeros((0, 2)), 0)
    assert k_occurrence(g).size == 0
