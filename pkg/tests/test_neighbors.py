import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

import oracles
from hubness.core import pairwise_dissimilarity, query_dissimilarity
from hubness.exceptions import (
    DimensionMismatchError,
    EmptyNeighborhoodError,
    MissingLabelsError,
    NotFittedError,
)
from hubness.neighbors import (
    KNeighborsClassifier,
    KNeighborsRegressor,
    NearestNeighbors,
    RadiusNeighborsRegressor,
    kneighbors_graph,
)
from hubness.reduction import exact_secondary

HUBNESS = [None, "mp", "mp_gauss", "ls", "nicdm"]


def blobs(seed, n=150, d=8, n_classes=3):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, n_classes, n)
    X = rng.standard_normal((n, d)) + y[:, None] * 0.8
    return X, y


def mp_query_oracle(X_train, X_query, k):
    """Neighbors of each query under empiric MP, recomputed from scratch by
    appending the query to the training set and letting z range over
    training points only."""
    n = X_train.shape[0]
    out = []
    for q in X_query:
        A = np.vstack([X_train, q])
        D = oracles.pairwise(A)
        scores = []
        for y in range(n):
            dqy = D[n, y]
            count = sum(1 for z in range(n) if z != y and D[n, z] > dqy and D[y, z] > dqy)
            scores.append((1.0 - count / (n - 1), y))
        out.append([y for _, y in sorted(scores)[:k]])
    return np.array(out)


class TestClassifier:
    def test_two_points(self):
        clf = KNeighborsClassifier(n_neighbors=1).fit([[0.0], [10.0]], ["A", "B"])
        assert clf.predict([[1.0]]).tolist() == ["A"]

    def test_majority(self):
        clf = KNeighborsClassifier(n_neighbors=3).fit([[0.0], [1.0], [2.0], [9.0]],
                                                      ["A", "A", "B", "B"])
        assert clf.predict([[1.2]]).tolist() == ["A"]

    def test_vote_tie_smallest_label(self):
        clf = KNeighborsClassifier(n_neighbors=2).fit([[0.0], [2.0]], [5, 3])
        assert clf.predict([[1.0]]).tolist() == [3]

    def test_zero_distance_wins_under_distance_weights(self):
        X = [[0.0], [0.1], [0.2], [5.0]]
        clf = KNeighborsClassifier(n_neighbors=4, weights="distance").fit(X, [1, 1, 1, 2])
        assert clf.predict([[5.0]]).tolist() == [2]

    @settings(max_examples=100, deadline=None)
    @given(n=st.integers(5, 80), d=st.integers(1, 6), seed=st.integers(0, 2**32 - 1),
           data=st.data())
    def test_textbook_oracle(self, n, d, seed, data):
        k = data.draw(st.integers(1, n))
        rng = np.random.default_rng(seed)
        X = np.round(rng.standard_normal((n, d)), 1)
        y = rng.integers(0, 3, n)
        Q = np.round(rng.standard_normal((10, d)), 1)
        pred = KNeighborsClassifier(n_neighbors=k).fit(X, y).predict(Q)
        np.testing.assert_array_equal(pred, oracles.knn_classify(X, y, Q, k))

    def test_mp_matches_augmented_oracle(self):
        X, y = blobs(0)
        X_tr, X_te, y_tr = X[:120], X[120:], y[:120]
        clf = KNeighborsClassifier(n_neighbors=5, hubness="mp").fit(X_tr, y_tr)
        ind = clf.kneighbors(X_te, return_distance=False)
        ref = mp_query_oracle(X_tr, X_te, 5)
        np.testing.assert_array_equal(ind, ref)
        votes = [np.bincount(y_tr[row], minlength=3).argmax() for row in ref]
        np.testing.assert_array_equal(clf.predict(X_te), votes)

    @pytest.mark.parametrize("hubness", HUBNESS)
    def test_self_graph_matches_exact_secondary(self, hubness):
        X, _ = blobs(1, n=70)
        nn = NearestNeighbors(n_neighbors=6, hubness=hubness).fit(X)
        g = nn.kneighbors_graph().validate()
        S = pairwise_dissimilarity(X)
        if hubness is not None:
            S = exact_secondary(hubness, S, X, 5)
        ind, _ = oracles.knn(S, 6)
        np.testing.assert_array_equal(g.indices, ind)

    @pytest.mark.parametrize("hubness", HUBNESS + ["dsl"])
    def test_no_leakage(self, hubness):
        """Changing held-out points never changes fitted statistics."""
        X, y = blobs(2)
        metric = "squared_euclidean" if hubness == "dsl" else "euclidean"
        tr = np.arange(100)
        X2 = X.copy()
        X2[100:] += np.random.default_rng(0).standard_normal(X2[100:].shape) * 5
        a = KNeighborsClassifier(hubness=hubness, metric=metric).fit(X[tr], y[tr])
        b = KNeighborsClassifier(hubness=hubness, metric=metric).fit(X2[tr], y[tr])
        if hubness is not None:
            for key, value in vars(a.reducer_).items():
                if key.endswith("_") and isinstance(value, np.ndarray):
                    np.testing.assert_array_equal(value, getattr(b.reducer_, key))
        # a query's result depends only on itself and the training split
        q = X[100:110]
        np.testing.assert_array_equal(a.predict(q), b.predict(q))
        single = np.array([a.predict(q[i:i + 1])[0] for i in range(10)])
        np.testing.assert_array_equal(a.predict(q), single)

    @pytest.mark.parametrize("hubness", [None, "mp", "nicdm"])
    def test_ann_exhaustive_equals_exact(self, hubness):
        X, y = blobs(3, n=90)
        params = {"ef_search": 90, "n_candidates": 89}
        exact = KNeighborsClassifier(hubness=hubness).fit(X[:80], y[:80])
        ann = KNeighborsClassifier(hubness=hubness, algorithm="hnsw",
                                   algorithm_params=params).fit(X[:80], y[:80])
        np.testing.assert_array_equal(exact.kneighbors_graph().indices,
                                      ann.kneighbors_graph().indices)
        np.testing.assert_array_equal(exact.predict(X[:80]), ann.predict(X[:80]))

    def test_errors(self):
        X, y = blobs(4, n=30)
        with pytest.raises(MissingLabelsError):
            KNeighborsClassifier().fit(X)
        with pytest.raises(NotFittedError):
            KNeighborsClassifier().predict(X)
        clf = KNeighborsClassifier().fit(X, y)
        with pytest.raises(DimensionMismatchError):
            clf.predict(X[:, :3])
        with pytest.raises(ValueError, match="squared_euclidean"):
            KNeighborsClassifier(hubness="dsl").fit(X, y)
        with pytest.raises(ValueError):
            KNeighborsClassifier(hubness="dsl", metric="squared_euclidean",
                                 weights="distance").fit(X, y)

    def test_sklearn_api(self):
        clf = KNeighborsClassifier(n_neighbors=3, hubness="mp")
        assert clone(clf).get_params()["hubness"] == "mp"
        X, y = blobs(5, n=60)
        assert 0 <= clf.fit(X, y).score(X, y) <= 1
        proba = clf.predict_proba(X)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0)


class TestRegressor:
    def test_mean(self):
        reg = KNeighborsRegressor(n_neighbors=2).fit([[0.0], [1.0]], [1.0, 3.0])
        assert reg.predict([[0.4]])[0] == 2.0

    def test_zero_distance(self):
        reg = KNeighborsRegressor(n_neighbors=2, weights="distance").fit([[0.0], [1.0]],
                                                                        [1.0, 3.0])
        assert reg.predict([[1.0]])[0] == 3.0

    def test_weighted_oracle(self):
        rng = np.random.default_rng(6)
        X, t, Q = rng.standard_normal((60, 4)), rng.standard_normal(60), rng.standard_normal((15, 4))
        reg = KNeighborsRegressor(n_neighbors=7, weights="distance").fit(X, t)
        D = query_dissimilarity(Q, X)
        expected = []
        for row in D:
            nn = sorted(range(60), key=lambda j: (row[j], j))[:7]
            w = [1 / row[j] for j in nn]
            expected.append(sum(wi * t[j] for wi, j in zip(w, nn)) / sum(w))
        np.testing.assert_allclose(reg.predict(Q), expected, rtol=0, atol=1e-12)

    def test_radius(self):
        X = np.array([[0.0], [1.0], [2.0], [10.0]])
        reg = RadiusNeighborsRegressor(radius=1.0).fit(X, [1.0, 2.0, 3.0, 4.0])
        assert reg.predict([[1.0]])[0] == 2.0
        with pytest.raises(EmptyNeighborhoodError):
            reg.predict([[5.0]])


class TestRadiusNeighbors:
    def test_duplicates_at_zero(self):
        X = np.array([[0.0], [1.0], [1.0], [3.0]])
        nn = NearestNeighbors().fit(X)
        _, ind = nn.radius_neighbors([[1.0]], radius=0)
        assert ind[0].tolist() == [1, 2]

    def test_infinite_radius(self):
        X = np.random.default_rng(7).standard_normal((25, 3))
        _, ind = NearestNeighbors().fit(X).radius_neighbors(X[:3], radius=np.inf)
        assert all(sorted(r.tolist()) == list(range(25)) for r in ind)

    def test_median_filter_oracle(self):
        X = np.random.default_rng(8).standard_normal((40, 3))
        Q = np.random.default_rng(9).standard_normal((5, 3))
        D = query_dissimilarity(Q, X)
        r = np.median(D)
        dist, ind = NearestNeighbors().fit(X).radius_neighbors(Q, radius=r)
        for i in range(5):
            expected = sorted((j for j in range(40) if D[i, j] <= r), key=lambda j: (D[i, j], j))
            assert ind[i].tolist() == expected
            assert np.all(dist[i] <= r)

    def test_negative_radius_dsl(self):
        X = np.random.default_rng(10).standard_normal((40, 5))
        nn = NearestNeighbors(hubness="dsl", metric="squared_euclidean").fit(X)
        dist, _ = nn.radius_neighbors(radius=-0.5)
        assert all(np.all(d <= -0.5) for d in dist)
        with pytest.raises(ValueError):
            NearestNeighbors().fit(X).radius_neighbors(radius=-1)


def test_kneighbors_graph_function():
    X = np.random.default_rng(11).standard_normal((50, 5))
    g = kneighbors_graph(X, 4, hubness="ls")
    g.validate()
    assert g.k == 4 and g.n_queries == 50
