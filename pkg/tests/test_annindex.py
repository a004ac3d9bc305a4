import numpy as np
import pytest

from hubness.annindex import (
    HNSW,
    RandomProjectionLSH,
    build,
    dumps_index,
    kneighbors_graph_ann,
    load_index,
    loads_index,
    query,
    recall,
    save_index,
)
from hubness.core import kneighbors_exact, query_dissimilarity
from hubness.exceptions import FormatError, KTooLargeError, UnsupportedMetricError


@pytest.fixture(scope="module")
def gauss():
    return np.random.default_rng(0).standard_normal((1500, 16))


def ring(n=12):
    t = 2 * np.pi * np.arange(n) / n
    return np.c_[np.cos(t), np.sin(t)]


class TestHNSW:
    def test_three_points_self_first(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
        index = build(X, "hnsw", M=2, ef_construction=2, random_state=0)
        for i in range(3):
            assert query(index, X[i], 1, ef_search=3)[0][0] == i

    @pytest.mark.parametrize("metric", ["euclidean", "squared_euclidean", "cosine"])
    def test_exhaustive_equals_exact(self, metric):
        X = np.random.default_rng(1).standard_normal((90, 6))
        index = HNSW(M=4, ef_construction=20, ef_search=90, metric=metric).fit(X)
        g = kneighbors_graph_ann(index, 89)
        assert g == kneighbors_exact(X, 89, metric)

    def test_ring_recovered(self):
        index = HNSW(M=2, ef_construction=4).fit(ring())
        g = index.kneighbors_graph(2)
        for i in range(12):
            assert set(g.indices[i]) == {(i - 1) % 12, (i + 1) % 12}

    def test_distances_are_exact(self, gauss):
        index = HNSW(ef_search=40).fit(gauss)
        dist, ind = index.kneighbors(gauss[:50], 10)
        D = query_dissimilarity(gauss[:50], gauss)
        np.testing.assert_array_equal(dist, np.take_along_axis(D, ind, axis=1))

    def test_recall_monotone_in_ef(self, gauss):
        exact = kneighbors_exact(gauss, 10).indices
        index = HNSW(M=6, ef_construction=40, random_state=3).fit(gauss)
        recalls = [recall(kneighbors_graph_ann(index, 10, ef_search=ef).indices, exact)
                   for ef in (10, 40, 160)]
        assert recalls[0] <= recalls[1] <= recalls[2]
        assert recalls[2] > 0.95

    def test_deterministic(self, gauss):
        a = HNSW(random_state=7).fit(gauss)
        b = HNSW(random_state=7).fit(gauss)
        assert dumps_index(a) == dumps_index(b)

    def test_self_exclusion_graph_valid(self, gauss):
        HNSW(ef_search=20).fit(gauss).kneighbors_graph(15).validate()

    def test_config_errors(self):
        with pytest.raises(ValueError):
            HNSW(M=1).fit(np.zeros((3, 2)))
        with pytest.raises(ValueError):
            HNSW(M=16, ef_construction=8).fit(np.zeros((3, 2)))

    def test_k_too_large(self):
        index = HNSW().fit(ring())
        with pytest.raises(KTooLargeError):
            index.kneighbors(n_neighbors=12)
        with pytest.raises(ValueError):
            query(index, ring()[0], 5, ef_search=4)


class TestLSH:
    def test_cosine_only(self):
        with pytest.raises(UnsupportedMetricError):
            RandomProjectionLSH(metric="euclidean").fit(np.ones((3, 2)))

    def test_recall(self, gauss):
        exact = kneighbors_exact(gauss, 10, "cosine").indices
        index = RandomProjectionLSH(n_tables=20, n_hyperplanes=8).fit(gauss)
        assert recall(index.kneighbors(n_neighbors=10, return_distance=False), exact) > 0.8

    def test_graph_valid_and_exact_distances(self, gauss):
        index = RandomProjectionLSH(n_tables=4, n_hyperplanes=10, probe_radius=0).fit(gauss)
        g = index.kneighbors_graph(20).validate()
        D = query_dissimilarity(gauss, gauss, "cosine")
        np.testing.assert_array_equal(g.distances, np.take_along_axis(D, g.indices, axis=1))

    def test_deterministic(self, gauss):
        a = RandomProjectionLSH(random_state=5).fit(gauss).kneighbors(n_neighbors=5)
        b = RandomProjectionLSH(random_state=5).fit(gauss).kneighbors(n_neighbors=5)
        np.testing.assert_array_equal(a[1], b[1])

    def test_config_errors(self):
        with pytest.raises(ValueError):
            RandomProjectionLSH(n_tables=0).fit(np.ones((3, 2)))


class TestIndexFormat:
    @pytest.mark.parametrize("backend", ["hnsw", "rp_lsh"])
    def test_round_trip(self, backend, gauss, tmp_path):
        index = build(gauss[:300], backend, metric="cosine", random_state=2)
        path = tmp_path / "index.bin"
        save_index(index, path)
        assert path.read_bytes()[:4] == b"HKAN"
        loaded = load_index(path)
        assert dumps_index(loaded) == path.read_bytes()
        for a, b in zip(index.kneighbors(gauss[300:340], 5), loaded.kneighbors(gauss[300:340], 5)):
            np.testing.assert_array_equal(a, b)

    def test_corruption(self, gauss):
        buf = dumps_index(HNSW().fit(gauss[:50]))
        with pytest.raises(FormatError):
            loads_index(b"XXXX" + buf[4:])
        with pytest.raises(FormatError):
            loads_index(buf[:-3])
        with pytest.raises(FormatError):
            loads_index(buf + b"\0")
        with pytest.raises(FormatError):
            loads_index(buf[:4] + b"\x63\x00" + buf[6:])


def test_recall_helper():
    assert recall([[1, 2], [0, 3]], [[2, 1], [0, 2]]) == 0.75
