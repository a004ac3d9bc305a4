import numpy as np
import pytest

from hubness import datasets
from hubness.datasets import DatasetSpec, fetch_dexter, fingerprint, load
from hubness.exceptions import (
    HashMismatchError,
    NetworkUnavailableError,
    ParseError,
    ShapeMismatchError,
)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestDenseCsv:
    def test_basic(self, tmp_path):
        ds = load(DatasetSpec(write(tmp_path, "a.csv", "1.0,2.0\n3.0,4.0\n")))
        np.testing.assert_array_equal(ds.features, [[1, 2], [3, 4]])
        assert ds.labels is None

    def test_labels_file(self, tmp_path):
        data = write(tmp_path, "a.csv", "1,2\n3,4\n")
        labels = write(tmp_path, "y.txt", "1\n-1\n")
        assert load(DatasetSpec(data, labels_path=labels)).labels.tolist() == [1, -1]

    def test_label_count_mismatch(self, tmp_path):
        data = write(tmp_path, "a.csv", "1,2\n3,4\n")
        labels = write(tmp_path, "y.txt", "1\n")
        with pytest.raises(ShapeMismatchError):
            load(DatasetSpec(data, labels_path=labels))

    @pytest.mark.parametrize("bad", ["nan", "inf", "-Infinity", "abc"])
    def test_non_finite_located(self, tmp_path, bad):
        path = write(tmp_path, "a.csv", f"1,2\n3,{bad}\n")
        with pytest.raises(ParseError) as info:
            load(DatasetSpec(path))
        assert info.value.line == 2 and info.value.column == 3
        assert "line 2" in str(info.value)

    def test_ragged(self, tmp_path):
        with pytest.raises(ParseError):
            load(DatasetSpec(write(tmp_path, "a.csv", "1,2\n3\n")))

    def test_width_check(self, tmp_path):
        with pytest.raises(ShapeMismatchError):
            load(DatasetSpec(write(tmp_path, "a.csv", "1,2\n"), n_features=3))


class TestSvmlight:
    def test_line(self, tmp_path):
        path = write(tmp_path, "a.svm", "+1 3:0.5 7:1.25\n")
        ds = load(DatasetSpec(path, "svmlight_sparse", n_features=10))
        expected = np.zeros(10)
        expected[[2, 6]] = [0.5, 1.25]
        np.testing.assert_array_equal(ds.features[0], expected)
        assert ds.labels.tolist() == [1]

    def test_matches_sklearn_loader(self, tmp_path):
        from sklearn.datasets import dump_svmlight_file, load_svmlight_file
        rng = np.random.default_rng(0)
        X = rng.standard_normal((20, 9)) * (rng.random((20, 9)) < 0.4)
        y = rng.integers(0, 2, 20) * 2 - 1
        path = tmp_path / "b.svm"
        dump_svmlight_file(X, y, str(path), zero_based=False)
        ds = load(DatasetSpec(path, "svmlight_sparse", n_features=9))
        Xr, yr = load_svmlight_file(str(path), n_features=9, zero_based=False)
        np.testing.assert_array_equal(ds.features, Xr.toarray())
        np.testing.assert_array_equal(ds.labels, yr)

    def test_separate_labels(self, tmp_path):
        data = write(tmp_path, "a.svm", "1:1 2:2\n2:5\n")
        labels = write(tmp_path, "y.txt", "0\n1\n")
        ds = load(DatasetSpec(data, "svmlight_sparse", labels))
        np.testing.assert_array_equal(ds.features, [[1, 2], [0, 5]])

    @pytest.mark.parametrize("line,column", [
        ("+1 3:0.5 2:1", 10),     # not increasing
        ("+1 0:1", 4),            # zero-based index
        ("+1 3:nan", 6),          # non-finite value
        ("+1 3:0.5 x:1", 10),     # bad index
        ("+1 3:0.5 junk", 10),    # stray token
    ])
    def test_errors_located(self, tmp_path, line, column):
        path = write(tmp_path, "a.svm", "-1 1:1\n" + line + "\n")
        with pytest.raises(ParseError) as info:
            load(DatasetSpec(path, "svmlight_sparse"))
        assert (info.value.line, info.value.column) == (2, column)

    def test_index_beyond_n_features(self, tmp_path):
        path = write(tmp_path, "a.svm", "+1 11:1\n")
        with pytest.raises(ShapeMismatchError):
            load(DatasetSpec(path, "svmlight_sparse", n_features=10))


def test_fingerprint_depends_on_bytes(tmp_path):
    a = write(tmp_path, "a.csv", "1,2\n")
    b = write(tmp_path, "b.csv", "1,2\n")
    c = write(tmp_path, "c.csv", "1,3\n")
    assert fingerprint(DatasetSpec(a)) == fingerprint(DatasetSpec(b))
    assert fingerprint(DatasetSpec(a)) != fingerprint(DatasetSpec(c))
    assert len(fingerprint(DatasetSpec(a))) == 64


class TestDexterCache:
    @pytest.fixture
    def raw(self, tmp_path, monkeypatch):
        root = tmp_path / "dexter"
        root.mkdir()
        (root / "dexter_train.data").write_text("1:5 3:2 \n2:1 \n")
        (root / "dexter_train.labels").write_text("1\n-1\n")
        monkeypatch.setattr(datasets, "DEXTER_SHA256", {})

        def no_network(url, dest, timeout):
            raise NetworkUnavailableError(f"offline: {url}")

        monkeypatch.setattr(datasets, "_download", no_network)
        return tmp_path

    def test_env_override_and_conversion(self, raw, monkeypatch):
        monkeypatch.setenv("HUBNESS_DATA", str(raw))
        spec = fetch_dexter()
        assert spec.path == raw / "dexter" / "dexter_train.svm"
        ds = load(spec)
        assert ds.features.shape == (2, 20_000)
        assert ds.labels.tolist() == [1, -1]
        assert ds.features[0, 0] == 5 and ds.features[0, 2] == 2

    def test_second_call_uses_cache(self, raw):
        fetch_dexter(raw)
        (raw / "dexter" / "dexter_train.data").unlink()
        assert fetch_dexter(raw).path.exists()

    def test_tampered_cache(self, raw, monkeypatch):
        spec = fetch_dexter(raw)
        good = datasets._sha256(spec.path)
        monkeypatch.setattr(datasets, "DEXTER_SHA256", {"dexter_train.svm": good})
        with open(spec.path, "a") as fh:
            fh.write("+1 1:1\n")
        with pytest.raises(HashMismatchError):
            fetch_dexter(raw)

    def test_missing_without_network(self, tmp_path, monkeypatch):
        monkeypatch.setattr(datasets, "_download", lambda *a: (_ for _ in ()).throw(
            NetworkUnavailableError("offline")))
        with pytest.raises(NetworkUnavailableError):
            fetch_dexter(tmp_path / "empty")
