"""Dataset loaders: dense CSV, svmlight-style sparse text, and dexter.

Sparse lines look like ``[label] idx:value idx:value ...`` with 1-based,
strictly increasing feature indices; absent indices are zero. When labels
come from a separate file the lines carry no label token.
"""
from __future__ import annotations

import hashlib
import math
import os
import shutil
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import Dataset
from .exceptions import (
    HashMismatchError,
    NetworkUnavailableError,
    ParseError,
    ShapeMismatchError,
)

__all__ = [
    "DatasetSpec",
    "load",
    "load_dense_csv",
    "load_svmlight",
    "fingerprint",
    "fetch_dexter",
    "load_dexter",
    "DEXTER_SHAPE",
]

FORMATS = ("dense_csv", "svmlight_sparse")


@dataclass(frozen=True)
class DatasetSpec:
    path: Path
    format: str = "dense_csv"
    labels_path: Optional[Path] = None
    n_features: Optional[int] = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        object.__setattr__(self, "path", Path(self.path))
        if self.labels_path is not None:
            object.__setattr__(self, "labels_path", Path(self.labels_path))


def fingerprint(spec: DatasetSpec) -> str:
    """SHA-256 over the data file bytes, then the labels file bytes if any."""
    h = hashlib.sha256()
    for p in (spec.path, spec.labels_path):
        if p is not None:
            h.update(Path(p).read_bytes())
    return h.hexdigest()


def _parse_float(token: str, path, line_no: int, column: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", path, line_no, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", path, line_no, column)
    return value


def _parse_label(token: str, path, line_no: int, column: int):
    try:
        return int(token)
    except ValueError:
        return _parse_float(token, path, line_no, column)


def _tokens(line: str):
    """Whitespace-separated tokens with their 1-based start columns."""
    col = 0
    for part in line.split():
        col = line.index(part, col)
        yield part, col + 1
        col += len(part)


def _labels_array(labels):
    if all(isinstance(v, int) for v in labels):
        return np.asarray(labels, dtype=np.int64)
    return np.asarray(labels, dtype=np.float64)


def load_labels(path) -> np.ndarray:
    labels = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            token = line.strip()
            if not token:
                continue
            labels.append(_parse_label(token, path, line_no, line.index(token) + 1))
    return _labels_array(labels)


def load_dense_csv(path, labels_path=None) -> Dataset:
    rows = []
    width = None
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.rstrip("\r\n")
            if not text.strip():
                continue
            values = []
            col = 1
            for cell in text.split(","):
                values.append(_parse_float(cell.strip(), path, line_no, col))
                col += len(cell) + 1
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(f"expected {width} columns, got {len(values)}", path, line_no)
            rows.append(values)
    if not rows:
        raise ParseError("no data rows", path)
    X = np.asarray(rows, dtype=np.float64)
    y = _attach_labels(X, labels_path)
    return Dataset(X, y)


def _attach_labels(X, labels_path):
    if labels_path is None:
        return None
    y = load_labels(labels_path)
    if y.shape[0] != X.shape[0]:
        raise ShapeMismatchError(
            f"{labels_path} has {y.shape[0]} labels but the data has {X.shape[0]} rows"
        )
    return y


def load_svmlight(path, labels_path=None, n_features=None) -> Dataset:
    """Parse svmlight-style sparse text into a dense :class:`Dataset`."""
    rows, labels = [], []
    max_index = 0
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0]
            if not text.strip():
                continue
            entries = []
            prev = 0
            label = None
            for i, (token, col) in enumerate(_tokens(text)):
                if ":" not in token:
                    if i != 0 or labels_path is not None:
                        raise ParseError(f"expected index:value, got {token!r}",
                                         path, line_no, col)
                    label = _parse_label(token, path, line_no, col)
                    continue
                idx_s, val_s = token.split(":", 1)
                try:
                    idx = int(idx_s)
                except ValueError:
                    raise ParseError(f"bad feature index {idx_s!r}", path, line_no, col) from None
                if idx < 1:
                    raise ParseError(f"feature indices are 1-based, got {idx}", path, line_no, col)
                if idx <= prev:
                    raise ParseError(f"feature index {idx} not strictly increasing",
                                     path, line_no, col)
                prev = idx
                entries.append((idx, _parse_float(val_s, path, line_no, col + len(idx_s) + 1)))
            if labels_path is None:
                if label is None:
                    raise ParseError("missing label", path, line_no, 1)
                labels.append(label)
            max_index = max(max_index, prev)
            rows.append(entries)
    if not rows:
        raise ParseError("no data rows", path)
    d = max_index if n_features is None else int(n_features)
    if max_index > d:
        raise ShapeMismatchError(f"feature index {max_index} exceeds n_features={d}")
    X = np.zeros((len(rows), max(d, 1)))
    for r, entries in enumerate(rows):
        for idx, val in entries:
            X[r, idx - 1] = val
    if labels_path is not None:
        y = _attach_labels(X, labels_path)
    else:
        y = _labels_array(labels)
    return Dataset(X, y)


def load(spec: DatasetSpec) -> Dataset:
    if spec.format == "dense_csv":
        ds = load_dense_csv(spec.path, spec.labels_path)
        if spec.n_features is not None and ds.n_features != spec.n_features:
            raise ShapeMismatchError(
                f"{spec.path} has {ds.n_features} columns, expected {spec.n_features}"
            )
        return ds
    return load_svmlight(spec.path, spec.labels_path, spec.n_features)


# -- dexter ------------------------------------------------------------------------

DEXTER_SHAPE = (300, 20_000)

DEXTER_URLS = {
    "dexter_train.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/"
                         "dexter/DEXTER/dexter_train.data",
    "dexter_train.labels": "https://archive.ics.uci.edu/ml/machine-learning-databases/"
                           "dexter/DEXTER/dexter_train.labels",
}

# SHA-256 of the public distribution files and of the converted cache file
DEXTER_SHA256 = {
    "dexter_train.data": "19f6a64c41bedd198f61b919f8b8bca98ee1173ca60db45f3aa980f1294d1fd0",
    "dexter_train.labels": "903477b77d8a81cc56828bb25626cd05a7fc95e3b67b6358faeee7cbdd85dbbc",
    "dexter_train.svm": "560237afc3b980379102cc679c8b683f73e1d0baca403c9c9b800bad4f99e59e",
}

DEXTER_FILE = "dexter_train.svm"


def data_home(cache_dir=None) -> Path:
    """Cache root: argument, else ``$HUBNESS_DATA``, else ``~/.cache/hubness``."""
    if cache_dir is not None:
        return Path(cache_dir)
    env = os.environ.get("HUBNESS_DATA")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hubness"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _verify(path: Path, name: str):
    expected = DEXTER_SHA256.get(name)
    if expected is not None and _sha256(path) != expected:
        raise HashMismatchError(f"{path} does not match the pinned SHA-256 of {name}")


def _download(url: str, dest: Path, timeout: float):
    tmp = dest.with_suffix(dest.suffix + ".part")
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp, open(tmp, "wb") as fh:
            shutil.copyfileobj(resp, fh)
    except (urllib.error.URLError, OSError) as exc:
        tmp.unlink(missing_ok=True)
        raise NetworkUnavailableError(
            f"could not download {url} ({exc}); place the dexter files in {dest.parent} "
            f"or set HUBNESS_DATA to a directory containing them"
        ) from exc
    tmp.replace(dest)


def _convert_dexter(raw_dir: Path, out: Path):
    """Merge labels into the sparse data lines (dexter indices are already 1-based)."""
    with open(raw_dir / "dexter_train.labels") as fh:
        labels = [line.strip() for line in fh if line.strip()]
    with open(raw_dir / "dexter_train.data") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if len(labels) != len(lines):
        raise ShapeMismatchError(
            f"dexter labels ({len(labels)}) and data rows ({len(lines)}) differ"
        )
    tmp = out.with_suffix(".part")
    with open(tmp, "w", newline="\n") as fh:
        for label, line in zip(labels, lines):
            fh.write(f"{int(label):+d} {line}\n")
    tmp.replace(out)


def fetch_dexter(cache_dir=None, timeout: float = 60.0) -> DatasetSpec:
    """Download (once), verify and convert the dexter training split.

    Raises
    ------
    HashMismatchError
        A cached or downloaded file differs from its pinned checksum.
    NetworkUnavailableError
        The files are neither cached nor downloadable.
    """
    root = data_home(cache_dir) / "dexter"
    root.mkdir(parents=True, exist_ok=True)
    out = root / DEXTER_FILE
    spec = DatasetSpec(out, "svmlight_sparse", None, DEXTER_SHAPE[1])
    if out.exists():
        _verify(out, DEXTER_FILE)
        return spec
    for name, url in DEXTER_URLS.items():
        raw = root / name
        if not raw.exists():
            _download(url, raw, timeout)
        _verify(raw, name)
    _convert_dexter(root, out)
    _verify(out, DEXTER_FILE)
    return spec


def load_dexter(cache_dir=None):
    """Dexter training split as ``(X, y)``: 300 x 20,000 counts, labels in {-1, +1}."""
    ds = load(fetch_dexter(cache_dir))
    if ds.features.shape != DEXTER_SHAPE:
        raise ShapeMismatchError(f"dexter has shape {ds.features.shape}, expected {DEXTER_SHAPE}")
    return ds.features, ds.labels
