"""Binary persistence of built indexes.

Layout (all little-endian)::

    header   magic "HKAN" | version u16 | backend u8 | metric u8 | n u64 | d u32
    hnsw     M u32 | ef_construction u32 | ef_search u32 | seed i64
             entry_point i64 | max_level u32 | n_upper u32
             levels i32[n] | counts0 u32[n] | links0 i32[n, 2M]
             n_upper x (counts u32[n] | links i32[n, M])
    rp_lsh   n_tables u32 | n_hyperplanes u32 | probe_radius u32 | seed i64
             hyperplanes f64[n_tables, n_hyperplanes, d] | codes u64[n_tables, n]
    data     f64[n, d]

Link slots hold -1 when unused. A seed of -1 stands for ``random_state=None``.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..exceptions import FormatError
from ._base import HNSW, RandomProjectionLSH

MAGIC = b"HKAN"
VERSION = 1

_BACKENDS = {"hnsw": 1, "rp_lsh": 2}
_METRICS = {"euclidean": 0, "squared_euclidean": 1, "cosine": 2}

_HEADER = struct.Struct("<4sHBBQI")
_HNSW_CFG = struct.Struct("<IIIq")
_HNSW_GRAPH = struct.Struct("<qII")
_LSH_CFG = struct.Struct("<IIIq")


def _seed_out(seed):
    return -1 if seed is None else int(seed)


def _seed_in(seed):
    return None if seed == -1 else seed


def dumps_index(index) -> bytes:
    """Serialize a fitted :class:`HNSW` or :class:`RandomProjectionLSH`."""
    n, d = index.X_.shape
    parts = [_HEADER.pack(MAGIC, VERSION, _BACKENDS[index.backend],
                          _METRICS[index.metric_], n, d)]
    if isinstance(index, HNSW):
        parts.append(_HNSW_CFG.pack(index.M, index.ef_construction, index.ef_search,
                                    _seed_out(index.random_state)))
        n_upper = index.links_up_.shape[0]
        parts.append(_HNSW_GRAPH.pack(index.entry_point_, index.max_level_, n_upper))
        parts.append(index.levels_.astype("<i4").tobytes())
        parts.append(index.counts0_.astype("<u4").tobytes())
        parts.append(index.links0_.astype("<i4").tobytes())
        for layer in range(n_upper):
            parts.append(index.counts_up_[layer].astype("<u4").tobytes())
            parts.append(index.links_up_[layer].astype("<i4").tobytes())
    else:
        parts.append(_LSH_CFG.pack(index.n_tables, index.n_hyperplanes, index.probe_radius,
                                   _seed_out(index.random_state)))
        parts.append(index.hyperplanes_.astype("<f8").tobytes())
        parts.append(index.codes_.astype("<u8").tobytes())
    parts.append(index.X_.astype("<f8").tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def unpack(self, st: struct.Struct):
        if self.pos + st.size > len(self.buf):
            raise FormatError("truncated index file")
        out = st.unpack_from(self.buf, self.pos)
        self.pos += st.size
        return out

    def array(self, dtype, shape):
        dt = np.dtype(dtype)
        count = int(np.prod(shape))
        nbytes = dt.itemsize * count
        if self.pos + nbytes > len(self.buf):
            raise FormatError("truncated index file")
        arr = np.frombuffer(self.buf, dtype=dt, count=count, offset=self.pos)
        self.pos += nbytes
        return arr.reshape(shape)


def loads_index(buf: bytes):
    r = _Reader(buf)
    magic, version, backend, metric, n, d = r.unpack(_HEADER)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported index format version {version}")
    metric_name = {v: k for k, v in _METRICS.items()}.get(metric)
    if metric_name is None:
        raise FormatError(f"unknown metric tag {metric}")
    if backend == _BACKENDS["hnsw"]:
        M, efc, efs, seed = r.unpack(_HNSW_CFG)
        ep, top, n_upper = r.unpack(_HNSW_GRAPH)
        index = HNSW(M=M, ef_construction=efc, ef_search=efs, metric=metric_name,
                     random_state=_seed_in(seed))
        levels = r.array("<i4", (n,)).astype(np.int64)
        c0 = r.array("<u4", (n,)).astype(np.int64)
        L0 = r.array("<i4", (n, 2 * M)).astype(np.int64)
        cup = np.zeros((n_upper, n), dtype=np.int64)
        Lup = np.full((n_upper, n, M), -1, dtype=np.int64)
        for layer in range(n_upper):
            cup[layer] = r.array("<u4", (n,))
            Lup[layer] = r.array("<i4", (n, M))
        X = r.array("<f8", (n, d)).astype(np.float64)
        _restore(index, X, metric_name)
        index.levels_ = levels
        index._set_graph(L0, c0, Lup, cup, ep, top)
    elif backend == _BACKENDS["rp_lsh"]:
        T, B, radius, seed = r.unpack(_LSH_CFG)
        index = RandomProjectionLSH(n_tables=T, n_hyperplanes=B, probe_radius=radius,
                                    metric=metric_name, random_state=_seed_in(seed))
        index.hyperplanes_ = r.array("<f8", (T, B, d)).astype(np.float64)
        codes = r.array("<u8", (T, n)).astype(np.uint64)
        X = r.array("<f8", (n, d)).astype(np.float64)
        _restore(index, X, metric_name)
        index._set_codes(codes)
    else:
        raise FormatError(f"unknown backend tag {backend}")
    if r.pos != len(buf):
        raise FormatError(f"{len(buf) - r.pos} trailing bytes after index payload")
    return index


def _restore(index, X, metric):
    index.metric_ = metric
    index.X_ = np.ascontiguousarray(X)
    index.n_samples_fit_, index.n_features_in_ = X.shape


def save_index(index, path) -> None:
    Path(path).write_bytes(dumps_index(index))


def load_index(path):
    return loads_index(Path(path).read_bytes())
