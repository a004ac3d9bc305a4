"""Binary serialization of self-excluding neighbor graphs.

Layout, little-endian::

    magic   4 bytes  b"HKNG"
    version u16      1
    n       u32      number of rows (= indexed objects)
    k       u32      neighbors per row
    rows    n * k records of (index u32, value f64), row-major, 12 bytes each
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import NeighborGraph
from .exceptions import FormatError

__all__ = ["MAGIC", "VERSION", "dumps_graph", "loads_graph", "save_graph", "load_graph"]

MAGIC = b"HKNG"
VERSION = 1

_HEADER = struct.Struct("<4sHII")
_RECORD = np.dtype([("index", "<u4"), ("value", "<f8")])


def dumps_graph(graph: NeighborGraph) -> bytes:
    if graph.n_queries != graph.n_indexed:
        raise ValueError("only self graphs (one row per indexed object) can be serialized")
    if graph.n_indexed >= 2 ** 32:
        raise ValueError("graph too large for u32 indices")
    n, k = graph.indices.shape
    records = np.empty(n * k, dtype=_RECORD)
    records["index"] = graph.indices.ravel()
    records["value"] = graph.distances.ravel()
    return _HEADER.pack(MAGIC, VERSION, n, k) + records.tobytes()


def loads_graph(buf: bytes) -> NeighborGraph:
    if len(buf) < _HEADER.size:
        raise FormatError("truncated graph header")
    magic, version, n, k = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported graph format version {version}")
    expected = _HEADER.size + n * k * _RECORD.itemsize
    if len(buf) != expected:
        raise FormatError(f"graph payload has {len(buf)} bytes, expected {expected}")
    records = np.frombuffer(buf, dtype=_RECORD, count=n * k, offset=_HEADER.size)
    ind = records["index"].astype(np.int64).reshape(n, k)
    dist = records["value"].astype(np.float64).reshape(n, k)
    return NeighborGraph(ind, dist, n)


def save_graph(graph: NeighborGraph, path) -> None:
    Path(path).write_bytes(dumps_graph(graph))


def load_graph(path) -> NeighborGraph:
    return loads_graph(Path(path).read_bytes())
