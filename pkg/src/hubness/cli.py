"""Command-line interface.

Subcommands print one JSON report on stdout::

    hubness analyze --data ring.csv --metric euclidean --k 2
    hubness reduce  --data X.csv --k 10 --hubness mp --out graph.bin
    hubness knn     --data dexter --metric cosine --k 5 --cv 5 --hubness mp
    hubness bench   --data gaussian:10000,25 --k 10 --search hnsw --ef 50,200

Errors go to stderr with a nonzero exit status.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import analyze
from .annindex import HNSW, RandomProjectionLSH, recall
from .core import Dataset, kneighbors_exact
from .datasets import DatasetSpec, fetch_dexter, fingerprint, load
from .exceptions import HashMismatchError, HubnessError, NetworkUnavailableError
from .graph_io import dumps_graph
from .model_selection import stratified_cv
from .neighbors import KNeighborsClassifier, NearestNeighbors
from .reduction import check_reduction_method
from .report import dumps_report, make_report

HUBNESS_CHOICES = ("mp", "mp_gauss", "ls", "nicdm", "dsl")

def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _int_list(text):
    return [_positive_int(part) for part in text.split(",") if part]


def _add_common(p, default_k):
    p.add_argument("--data", required=True,
                   help="data file, 'dexter', or 'gaussian:N,D' for seeded synthetic data")
    p.add_argument("--format", choices=("dense_csv", "svmlight_sparse"),
                   help="input format (default: from the file extension)")
    p.add_argument("--labels", help="labels file, one label per line")
    p.add_argument("--n-features", type=_positive_int, help="dimensionality of sparse input")
    p.add_argument("--data-home", help="dexter cache directory (default: $HUBNESS_DATA)")
    p.add_argument("--metric", default="euclidean",
                   choices=("euclidean", "squared_euclidean", "cosine"))
    p.add_argument("--k", type=_positive_int, default=default_k, help="neighborhood size")
    p.add_argument("--hubness", choices=HUBNESS_CHOICES, help="hubness reduction method")
    p.add_argument("--k-local", type=_positive_int, default=5,
                   help="neighborhood of LS/NICDM scales and DSL centroids")
    p.add_argument("--candidates", type=_positive_int, default=100,
                   help="candidates per object for approximate search")
    p.add_argument("--search", choices=("exact", "hnsw", "lsh"), default="exact")
    p.add_argument("--ef", type=_int_list, default=[200],
                   help="HNSW query beam width (bench accepts a comma list)")
    p.add_argument("--ef-construction", type=_positive_int, default=200)
    p.add_argument("--M", type=_positive_int, default=16, help="HNSW links per node")
    p.add_argument("--tables", type=_positive_int, default=20, help="LSH tables")
    p.add_argument("--hyperplanes", type=_positive_int, default=12, help="LSH bits per table")
    p.add_argument("--probe-radius", type=int, default=1, help="LSH Hamming probe radius")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hubness", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="hubness measures of the k-neighbor graph")
    _add_common(p, 10)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("reduce", help="hubness-reduce the k-neighbor graph")
    _add_common(p, 10)
    p.add_argument("--out", help="write the reduced graph here (binary)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("knn", help="stratified cross-validated kNN accuracy")
    _add_common(p, 5)
    p.add_argument("--cv", type=_positive_int, default=5, help="number of folds")
    p.add_argument("--weights", choices=("uniform", "distance"), default="uniform")
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("bench", help="recall and timing of approximate search")
    _add_common(p, 10)
    p.set_defaults(func=cmd_bench)
    return parser


# -- helpers -----------------------------------------------------------------------

def _infer_format(path: str) -> str:
    return "dense_csv" if Path(path).suffix.lower() in (".csv", ".txt") else "svmlight_sparse"


def _load(args):
    """Return (Dataset, fingerprint, description)."""
    if args.data == "dexter":
        spec = fetch_dexter(args.data_home)
        return load(spec), fingerprint(spec), {"source": "dexter"}
    if args.data.startswith("gaussian:"):
        try:
            n, d = (int(v) for v in args.data.split(":", 1)[1].split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"argument --data: expected gaussian:N,D, got {args.data!r}") from None
        X = np.random.default_rng(args.seed).standard_normal((n, d))
        return Dataset(X), hashlib.sha256(X.astype("<f8").tobytes()).hexdigest(), \
            {"source": "gaussian"}
    spec = DatasetSpec(args.data, args.format or _infer_format(args.data),
                       args.labels, args.n_features)
    return load(spec), fingerprint(spec), {"source": "file"}


def _algorithm_params(args):
    if args.search == "hnsw":
        return {"M": args.M, "ef_construction": args.ef_construction,
                "ef_search": args.ef[0], "random_state": args.seed,
                "n_candidates": args.candidates}
    if args.search == "lsh":
        return {"n_tables": args.tables, "n_hyperplanes": args.hyperplanes,
                "probe_radius": args.probe_radius, "random_state": args.seed,
                "n_candidates": args.candidates}
    return None


def _estimator_kwargs(args, hubness=True):
    return dict(
        metric=args.metric,
        hubness=args.hubness if hubness else None,
        hubness_params={"k_local": args.k_local},
        algorithm=args.search,
        algorithm_params=_algorithm_params(args),
    )


def _report(args, fp, ds, extra, results, timings):
    # the cache location does not change the result, so it stays out of the report
    params = {k: v for k, v in vars(args).items() if k not in ("func", "data_home", "command")}
    dataset = {"fingerprint": fp, "n_samples": ds.n_samples,
               "n_features": ds.n_features, **extra}
    return make_report(args.command, params, dataset, results, timings)


# -- subcommands -------------------------------------------------------------------

def cmd_analyze(args):
    t0 = time.perf_counter()
    ds, fp, extra = _load(args)
    t1 = time.perf_counter()
    nn = NearestNeighbors(n_neighbors=args.k, **_estimator_kwargs(args)).fit(ds.features)
    estimate = analyze(nn.kneighbors_graph())
    t2 = time.perf_counter()
    return _report(args, fp, ds, extra, estimate.to_dict(),
                   {"load_seconds": t1 - t0, "analyze_seconds": t2 - t1})


def cmd_reduce(args):
    if args.hubness is None:
        raise HubnessError("argument --hubness: required for reduce")
    t0 = time.perf_counter()
    ds, fp, extra = _load(args)
    t1 = time.perf_counter()
    before = NearestNeighbors(n_neighbors=args.k, **_estimator_kwargs(args, hubness=False))
    before_graph = before.fit(ds.features).kneighbors_graph()
    after = NearestNeighbors(n_neighbors=args.k, **_estimator_kwargs(args))
    after_graph = after.fit(ds.features).kneighbors_graph()
    t2 = time.perf_counter()
    payload = dumps_graph(after_graph)
    graph_info = {"n": after_graph.n_queries, "k": after_graph.k,
                  "sha256": hashlib.sha256(payload).hexdigest()}
    if args.out:
        Path(args.out).write_bytes(payload)
    results = {
        "method": check_reduction_method(args.hubness),
        "before": analyze(before_graph).to_dict(),
        "after": analyze(after_graph).to_dict(),
        "graph": graph_info,
    }
    return _report(args, fp, ds, extra, results,
                   {"load_seconds": t1 - t0, "reduce_seconds": t2 - t1})


def cmd_knn(args):
    t0 = time.perf_counter()
    ds, fp, extra = _load(args)
    if ds.labels is None:
        raise HubnessError("argument --data: knn needs labels (svmlight labels or --labels)")
    t1 = time.perf_counter()
    clf = KNeighborsClassifier(n_neighbors=args.k, weights=args.weights,
                               **_estimator_kwargs(args))
    cv = stratified_cv(clf, ds.features, ds.labels, args.cv)
    t2 = time.perf_counter()
    return _report(args, fp, ds, extra, cv.to_dict(),
                   {"load_seconds": t1 - t0, "cv_seconds": t2 - t1})


def cmd_bench(args):
    t0 = time.perf_counter()
    ds, fp, extra = _load(args)
    X = ds.features
    timings = {"load_seconds": time.perf_counter() - t0}
    backends = ["hnsw", "lsh"] if args.search == "exact" else [args.search]
    rows = []
    truth = {}
    for backend in backends:
        metric = "cosine" if backend == "lsh" else args.metric
        if metric not in truth:
            t = time.perf_counter()
            truth[metric] = kneighbors_exact(X, args.k, metric).indices
            timings[f"exact_{metric}_seconds"] = time.perf_counter() - t
        t = time.perf_counter()
        if backend == "hnsw":
            index = HNSW(M=args.M, ef_construction=args.ef_construction,
                         metric=metric, random_state=args.seed).fit(X)
        else:
            index = RandomProjectionLSH(n_tables=args.tables, n_hyperplanes=args.hyperplanes,
                                        probe_radius=args.probe_radius, metric=metric,
                                        random_state=args.seed).fit(X)
        timings[f"{backend}_build_seconds"] = time.perf_counter() - t
        settings = args.ef if backend == "hnsw" else [None]
        for ef in settings:
            if ef is not None:
                index.ef_search = ef
            t = time.perf_counter()
            ind = index.kneighbors(n_neighbors=args.k, return_distance=False)
            label = backend if ef is None else f"{backend}_ef{ef}"
            timings[f"{label}_query_seconds"] = time.perf_counter() - t
            rows.append({"backend": backend, "metric": metric, "ef_search": ef,
                         "recall": recall(ind, truth[metric])})
    return _report(args, fp, ds, extra, {"k": args.k, "rows": rows}, timings)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"hubness {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (HubnessError, HashMismatchError, NetworkUnavailableError, OSError) as exc:
        print(f"hubness {args.command}: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(dumps_report(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
