"""Command-line interface: enumerate/sample ensembles, compute lifted
distances and distance matrices, and embed matrices into the plane.

Output files are written atomically (temp file + rename), so a failing
run never leaves a partial artifact behind.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import __version__
from .assignment import METRICS, lifted_distance
from .embedding import mds, save_coords_csv
from .ensemble import DistanceMatrix, EnsembleSpec, enumerate_grid_partitions, flip_chain, pairwise_matrix
from .errors import InvalidArgumentError, PartDistError
from .graph import diameter, grid_graph, load_graph, save_graph
from .partition import load_ensemble, load_partition_csv, load_vertex_weights, save_ensemble


def _atomic_write(path: str, write_fn) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partdist-", suffix=".tmp")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidArgumentError(f"bad --lambda value {text!r}") from exc


def _resolve_lambda(args, g) -> Fraction | None:
    if args.metric != "unbalanced":
        return None if args.lam is None else _parse_rational(args.lam)
    if args.lam is None:
        return diameter(g) / 2  # collapse threshold; safest default
    return _parse_rational(args.lam)


def _load_weights(args, g):
    if getattr(args, "weights", None):
        return load_vertex_weights(args.weights, g)
    if getattr(args, "representation", "uniform") == "weighted":
        raise InvalidArgumentError("--representation weighted requires --weights")
    return None


def _write_matrix(matrix: DistanceMatrix, path: str) -> None:
    if path.endswith(".json"):
        payload = {
            "n": matrix.n,
            "d": [float(x) for row in matrix.entries for x in row],
        }
        _atomic_write(path, lambda tmp: _dump_json(payload, tmp))
    else:
        def write_csv(tmp):
            with open(tmp, "w") as fh:
                for row in matrix.entries:
                    fh.write(",".join(repr(float(x)) for x in row))
                    fh.write("\n")
        _atomic_write(path, write_csv)


def _dump_json(payload, tmp):
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_matrix(path: str) -> np.ndarray:
    """Read a distance matrix from headerless CSV or {"n":..,"d":[..]} JSON."""
    if path.endswith(".json"):
        with open(path) as fh:
            data = json.load(fh)
        n = data["n"]
        flat = data["d"]
        if len(flat) != n * n:
            raise InvalidArgumentError(f"matrix JSON in {path} has wrong length")
        return np.array(flat, dtype=float).reshape(n, n)
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidArgumentError(f"matrix CSV in {path} is not square")
    return arr


def _parse_beta(text: str) -> tuple[tuple[int, float], ...]:
    if not text:
        return ()
    points = []
    for item in text.split(","):
        try:
            step, value = item.split(":")
            points.append((int(step), float(value)))
        except ValueError as exc:
            raise InvalidArgumentError(
                f"bad --beta entry {item!r}; expected step:value,step:value,..."
            ) from exc
    return tuple(points)


# ---------------------------------------------------------------------------
# subcommands


def cmd_gridgraph(args) -> int:
    g = grid_graph(args.rows, args.cols)
    _atomic_write(args.out, lambda tmp: save_graph(g, tmp))
    return 0


def cmd_enumerate(args) -> int:
    parts = enumerate_grid_partitions(
        args.rows, args.cols, args.k, args.min, args.max, connected=not args.allow_disconnected
    )
    if args.out:
        _atomic_write(args.out, lambda tmp: save_ensemble(parts, tmp))
    print(len(parts))
    return 0


def cmd_dist(args) -> int:
    g = load_graph(args.graph)
    weights = _load_weights(args, g)
    a = load_partition_csv(args.partition_a, g, representation=args.representation, vertex_weights=weights)
    b = load_partition_csv(args.partition_b, g, representation=args.representation, vertex_weights=weights)
    lam = _resolve_lambda(args, g)
    match = lifted_distance(g, a, b, metric=args.metric, lam=lam)
    print(match.value)
    print("matching:", " ".join(str(j) for j in match.permutation))
    return 0


def cmd_matrix(args) -> int:
    g = load_graph(args.graph)
    weights = _load_weights(args, g)
    parts = load_ensemble(args.ensemble, g, representation=args.representation, vertex_weights=weights)
    lam = _resolve_lambda(args, g)
    matrix = pairwise_matrix(g, parts, metric=args.metric, lam=lam, workers=args.workers)
    _write_matrix(matrix, args.out)
    return 0


def cmd_embed(args) -> int:
    arr = load_matrix(args.matrix)
    coords = mds(arr, dim=args.dim, seed=args.seed)
    _atomic_write(args.out, lambda tmp: save_coords_csv(coords, tmp))
    return 0


def cmd_chain(args) -> int:
    g = load_graph(args.graph)
    weights = _load_weights(args, g)
    start = load_partition_csv(args.start, g, representation=args.representation, vertex_weights=weights)
    spec = EnsembleSpec(
        source="flip_chain",
        k=start.k,
        steps=args.steps,
        stride=args.stride,
        seed=args.seed,
        beta_schedule=_parse_beta(args.beta),
        tolerance=args.tolerance,
        anneal_sign=1 if args.favor_long_boundaries else -1,
    )
    samples = flip_chain(g, start, spec)
    _atomic_write(args.out, lambda tmp: save_ensemble(samples, tmp))
    return 0


def _add_common_metric_flags(sub) -> None:
    sub.add_argument("--metric", choices=METRICS, default="transport")
    sub.add_argument("--lambda", dest="lam", default=None,
                     help="slack price for the unbalanced metric (default: diameter/2)")
    sub.add_argument("--representation", choices=("uniform", "weighted", "unbalanced"),
                     default="uniform")
    sub.add_argument("--weights", default=None, help="vertex_id,weight CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partdist",
        description="Transport-based distances between graph partitions",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gridgraph", help="write a grid graph as JSON")
    p.add_argument("rows", type=int)
    p.add_argument("cols", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gridgraph)

    p = sub.add_parser("enumerate", help="enumerate grid partitions; prints the count")
    p.add_argument("rows", type=int)
    p.add_argument("cols", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--min", type=int, required=True)
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--allow-disconnected", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("dist", help="lifted distance between two partitions")
    p.add_argument("graph")
    p.add_argument("partition_a")
    p.add_argument("partition_b")
    _add_common_metric_flags(p)
    p.set_defaults(fn=cmd_dist)

    p = sub.add_parser("matrix", help="pairwise distance matrix over an ensemble")
    p.add_argument("graph")
    p.add_argument("ensemble")
    _add_common_metric_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help=".csv (headerless) or .json")
    p.set_defaults(fn=cmd_matrix)

    p = sub.add_parser("embed", help="MDS-embed a distance matrix")
    p.add_argument("matrix")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("chain", help="flip-walk Markov chain from a start partition")
    p.add_argument("graph")
    p.add_argument("start")
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--beta", default="", help="schedule breakpoints step:value,step:value,...")
    p.add_argument("--favor-long-boundaries", action="store_true",
                   help="flip the annealing sign to reward long boundaries")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--representation", choices=("uniform", "weighted", "unbalanced"),
                   default="uniform")
    p.add_argument("--weights", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_chain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (PartDistError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
