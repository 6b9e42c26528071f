"""Command-line interface: spectrum, cluster, test, generate, simulate.

Exit codes: 0 success, 2 input/domain error, 3 numeric error, 10 success
with quality warnings (outputs still written).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import diagnostics as diag_mod
from .diagnostics import (
    HIGH_CONDUCTANCE,
    TOO_FEW_CLUSTERS,
    choose_num_clusters,
    cluster_pipeline,
    write_partition_csv,
)
from .errors import CapacityError, DomainError, InputError, NetclustError, NumericError
from .graph import Graph, Partition, read_edge_list, write_edge_list
from .inference import MomentSample, cluster_means, hac_ttest, iid_ttest, randomization_test
from .simulate import SimulationConfig, generate_graph, run_monte_carlo
from .spectral import spectrum

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_WARNING = 10


def _read_csv_rows(path, expected_prefix: str, columns: int) -> list[list[str]]:
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if parts[0] == expected_prefix:  # header row
                continue
            if len(parts) < columns:
                raise InputError(f"{path}:{lineno}: expected {columns} columns")
            rows.append(parts)
    return rows


def _cmd_spectrum(args) -> int:
    g, ids = read_edge_list(args.edges)
    if g.n == 0:
        raise InputError(f"{args.edges}: no edges found")
    report = spectrum(g, k=args.k)
    report.export_csv(f"{args.out}.csv")
    lam = report.eigenvalues
    head = lam[: min(len(lam), 20 if args.k is None else args.k)]
    summary = {
        "schema": "netclust-spectrum-summary-v1",
        "n": g.n,
        "eigenvalues_head": [float(x) for x in head],
        "gaps_head": [float(x) for x in np.diff(head)],
        "zero_multiplicity": report.zero_multiplicity(),
        "suggested_L": choose_num_clusters(report, threshold=args.threshold),
        "threshold": args.threshold,
    }
    with open(f"{args.out}.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _cmd_cluster(args) -> int:
    g, ids = read_edge_list(args.edges)
    part, diag = cluster_pipeline(
        g,
        L_giant=args.num_clusters,
        min_size=args.min_size,
        seed=args.seed,
        threshold=args.threshold,
    )
    write_partition_csv(part, f"{args.out}.partition.csv", diagnostics=diag, node_ids=ids)
    diag.export_json(f"{args.out}.diagnostics.json")
    if HIGH_CONDUCTANCE in diag.warnings or TOO_FEW_CLUSTERS in diag.warnings:
        for w in diag.warnings:
            print(f"warning: {w}", file=sys.stderr)
        return EXIT_WARNING
    return EXIT_OK


def _load_values(path, id_to_pos: dict, n: int) -> np.ndarray:
    vals = np.full(n, np.nan)
    for parts in _read_csv_rows(path, "node", 2):
        node = int(parts[0])
        if node not in id_to_pos:
            raise InputError(f"{path}: node {node} not present in the edge list")
        vals[id_to_pos[node]] = float(parts[1])
    if np.isnan(vals).any():
        missing = int(np.isnan(vals).sum())
        raise InputError(f"{path}: values missing for {missing} nodes")
    return vals


def _load_partition(path, id_to_pos: dict, n: int) -> tuple[Partition, np.ndarray]:
    labels = np.full(n, -1, dtype=np.int64)
    discarded_labels = set()
    for parts in _read_csv_rows(path, "node", 3):
        node, cluster, disc = int(parts[0]), int(parts[1]), int(parts[2])
        if node not in id_to_pos:
            raise InputError(f"{path}: node {node} not present in the edge list")
        labels[id_to_pos[node]] = cluster
        if disc:
            discarded_labels.add(cluster)
    if (labels < 0).any():
        raise InputError(f"{path}: cluster labels missing for some nodes")
    L = int(labels.max()) + 1
    part = Partition(labels=labels, L=L)
    retained = np.array([l not in discarded_labels for l in range(L)])
    return part, retained


def _cmd_test(args) -> int:
    g, ids = read_edge_list(args.edges)
    id_to_pos = {int(orig): k for k, orig in enumerate(ids)}
    values = MomentSample(_load_values(args.values, id_to_pos, g.n))
    if args.method == "rand":
        if args.partition is None:
            raise InputError("--method rand requires --partition")
        part, retained = _load_partition(args.partition, id_to_pos, g.n)
        est = cluster_means(values, part, retained)
        result = randomization_test(est, args.null, args.alpha)
    elif args.method == "hac":
        result = hac_ttest(values, g, args.null, args.alpha, bandwidth=args.bandwidth)
    else:
        result = iid_ttest(values, args.null, args.alpha)
    result.export_json(args.out)
    return EXIT_OK


def _cmd_generate(args) -> int:
    params = {}
    for key in ("target_degree", "radius_divisor", "kappa", "blocks", "p_in", "p_out",
                "poisson_mean"):
        val = getattr(args, key)
        if val is not None:
            params[key] = val
    if args.model == "configuration":
        params.setdefault("poisson_mean", 8.0)
        params.setdefault("degree_min", 1)
        params.setdefault("degree_max", 20)
    defaults = {
        "rgg": {"target_degree": 5.0},
        "rcm": {"target_degree": 5.0, "radius_divisor": 3.5},
        "er": {"kappa": 5.0},
        "sbm": {"blocks": 10},
        "configuration": {},
    }
    merged = {**defaults.get(args.model, {}), **params}
    if args.model == "sbm":
        merged.setdefault("p_in", 10.0 / args.n)
        merged.setdefault("p_out", (40.0 / 9.0) / args.n)
    gg = generate_graph(args.model, args.n, merged, args.seed)
    write_edge_list(gg.graph, f"{args.out}.edges")
    gg.export_metadata(f"{args.out}.meta.json")
    if gg.positions is not None:
        gg.export_positions_csv(f"{args.out}.positions.csv")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = SimulationConfig.from_json(args.config)
    if args.workers is not None:
        cfg.workers = args.workers
    result = run_monte_carlo(cfg)
    result.to_csv(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netclust",
        description="Network cluster quality diagnostics and cluster-robust inference.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="Laplacian spectrum of an edge-list graph")
    p.add_argument("edges", help="edge-list file")
    p.add_argument("--k", type=int, default=None, help="number of smallest eigenpairs")
    p.add_argument("--threshold", type=float, default=0.05,
                   help="eigenvalue threshold for the suggested cluster count")
    p.add_argument("--out", required=True, help="output base path (.csv and .json)")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("cluster", help="spectral clustering pipeline with diagnostics")
    p.add_argument("edges")
    p.add_argument("--num-clusters", type=int, default=None,
                   help="cluster count for the giant component (default: spectrum rule)")
    p.add_argument("--min-size", type=int, default=20)
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True,
                   help="output base path (.partition.csv and .diagnostics.json)")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("test", help="run a cluster-robust or HAC/IID test")
    p.add_argument("--method", choices=("rand", "hac", "iid"), required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--null", type=float, default=0.0)
    p.add_argument("--bandwidth", type=int, default=None)
    p.add_argument("--values", required=True, help="values CSV (node,value)")
    p.add_argument("--edges", required=True, help="edge-list file")
    p.add_argument("--partition", default=None, help="partition CSV (node,cluster,discarded)")
    p.add_argument("--out", required=True, help="output TestResult JSON path")
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("generate", help="generate a random graph")
    p.add_argument("--model", choices=("rgg", "rcm", "er", "sbm", "configuration"),
                   required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-degree", type=float, default=None)
    p.add_argument("--radius-divisor", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--blocks", type=int, default=None)
    p.add_argument("--p-in", type=float, default=None)
    p.add_argument("--p-out", type=float, default=None)
    p.add_argument("--poisson-mean", type=float, default=None)
    p.add_argument("--out", required=True,
                   help="output base path (.edges, .meta.json, .positions.csv)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("simulate", help="run a Monte Carlo design from a config file")
    p.add_argument("--config", required=True, help="SimulationConfig JSON")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (NETCLUST_THREADS env overrides)")
    p.add_argument("--out", required=True, help="results CSV path")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DomainError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
