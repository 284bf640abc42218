"""``ringbench`` command line: sweeps, single builds, training, eval, adapt.

Exit codes: 0 success, 1 usage error, 2 data error (files, formats,
dimension mismatches), 3 numeric failure (training divergence, non-finite
results).

Topology edge-list format: first line ``n``, then one ``u,v,w_uv`` row per
edge.  Sweep CSV schema: ``size,run,method,k,diameter_ms,build_steps,
wall_ms`` where build_steps counts sequential node-selection steps (rings:
K*N; parallel rings: K*(ceil(N/M) + leftovers + 1); chord/perigee: N; ga:
evaluations consumed).
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from .adaptive import decide, default_samples, gossip_aggregate, measure_all
from .ga import GaConfig, ga_search
from .graphs import DegreeBound, LatencyMatrix, Topology, apply_ring
from .latency import (
    MatrixFormatError,
    SiteModel,
    gen_gaussian,
    gen_site_composite,
    gen_uniform,
    load_matrix,
)
from .overlays import (
    OverlaySpec,
    chord_topology,
    k_ring_mix,
    nearest_neighbor_ring,
    perigee_topology,
    random_ring,
    rapid_k_ring,
)
from .parallel import NearestNeighborSelector, QGreedySelector, parallel_k_ring
from .paths import diameter
from .qlearn import (
    CheckpointFormatError,
    TrainConfig,
    TrainingDiverged,
    greedy_construct,
    load_model,
    save_model,
    train,
)
from .rng import derive_seed, make_rng

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

DEFAULT_SIZES = list(range(50, 1001, 50))


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _hop_matrix(n: int) -> LatencyMatrix:
    return LatencyMatrix(np.ones((n, n)) - np.eye(n))


def _resolve_matrix(args, n: int, seed: int) -> LatencyMatrix:
    if getattr(args, "matrix", None):
        return load_matrix(args.matrix)
    dist = args.dist
    if dist == "uniform":
        return gen_uniform(n, seed)
    if dist == "gaussian":
        return gen_gaussian(n, seed)
    if dist.startswith("site:"):
        model = SiteModel.from_json(dist[5:])
        return gen_site_composite(model, seed)
    raise MatrixFormatError(f"unknown distribution {dist!r}")


def _resolve_k(k_rule: str, n: int) -> DegreeBound:
    if k_rule == "log2ceil":
        return DegreeBound.log2ceil(n)
    if k_rule.startswith("fixed:"):
        return DegreeBound(int(k_rule[6:]))
    raise _UsageError(f"--k must be log2ceil or fixed:K, got {k_rule!r}")


def _build_method(method: str, w: LatencyMatrix, k: DegreeBound, seed: int, args):
    """Returns (topology, build_steps)."""
    n = w.n
    if method in ("random-kring", "rapid"):
        return rapid_k_ring(n, k, seed), k.k * n
    if method == "nn-kring":
        spec = OverlaySpec("kringmix", n, k, (0, k.k))
        return k_ring_mix(w, spec, seed), k.k * n
    if method.startswith("mix:"):
        m_random, m_shortest = (int(x) for x in method[4:].split(":"))
        spec = OverlaySpec("kringmix", n, DegreeBound(m_random + m_shortest),
                           (m_random, m_shortest))
        return k_ring_mix(w, spec, seed), (m_random + m_shortest) * n
    if method == "chord":
        return chord_topology(n, seed), n
    if method == "chord-nn":
        order = nearest_neighbor_ring(w, 0).order
        return chord_topology(n, seed, order=order), n
    if method in ("perigee", "perigee-random", "perigee-nn"):
        d_out = args.d_out if args.d_out else max(1, math.ceil(math.log2(n)))
        topo = perigee_topology(w, d_out)
        if method == "perigee-random":
            topo = apply_ring(topo, random_ring(n, seed))
        elif method == "perigee-nn":
            start = int(make_rng(seed, 0x4E4E).integers(n))
            topo = apply_ring(topo, nearest_neighbor_ring(w, start))
        return topo, n
    if method == "ga":
        cfg = GaConfig(population=args.population, budget=args.budget, seed=seed)
        result = ga_search(w, k, cfg)
        return result.topology, result.evaluations
    if method in ("dgro", "parallel-dgro") or method == "parallel-nn":
        if method == "dgro":
            model = load_model(args.model)
            starts = make_rng(seed, 0x44475230).choice(n, size=min(args.starts, n),
                                                       replace=False)
            best, _ = _best_of_starts(w, model, starts, k.k)
            return best, k.k * n
        selector = (
            NearestNeighborSelector()
            if method == "parallel-nn"
            else QGreedySelector(load_model(args.model))
        )
        m = args.partitions
        topo = parallel_k_ring(w, k, m, selector, seed, mode=args.partition_mode,
                               leftover_mode=args.leftover_mode)
        chain = k.k * (math.ceil(n / m) + n % m + 1)
        return topo, chain
    raise _UsageError(f"unknown method {method!r}")


def _best_of_starts(w, model, starts, k: int):
    """Lowest-diameter construction over starts, preferring completed builds.

    A dead-ended partial build is disconnected mid-ring, so its
    largest-component diameter is not comparable; incomplete results are
    used only when every start dead-ends.
    """
    best, best_key = None, (2, np.inf)
    for s in starts:
        res = greedy_construct(w, model, int(s), k)
        key = (0 if res.completed else 1, diameter(res.topology, w))
        if key < best_key:
            best_key, best = key, res.topology
    return best, best_key[1]


def _write_edge_list(topo: Topology, w: LatencyMatrix, path: str) -> None:
    edges = topo.edge_array()
    with open(path, "w") as f:
        f.write(f"{topo.n}\n")
        for u, v in edges:
            f.write(f"{u},{v},{w.values[u, v]:.17g}\n")


def _load_edge_list(path: str, n_expected: int) -> Topology:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        n = int(lines[0])
    except (IndexError, ValueError):
        raise MatrixFormatError(f"{path}: first line must be the node count")
    if n != n_expected:
        raise MatrixFormatError(f"{path}: topology n={n}, matrix n={n_expected}")
    topo = Topology(n)
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) < 2:
            raise MatrixFormatError(f"{path}: bad edge row {ln!r}")
        topo.add_edge(int(cells[0]), int(cells[1]))
    return topo


# -- subcommands ------------------------------------------------------------


def _cmd_sweep(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else DEFAULT_SIZES
    if any(s < 3 for s in sizes):
        raise _UsageError("--sizes entries must be >= 3")
    methods = args.methods.split(",")
    rows = []
    for size in sizes:
        k = _resolve_k(args.k, size)
        for run in range(args.runs):
            for mi, method in enumerate(methods):
                cell_seed = derive_seed(args.seed, size, run, mi)
                w = _resolve_matrix(args, size, cell_seed)
                if w.n != size and not args.matrix:
                    raise MatrixFormatError(
                        f"site model yields n={w.n}, sweep size {size}"
                    )
                t0 = time.perf_counter()
                topo, steps = _build_method(method, w, k, cell_seed, args)
                d = (
                    diameter(topo, _hop_matrix(w.n))
                    if args.hop_diameter
                    else diameter(topo, w)
                )
                wall_ms = (time.perf_counter() - t0) * 1000.0
                rows.append((size, run, method, k.k, d, steps, wall_ms))
    out = args.out or "sweep.csv"
    with open(out, "w") as f:
        f.write("size,run,method,k,diameter_ms,build_steps,wall_ms\n")
        for size, run, method, kk, d, steps, wall in rows:
            f.write(f"{size},{run},{method},{kk},{d:.9g},{steps},{wall:.3f}\n")
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _cmd_build(args) -> int:
    w = _resolve_matrix(args, args.n, args.seed)
    k = _resolve_k(args.k, w.n)
    topo, steps = _build_method(args.method, w, k, args.seed, args)
    d = diameter(topo, _hop_matrix(w.n)) if args.hop_diameter else diameter(topo, w)
    if args.out:
        _write_edge_list(topo, w, args.out)
    print(f"method={args.method} n={w.n} k={k.k} edges={topo.edge_count} "
          f"steps={steps} diameter_ms={d:.9g}")
    return EXIT_OK


def _cmd_train(args) -> int:
    cfg = TrainConfig(
        n_nodes=args.n,
        k_rings=args.k,
        epochs=args.epochs,
        batch=args.batch,
        lr=args.lr,
        gamma=args.gamma,
        alpha_latency=args.alpha,
        t_embed=args.t_embed,
        seed=args.seed,
        p=args.p,
        hidden=args.hidden,
        distribution=args.dist,
    )
    result = train(cfg)
    save_model(result.model, args.out)
    if args.log:
        with open(args.log, "w") as f:
            f.write("epoch,final_diameter,mean_loss,epsilon,early\n")
            for i, d in enumerate(result.log.final_diameter):
                f.write(
                    f"{i},{d:.9g},{result.log.mean_loss[i]:.9g},"
                    f"{result.log.epsilon[i]:.4f},{int(result.log.early_terminated[i])}\n"
                )
    tail = result.log.final_diameter[-min(100, len(result.log.final_diameter)):]
    print(f"trained {cfg.epochs} epochs; checkpoint -> {args.out}; "
          f"mean diameter over last {len(tail)} episodes: {np.mean(tail):.3f}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    w = _resolve_matrix(args, args.n, args.seed)
    k = _resolve_k(args.k, w.n)
    starts = make_rng(args.seed, 0x44475230).choice(
        w.n, size=min(args.starts, w.n), replace=False
    )
    best_topo, best_diam = _best_of_starts(w, model, starts, k.k)
    if args.out and best_topo is not None:
        _write_edge_list(best_topo, w, args.out)
    print(f"best diameter over {len(starts)} starts: {best_diam:.9g} ms (k={k.k})")
    return EXIT_OK


def _cmd_adapt(args) -> int:
    w = _resolve_matrix(args, args.n, args.seed)
    k = _resolve_k(args.k, w.n)
    if args.topology:
        topo = _load_edge_list(args.topology, w.n)
    else:
        topo, _ = _build_method(args.method, w, k, args.seed, args)
    samples = args.samples or default_samples(w.n)
    stats = measure_all(topo, w, samples, derive_seed(args.seed, 0x4D454153))
    if args.rounds:
        rounds = args.rounds
    else:
        hop_diam = diameter(topo, _hop_matrix(w.n))
        rounds = max(1, int(2 * math.ceil(math.log2(w.n)) * math.ceil(hop_diam)))
    agg = gossip_aggregate(stats, topo, rounds, derive_seed(args.seed, 0x474F5353))
    decision = decide(agg, args.threshold, invert=args.invert)
    print(
        f"rho={decision.rho:.4f} decision={decision.action} "
        f"(avg_local={agg.avg_local:.3f} avg_global={agg.avg_global:.3f} "
        f"avg_min={agg.avg_min:.3f} rounds={rounds} samples={samples})"
    )
    return EXIT_OK


# -- argument wiring ---------------------------------------------------------


def _add_common(p, with_n=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", default="uniform",
                   help="uniform | gaussian | site:MODEL.json")
    p.add_argument("--matrix", help="latency matrix CSV (overrides --dist)")
    if with_n:
        p.add_argument("--n", type=int, default=50)
    p.add_argument("--k", default="log2ceil", help="log2ceil | fixed:K")


def _add_method_extras(p):
    p.add_argument("--model", help="checkpoint for dgro / parallel-dgro")
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--d-out", type=int, default=0, help="perigee out-degree")
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--population", type=int, default=100)
    p.add_argument("--partitions", type=int, default=1)
    p.add_argument("--partition-mode", choices=("stride", "block"), default="stride")
    p.add_argument("--leftover-mode", choices=("seam", "append"), default="seam")
    p.add_argument("--hop-diameter", action="store_true",
                   help="report hop-count diameter instead of latency-weighted")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ringbench", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="size sweep over methods, CSV output")
    _add_common(p, with_n=False)
    p.add_argument("--sizes", help="comma list, default 50,100,...,1000")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--methods", required=True,
                   help="comma list: random-kring,nn-kring,mix:R:S,chord,chord-nn,"
                        "perigee,perigee-random,perigee-nn,ga,dgro,parallel-nn,"
                        "parallel-dgro")
    p.add_argument("--out", help="output CSV path (default sweep.csv)")
    _add_method_extras(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("build", help="build one topology, print its diameter")
    _add_common(p)
    p.add_argument("--method", required=True)
    p.add_argument("--out", help="edge-list output path")
    _add_method_extras(p)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("train", help="train the Q-learning ring builder")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epochs", type=int, default=10_000)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--lr", type=float, default=5e-4)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--t-embed", type=int, default=4)
    p.add_argument("--p", type=int, default=16)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", choices=("uniform", "gaussian"), default="uniform")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--log", help="per-epoch CSV log path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="greedy-construct from a checkpoint")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--out", help="edge-list output path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("adapt", help="measure, aggregate, and pick a ring action")
    _add_common(p)
    p.add_argument("--method", default="random-kring",
                   help="topology builder when --topology is not given")
    p.add_argument("--topology", help="edge-list file to evaluate")
    p.add_argument("--threshold", type=float, default=0.2)
    p.add_argument("--samples", type=int, default=0,
                   help="latency samples per node (default ceil(log2 n))")
    p.add_argument("--rounds", type=int, default=0,
                   help="gossip rounds (default 2*ceil(log2 n)*hop-diameter)")
    p.add_argument("--invert", action="store_true",
                   help="flip the ring-kind convention")
    _add_method_extras(p)
    p.set_defaults(func=_cmd_adapt)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (MatrixFormatError, CheckpointFormatError, FileNotFoundError, OSError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except TrainingDiverged as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except FloatingPointError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
