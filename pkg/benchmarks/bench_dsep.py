#!/usr/bin/env python3
"""Benchmark the two d-separation kernels against each other.

Runs a sweep of separation queries over random DAGs through the compiled
extension (when built) and the pure-Python fallback, verifying agreement on
the fly and reporting queries per second.

    python3 benchmarks/bench_dsep.py --nodes 12 --graphs 80
"""

import argparse
import itertools
import random
import sys
import time
from array import array

from teleo import _dsep_py

try:
    from teleo import _dsep_c
except ImportError:
    _dsep_c = None


def random_graph(rng: random.Random, n: int, edge_prob: float):
    order = list(range(n))
    rng.shuffle(order)
    parents = [[] for _ in range(n)]
    children = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                parents[order[j]].append(order[i])
                children[order[i]].append(order[j])

    def csr(adj):
        indptr, idx = array("i", [0]), array("i")
        for row in adj:
            idx.extend(row)
            indptr.append(len(idx))
        return indptr, idx

    return (*csr(parents), *csr(children))


def build_workload(args):
    rng = random.Random(args.seed)
    workload = []
    for _ in range(args.graphs):
        graph = random_graph(rng, args.nodes, args.edge_prob)
        queries = []
        nodes = range(args.nodes)
        for x, y in itertools.combinations(nodes, 2):
            rest = [v for v in nodes if v not in (x, y)]
            for _ in range(args.queries_per_pair):
                z = rng.sample(rest, rng.randint(0, min(len(rest), args.max_given)))
                in_z = bytearray(args.nodes)
                for v in z:
                    in_z[v] = 1
                queries.append((x, y, in_z))
        workload.append((graph, queries))
    return workload


def run(kernel, workload, n):
    started = time.perf_counter()
    verdicts = []
    for (pi, px, ci, cx), queries in workload:
        for x, y, in_z in queries:
            verdicts.append(kernel(n, pi, px, ci, cx, x, y, in_z))
    return time.perf_counter() - started, verdicts


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=12)
    parser.add_argument("--graphs", type=int, default=60)
    parser.add_argument("--edge-prob", type=float, default=0.4)
    parser.add_argument("--queries-per-pair", type=int, default=4)
    parser.add_argument("--max-given", type=int, default=4)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    workload = build_workload(args)
    total = sum(len(q) for _, q in workload)
    print(f"{args.graphs} graphs x {args.nodes} nodes, {total} queries, "
          f"best of {args.repeats} runs\n")

    kernels = [("pure", _dsep_py.active_trail_reachable)]
    if _dsep_c is not None:
        kernels.append(("compiled", _dsep_c.active_trail_reachable))
    else:
        print("compiled kernel not built; run: python3 setup.py build_ext --inplace\n")

    results = {}
    baseline_verdicts = None
    for name, kernel in kernels:
        best = None
        for _ in range(args.repeats):
            elapsed, verdicts = run(kernel, workload, args.nodes)
            best = elapsed if best is None else min(best, elapsed)
        if baseline_verdicts is None:
            baseline_verdicts = verdicts
        elif verdicts != baseline_verdicts:
            print("kernels disagree; aborting")
            return 1
        results[name] = best
        print(f"{name:>9}: {best:8.4f}s  {total / best:12,.0f} queries/s")

    if len(results) == 2:
        print(f"\nspeedup: {results['pure'] / results['compiled']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
