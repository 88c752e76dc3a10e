#!/usr/bin/env python3
"""Benchmark the compiled edit-distance kernels against the pure-Python
fallback on retrieval-shaped workloads (one query scored against a whole
catalog) and on pairwise homophone-mining sweeps.

Run: python3 benchmarks/bench_kernels.py [--entities 20000] [--queries 50]
"""

from __future__ import annotations

import argparse
import random
import time

from entfix import _pykernels

try:
    from entfix import _ckernels
except ImportError:
    _ckernels = None

SYLLABLES = [c + t for c in ("zha", "wei", "li", "min", "hua", "qin",
                             "yan", "chen", "jia", "he", "yu", "ton")
             for t in "1234"]


def make_catalog(rng: random.Random, count: int) -> list[tuple[str, ...]]:
    return [tuple(rng.choices(SYLLABLES, k=rng.randint(1, 4)))
            for _ in range(count)]


def bench_retrieval(impl, queries, catalog) -> float:
    started = time.perf_counter()
    for query in queries:
        impl.levenshtein_batch(query, catalog)
    return time.perf_counter() - started


def bench_pairwise(impl, seqs) -> float:
    started = time.perf_counter()
    for i, a in enumerate(seqs):
        for b in seqs[i + 1:]:
            impl.levenshtein(a, b)
    return time.perf_counter() - started


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--entities", type=int, default=20000)
    parser.add_argument("--queries", type=int, default=50)
    parser.add_argument("--pairwise", type=int, default=400)
    args = parser.parse_args()

    rng = random.Random(0)
    catalog = make_catalog(rng, args.entities)
    queries = make_catalog(rng, args.queries)
    mining = make_catalog(rng, args.pairwise)

    print(f"retrieval: {args.queries} queries x {args.entities} entities")
    py_retrieval = bench_retrieval(_pykernels, queries, catalog)
    print(f"  python  {py_retrieval:8.3f}s")
    if _ckernels is not None:
        c_retrieval = bench_retrieval(_ckernels, queries, catalog)
        print(f"  c       {c_retrieval:8.3f}s   ({py_retrieval / c_retrieval:5.1f}x)")

    pairs = args.pairwise * (args.pairwise - 1) // 2
    print(f"pairwise mining: {pairs} pairs")
    py_pairwise = bench_pairwise(_pykernels, mining)
    print(f"  python  {py_pairwise:8.3f}s")
    if _ckernels is not None:
        c_pairwise = bench_pairwise(_ckernels, mining)
        print(f"  c       {c_pairwise:8.3f}s   ({py_pairwise / c_pairwise:5.1f}x)")
    if _ckernels is None:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
