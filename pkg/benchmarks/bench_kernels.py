"""Compiled kernels against the pure-Python fallback on fixed workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

from blindtm import _backend
from blindtm.builders import AtMost, build_digraph_kernel, build_sigma_rho
from blindtm.circuit import analyze, compile_machine, weighted_sat_brute, weighted_sat_search
from blindtm.machine import normalize_for_exact, search_accepting
from blindtm.model import Digraph, Graph, IntSetSpec


def cycle(n: int) -> Graph:
    return Graph(n, frozenset((min(i, i % n + 1), max(i, i % n + 1)) for i in range(1, n + 1)))


def workloads():
    zero, pos = IntSetSpec.finite(0), IntSetSpec.positive()
    big = build_sigma_rho(cycle(12), zero, pos, AtMost(4))
    yield "bfs sigma-rho C12 k=4", lambda be: search_accepting(big.machine, (), big.step_bound, be)

    fig = build_sigma_rho(cycle(5), zero, pos, AtMost(2))
    norm = normalize_for_exact(fig.machine, fig.step_bound)
    circ = compile_machine(norm, (), fig.step_bound + 2)
    yield "structure, C5 k=2 circuit", lambda be: analyze(circ, be)
    yield "bcp search, C5 k=2 circuit", lambda be: weighted_sat_search(circ, circ.steps, backend=be)

    tri = Digraph(3, frozenset({(1, 2), (2, 3), (3, 1)}))
    kb = build_digraph_kernel(tri, 0)
    small = compile_machine(normalize_for_exact(kb.machine, kb.step_bound), (), kb.step_bound + 2)
    yield "brute force, kernel k=0 circuit", lambda be: weighted_sat_brute(small, small.steps, be)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _backend.HAVE_COMPILED:
        raise SystemExit("compiled kernels are not built; run 'pip install -e .'")
    print(f"{'workload':34} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for name, fn in workloads():
        py = best_of(lambda: fn("python"), args.repeat)
        cy = best_of(lambda: fn("compiled"), args.repeat)
        print(f"{name:34} {py:9.4f}s {cy:9.4f}s {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
