"""Shared instance families and independent reference checks for the tests."""

from __future__ import annotations

import itertools
from itertools import combinations, permutations

from blindtm.generators import all_digraphs, all_graphs
from blindtm.model import STANDARD_SPECS, Digraph, Graph

SPEC_NAMES = tuple(STANDARD_SPECS)


def _canon_graph(g: Graph) -> tuple:
    return min(tuple(sorted(tuple(sorted((p[u - 1], p[v - 1]))) for u, v in g.edges))
               for p in permutations(range(1, g.n + 1)))


def _canon_digraph(d: Digraph) -> tuple:
    return min(tuple(sorted((p[u - 1], p[v - 1]) for u, v in d.arcs))
               for p in permutations(range(1, d.n + 1)))


def graphs_up_to_iso(n: int) -> list[Graph]:
    seen, out = set(), []
    for g in all_graphs(n):
        key = _canon_graph(g)
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out


def digraphs_up_to_iso(n: int) -> list[Digraph]:
    seen, out = set(), []
    for d in all_digraphs(n):
        key = _canon_digraph(d)
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def cycle(n: int) -> Graph:
    return Graph(n, frozenset((i, i % n + 1) for i in range(1, n + 1)))


def path(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(1, n)))


def complete(n: int) -> Graph:
    return Graph(n, frozenset(combinations(range(1, n + 1), 2)))


def subsets(n: int):
    for r in range(n + 1):
        yield from (frozenset(c) for c in combinations(range(1, n + 1), r))


def accepts_exactly(m, length: int, word=()) -> bool:
    """Plain DFS over every run of exactly ``length`` steps, no dedup."""
    from blindtm.machine import applicable, initial_configuration, step

    def go(c, left):
        if left == 0:
            return c.state in m.accepting
        return any(go(step(m, c, j), left - 1) for j in applicable(m, c))
    return go(initial_configuration(m, word), length)


def accepts_within(m, k: int, word=()) -> bool:
    from blindtm.machine import applicable, initial_configuration, step

    def go(c, left):
        if c.state in m.accepting:
            return True
        return left > 0 and any(go(step(m, c, j), left - 1) for j in applicable(m, c))
    return go(initial_configuration(m, word), k)


flatten = itertools.chain.from_iterable


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
