"""Seeded and exhaustive instance families for cross-validation."""

from __future__ import annotations

import random
from itertools import combinations, permutations, product
from typing import Iterator

from .model import STANDARD_SPECS, Digraph, FqMatrix, Graph


def random_graph(rng: random.Random, n: int, p: float | None = None) -> Graph:
    p = rng.random() if p is None else p
    edges = [e for e in combinations(range(1, n + 1), 2) if rng.random() < p]
    return Graph(n, frozenset(edges))


def random_digraph(rng: random.Random, n: int, p: float | None = None) -> Digraph:
    p = rng.random() if p is None else p
    arcs = [a for a in permutations(range(1, n + 1), 2) if rng.random() < p]
    return Digraph(n, frozenset(arcs))


def random_matrix(rng: random.Random, q: int, m: int, n: int) -> FqMatrix:
    return FqMatrix(q, tuple(tuple(rng.randrange(q) for _ in range(n)) for _ in range(m)))


def seeded_graphs(seed: int, count: int, max_n: int, min_n: int = 1) -> list[Graph]:
    rng = random.Random(seed)
    return [random_graph(rng, rng.randint(min_n, max_n)) for _ in range(count)]


def seeded_digraphs(seed: int, count: int, max_n: int, min_n: int = 1) -> list[Digraph]:
    rng = random.Random(seed)
    return [random_digraph(rng, rng.randint(min_n, max_n)) for _ in range(count)]


def seeded_matrices(seed: int, count: int, q: int, max_m: int, max_n: int) -> list[FqMatrix]:
    rng = random.Random(seed)
    return [random_matrix(rng, q, rng.randint(1, max_m), rng.randint(1, max_n))
            for _ in range(count)]


def all_graphs(n: int) -> Iterator[Graph]:
    """Every labelled graph on n vertices (2^(n choose 2) of them)."""
    pairs = list(combinations(range(1, n + 1), 2))
    for bits in product((0, 1), repeat=len(pairs)):
        yield Graph(n, frozenset(e for e, b in zip(pairs, bits) if b))


def all_digraphs(n: int) -> Iterator[Digraph]:
    arcs = list(permutations(range(1, n + 1), 2))
    for bits in product((0, 1), repeat=len(arcs)):
        yield Digraph(n, frozenset(a for a, b in zip(arcs, bits) if b))


def all_matrices(q: int, m: int, n: int) -> Iterator[FqMatrix]:
    for flat in product(range(q), repeat=m * n):
        yield FqMatrix(q, tuple(tuple(flat[r * n:(r + 1) * n]) for r in range(m)))


def spec_pairs():
    """All 64 named (sigma, rho) pairs over the standard specs."""
    for a, b in product(STANDARD_SPECS, repeat=2):
        yield (a, STANDARD_SPECS[a]), (b, STANDARD_SPECS[b])
