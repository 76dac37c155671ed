"""Independent Set to Strong Stable Set: keep the vertices as a stable set,
add one vertex per edge, join it to both endpoints and make the edge
vertices a clique."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .builders import Exactly
from .model import Graph, IntSetSpec, serialize_graph
from .oracles import oracle_sigma_rho


@dataclass(frozen=True)
class ReducedInstance:
    g_prime: Graph
    k: int
    # origin[v] for v in 1..|V(g')|: ("vertex", u) or ("edge", (u, w))
    origin: tuple[tuple[str, object], ...]

    def comments(self) -> list[str]:
        out = []
        for v, (kind, what) in enumerate(self.origin[1:], start=1):
            label = f"{what[0]}-{what[1]}" if kind == "edge" else str(what)
            out.append(f"{v} <- {kind} {label}")
        return out

    def serialize(self) -> str:
        return serialize_graph(self.g_prime, self.comments())


def reduce_is_to_sss(g: Graph, k: int = 0) -> ReducedInstance:
    n = g.n
    edges = g.sorted_edges()
    origin: list[tuple[str, object]] = [("none", None)]
    origin += [("vertex", v) for v in g.vertices]
    origin += [("edge", e) for e in edges]
    new_edges = set()
    for idx, (u, w) in enumerate(edges):
        ev = n + 1 + idx
        new_edges.add((u, ev))
        new_edges.add((w, ev))
    for a, b in combinations(range(n + 1, n + len(edges) + 1), 2):
        new_edges.add((a, b))
    return ReducedInstance(Graph(n + len(edges), frozenset(new_edges)), k, tuple(origin))


def verify_reduction(g: Graph, k: int) -> bool:
    """Both sides decided by the brute-force oracle in their exact-size forms."""
    red = reduce_is_to_sss(g, k)
    zero = IntSetSpec.finite(0)
    left = oracle_sigma_rho(g, zero, IntSetSpec.all(), Exactly(k), cap=1).decision
    right = oracle_sigma_rho(red.g_prime, zero, IntSetSpec.finite(0, 1), Exactly(k),
                             cap=1).decision
    return left == right
