"""Brute-force deciders: plain enumeration of subsets, definitions checked
verbatim. Deliberately naive so they can be audited at a glance."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Iterable, Iterator

from .builders import CardinalityMode, CodeMode, WeightDistribution
from .model import Digraph, FqMatrix, Graph, GraphProperty, IntSetSpec, check_property, membership

MAX_N = 25
MAX_SUBSETS = 10**7


class OracleGuardError(RuntimeError):
    """Instance too large for exhaustive enumeration."""


@dataclass(frozen=True)
class OracleVerdict:
    decision: bool
    witnesses: tuple[frozenset[int], ...]
    capped: bool = False

    def __bool__(self) -> bool:
        return self.decision


def _subsets(n: int, sizes: Iterable[int]) -> Iterator[frozenset[int]]:
    """Subsets of {1..n} grouped by size, lexicographic within each size."""
    if n > MAX_N:
        raise OracleGuardError(f"n={n} exceeds the enumeration guard {MAX_N}")
    sizes = [s for s in sizes if 0 <= s <= n]
    total = sum(comb(n, s) for s in sizes)
    if total > MAX_SUBSETS:
        raise OracleGuardError(f"{total} subsets exceed the cap {MAX_SUBSETS}")
    for s in sizes:
        for c in combinations(range(1, n + 1), s):
            yield frozenset(c)


def lex_key(s: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(s))


def _collect(cands: Iterable[frozenset[int]], ok: Callable[[frozenset[int]], bool],
             cap: int | None) -> OracleVerdict:
    found = sorted((d for d in cands if ok(d)), key=lex_key)
    if cap is not None and len(found) > cap:
        return OracleVerdict(True, tuple(found[:cap]), True)
    return OracleVerdict(bool(found), tuple(found))


def is_sigma_rho_set(g: Graph, d: frozenset[int], sigma: IntSetSpec, rho: IntSetSpec) -> bool:
    for v in g.vertices:
        inside = len(g.adjacency[v] & d)
        if not membership(sigma if v in d else rho, inside):
            return False
    return True


def oracle_sigma_rho(g: Graph, sigma: IntSetSpec, rho: IntSetSpec, mode: CardinalityMode,
                     cap: int | None = None) -> OracleVerdict:
    """All (sigma, rho)-dominating sets whose size ``mode`` admits."""
    need = g.max_degree()
    for name, spec in (("sigma", sigma), ("rho", rho)):
        if spec.bound < need:
            raise ValueError(f"{name} bound {spec.bound} is below the max degree {need}")
    sizes = [s for s in range(g.n + 1) if mode.admits(s, g.n)]
    return _collect(_subsets(g.n, sizes),
                    lambda d: is_sigma_rho_set(g, d, sigma, rho), cap)


def oracle_p_rho(g: Graph, p: GraphProperty | str, rho: IntSetSpec, k: int,
                 cap: int | None = None) -> OracleVerdict:
    """D with |D| <= k, G[D] satisfying ``p``, every outsider's count in rho."""
    def ok(d):
        if any(not membership(rho, len(g.adjacency[v] & d)) for v in g.vertices if v not in d):
            return False
        return check_property(p, g.induced(sorted(d)))
    return _collect(_subsets(g.n, range(k + 1)), ok, cap)


def is_kernel(d: Digraph, s: frozenset[int]) -> bool:
    for x, y in d.arcs:
        if x in s and y in s:
            return False
    for x in d.vertices:
        if x not in s and not any((x, y) in d.arcs for y in s):
            return False
    return True


def oracle_kernel(d: Digraph, k: int, cap: int | None = None) -> OracleVerdict:
    return _collect(_subsets(d.n, range(k + 1)), lambda s: is_kernel(d, s), cap)


def column_sum_zero(h: FqMatrix, cols: frozenset[int]) -> bool:
    return all(sum(h.entry(l, i) for i in cols) % h.q == 0 for l in range(1, h.m + 1))


def oracle_code_sum(h: FqMatrix, k: int, mode: CodeMode | str, dual: bool = False,
                    cap: int | None = None) -> OracleVerdict:
    """Column sets summing to zero: nonempty of size <= k or exactly k; the
    dual asks for >= n-k (nonempty) or exactly n-k columns."""
    mode = CodeMode(mode)
    n = h.n
    if dual:
        sizes = [n - k] if mode is WeightDistribution else range(max(n - k, 1), n + 1)
    else:
        sizes = [k] if mode is WeightDistribution else range(1, k + 1)
    return _collect(_subsets(n, sizes), lambda c: column_sum_zero(h, c), cap)


def oracle_r_regular(g: Graph, r: int, k: int, cap: int | None = None) -> OracleVerdict:
    """Nonempty D with |D| <= k inducing an r-regular subgraph."""
    def ok(d):
        return all(len(g.adjacency[v] & d) == r for v in d)
    return _collect(_subsets(g.n, range(1, k + 1)), ok, cap)


def oracle_dual_complement(g: Graph, sigma: IntSetSpec, rho: IntSetSpec,
                           mode: CardinalityMode) -> OracleVerdict:
    """Dual modes decided through the complement S' = V \\ D, |S'| <= k (or
    = k): members of D need deg - |N(v) & S'| in sigma, members of S' need
    it in rho. Witnesses are reported as D."""
    if not mode.dual:
        raise ValueError("complement enumeration applies to the dual modes")
    sizes = [mode.k] if mode.exact else range(mode.k + 1)
    vertices = frozenset(g.vertices)

    def ok(s):
        for v in g.vertices:
            rest = g.degree(v) - len(g.adjacency[v] & s)
            if not membership(rho if v in s else sigma, rest):
                return False
        return True

    found = sorted((vertices - s for s in _subsets(g.n, sizes) if ok(s)), key=lex_key)
    return OracleVerdict(bool(found), tuple(found))
