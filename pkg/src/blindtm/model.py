"""Problem instances: graphs, digraphs, integer-set specs, F_q matrices and
induced-subgraph properties, together with their line-oriented text formats.

Vertices are 1-indexed throughout.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable


class ParseError(ValueError):
    """Malformed instance text. ``lineno`` is 1-based, 0 when not line-bound."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


# --------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [1, {self.n}]")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        return cls(n, frozenset(edges))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        """``adjacency[v]`` is N(v); index 0 is unused."""
        adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def max_degree(self) -> int:
        return max((len(self.adjacency[v]) for v in self.vertices), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def induced(self, vertices: Iterable[int]) -> Graph:
        """Induced subgraph, relabelled 1..|D| in increasing vertex order."""
        chosen = sorted(set(vertices))
        index = {v: i + 1 for i, v in enumerate(chosen)}
        return Graph(
            len(chosen),
            frozenset((index[u], index[v]) for u, v in self.edges if u in index and v in index),
        )

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise ValueError(f"vertex {v} outside [1, {self.n}]")


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        for u, v in self.arcs:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"arc ({u}, {v}) has an endpoint outside [1, {self.n}]")
        object.__setattr__(self, "arcs", frozenset(self.arcs))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def in_neighbors(self) -> tuple[frozenset[int], ...]:
        """``in_neighbors[v]`` = {u : (u, v) is an arc}."""
        inn: list[set[int]] = [set() for _ in range(self.n + 1)]
        for u, v in self.arcs:
            inn[v].add(u)
        return tuple(frozenset(a) for a in inn)

    @cached_property
    def out_neighbors(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.n + 1)]
        for u, v in self.arcs:
            out[u].add(v)
        return tuple(frozenset(a) for a in out)

    def sorted_arcs(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)


def parse_graph(text: str) -> Graph | Digraph:
    """Parse a ``graph <n>`` / ``digraph <n>`` file.

    Every error carries the offending line number.
    """
    header = None
    n = 0
    pairs: set[tuple[int, int]] = set()
    for lineno, toks in _content_lines(text):
        if header is None:
            if toks[0] not in ("graph", "digraph") or len(toks) != 2:
                raise ParseError("expected header 'graph <n>' or 'digraph <n>'", lineno)
            header = toks[0]
            n = _int(toks[1], lineno)
            if n < 0:
                raise ParseError("vertex count must be nonnegative", lineno)
            continue
        want = "edge" if header == "graph" else "arc"
        if toks[0] != want or len(toks) != 3:
            raise ParseError(f"expected '{want} <u> <v>'", lineno)
        u, v = _int(toks[1], lineno), _int(toks[2], lineno)
        for x in (u, v):
            if not 1 <= x <= n:
                raise ParseError(f"index {x} out of range [1, {n}]", lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno)
        key = (min(u, v), max(u, v)) if header == "graph" else (u, v)
        if key in pairs:
            raise ParseError(f"duplicate {want} {u} {v}", lineno)
        pairs.add(key)
    if header is None:
        raise ParseError("empty input: missing header")
    if header == "graph":
        return Graph(n, frozenset(pairs))
    return Digraph(n, frozenset(pairs))


def serialize_graph(g: Graph | Digraph, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    if isinstance(g, Digraph):
        lines.append(f"digraph {g.n}")
        lines += [f"arc {u} {v}" for u, v in g.sorted_arcs()]
    else:
        lines.append(f"graph {g.n}")
        lines += [f"edge {u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


# --------------------------------------------------------------------------
# integer sets

DEFAULT_BOUND = 1024

_NAMED = ("all", "positive", "even", "odd")


@dataclass(frozen=True)
class IntSetSpec:
    """A set of nonnegative integers whose membership is decidable on [0, bound].

    ``kind`` is one of all, positive, even, odd, finite, cofinite, geq, vector.
    ``values`` holds the listed members (finite), the excluded values
    (cofinite), the threshold (geq) or the 0/1 characteristic bits (vector).
    """

    kind: str
    values: tuple[int, ...] = ()
    bound: int = DEFAULT_BOUND

    def __post_init__(self):
        if self.kind not in (*_NAMED, "finite", "cofinite", "geq", "vector"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.kind == "vector":
            if any(b not in (0, 1) for b in self.values) or not self.values:
                raise ValueError("vector spec needs a nonempty bit list")
            object.__setattr__(self, "bound", len(self.values) - 1)
        if self.kind == "geq" and len(self.values) != 1:
            raise ValueError("geq spec needs exactly one threshold")
        if any(v < 0 for v in self.values):
            raise ValueError("set elements must be nonnegative")
        object.__setattr__(self, "values", tuple(self.values))

    # constructors for the usual suspects
    @classmethod
    def all(cls, bound: int = DEFAULT_BOUND) -> IntSetSpec:
        return cls("all", (), bound)

    @classmethod
    def positive(cls, bound: int = DEFAULT_BOUND) -> IntSetSpec:
        return cls("positive", (), bound)

    @classmethod
    def even(cls, bound: int = DEFAULT_BOUND) -> IntSetSpec:
        return cls("even", (), bound)

    @classmethod
    def odd(cls, bound: int = DEFAULT_BOUND) -> IntSetSpec:
        return cls("odd", (), bound)

    @classmethod
    def finite(cls, *members: int, bound: int = DEFAULT_BOUND) -> IntSetSpec:
        return cls("finite", tuple(sorted(set(members))), bound)

    @classmethod
    def cofinite(cls, *excluded: int, bound: int = DEFAULT_BOUND) -> IntSetSpec:
        return cls("cofinite", tuple(sorted(set(excluded))), bound)

    @classmethod
    def geq(cls, threshold: int, bound: int = DEFAULT_BOUND) -> IntSetSpec:
        return cls("geq", (threshold,), bound)

    @classmethod
    def vector(cls, bits: Iterable[int]) -> IntSetSpec:
        return cls("vector", tuple(bits))

    def __contains__(self, x: int) -> bool:
        return membership(self, x)

    def characteristic(self, upto: int) -> tuple[int, ...]:
        """Bits of the set on [0, upto]."""
        return tuple(int(membership(self, i)) for i in range(upto + 1))

    def with_bound(self, bound: int) -> IntSetSpec:
        if self.kind == "vector":
            raise ValueError("vector specs carry their own bound")
        return IntSetSpec(self.kind, self.values, bound)

    def __str__(self) -> str:
        if self.kind in _NAMED:
            return self.kind
        if self.kind == "vector":
            return "vector:" + "".join(map(str, self.values))
        return f"{self.kind}:" + ",".join(map(str, self.values))


def membership(s: IntSetSpec, x: int) -> bool:
    if x < 0:
        raise ValueError(f"membership queried for negative value {x}")
    if x > s.bound:
        raise ValueError(f"membership of {x} queried beyond the spec bound {s.bound}")
    kind = s.kind
    if kind == "all":
        return True
    if kind == "positive":
        return x > 0
    if kind == "even":
        return x % 2 == 0
    if kind == "odd":
        return x % 2 == 1
    if kind == "finite":
        return x in s.values
    if kind == "cofinite":
        return x not in s.values
    if kind == "geq":
        return x >= s.values[0]
    return s.values[x] == 1


def parse_set_spec(text: str, bound: int = DEFAULT_BOUND) -> IntSetSpec:
    """Parse ``all | positive | even | odd | finite:.. | cofinite:.. | geq:t | vector:bits``."""
    text = text.strip()
    head, _, tail = text.partition(":")
    head = head.lower()
    try:
        if head in _NAMED and not tail:
            return IntSetSpec(head, (), bound)
        if head in ("finite", "cofinite"):
            items = [int(t) for t in tail.split(",") if t.strip()]
            return IntSetSpec(head, tuple(sorted(set(items))), bound)
        if head == "geq":
            return IntSetSpec("geq", (int(tail),), bound)
        if head == "vector":
            if not tail or set(tail) - {"0", "1"}:
                raise ValueError("vector needs a bitstring")
            return IntSetSpec.vector(int(c) for c in tail)
    except ValueError as exc:
        raise ParseError(f"bad set spec {text!r}: {exc}") from None
    raise ParseError(f"bad set spec {text!r}")


# The eight specs the verification campaigns sweep over.
STANDARD_SPECS: dict[str, IntSetSpec] = {
    "N": IntSetSpec.all(),
    "N+": IntSetSpec.positive(),
    "{0}": IntSetSpec.finite(0),
    "{1}": IntSetSpec.finite(1),
    "{0,1}": IntSetSpec.finite(0, 1),
    "{2}": IntSetSpec.finite(2),
    "EVEN": IntSetSpec.even(),
    "ODD": IntSetSpec.odd(),
}


# --------------------------------------------------------------------------
# matrices over F_q


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q**0.5) + 1))


@dataclass(frozen=True)
class FqMatrix:
    q: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"field order {self.q} is not a prime")
        rows = tuple(tuple(r) for r in self.rows)
        if len({len(r) for r in rows}) > 1:
            raise ValueError("ragged matrix")
        for r in rows:
            for e in r:
                if not 0 <= e < self.q:
                    raise ValueError(f"entry {e} outside [0, {self.q})")
        object.__setattr__(self, "rows", rows)

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def entry(self, row: int, col: int) -> int:
        """1-indexed access H[row, col]."""
        return self.rows[row - 1][col - 1]

    def column(self, col: int) -> tuple[int, ...]:
        return tuple(r[col - 1] for r in self.rows)

    def row_sum(self, row: int) -> int:
        return sum(self.rows[row - 1])


def parse_matrix(text: str) -> FqMatrix:
    header = None
    rows: list[tuple[int, ...]] = []
    for lineno, toks in _content_lines(text):
        if header is None:
            if toks[0] != "matrix" or len(toks) != 4:
                raise ParseError("expected header 'matrix <q> <m> <n>'", lineno)
            header = tuple(_int(t, lineno) for t in toks[1:])
            q, _, _ = header
            if not is_prime(q):
                raise ParseError(f"field order {q} is not a prime", lineno)
            continue
        q, m, n = header
        if len(toks) != n:
            raise ParseError(f"expected {n} entries, got {len(toks)}", lineno)
        row = tuple(_int(t, lineno) for t in toks)
        for e in row:
            if not 0 <= e < q:
                raise ParseError(f"entry {e} outside [0, {q})", lineno)
        rows.append(row)
        if len(rows) > m:
            raise ParseError(f"more than {m} rows", lineno)
    if header is None:
        raise ParseError("empty input: missing header")
    q, m, n = header
    if len(rows) != m:
        raise ParseError(f"expected {m} rows, got {len(rows)}")
    if m == 0:
        raise ParseError("matrix must have at least one row")
    return FqMatrix(q, tuple(rows))


def serialize_matrix(h: FqMatrix) -> str:
    lines = [f"matrix {h.q} {h.m} {h.n}"]
    lines += [" ".join(map(str, r)) for r in h.rows]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# graph properties


def _connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = {1}
    todo = deque([1])
    while todo:
        u = todo.popleft()
        for w in g.adjacency[u]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == g.n


def _clique(g: Graph) -> bool:
    return len(g.edges) == g.n * (g.n - 1) // 2


def _independent(g: Graph) -> bool:
    return not g.edges


def _regular(r: int) -> Callable[[Graph], bool]:
    return lambda g: all(len(g.adjacency[v]) == r for v in g.vertices)


@dataclass(frozen=True)
class GraphProperty:
    name: str
    predicate: Callable[[Graph], bool] = field(compare=False, repr=False)

    def __call__(self, g: Graph) -> bool:
        return self.predicate(g)


PROPERTY_REGISTRY: dict[str, Callable[..., GraphProperty]] = {
    "always-true": lambda: GraphProperty("always-true", lambda g: True),
    "connected": lambda: GraphProperty("connected", _connected),
    "clique": lambda: GraphProperty("clique", _clique),
    "independent": lambda: GraphProperty("independent", _independent),
    "r-regular": lambda r: GraphProperty(f"r-regular({r})", _regular(int(r))),
}


def register_property(name: str, predicate: Callable[[Graph], bool]) -> None:
    PROPERTY_REGISTRY[name] = lambda: GraphProperty(name, predicate)


def get_property(spec: str) -> GraphProperty:
    """Look up ``connected``, ``r-regular(2)``, ``r-regular:2`` and friends."""
    spec = spec.strip()
    name, arg = spec, None
    if "(" in spec and spec.endswith(")"):
        name, arg = spec[:-1].split("(", 1)
    elif ":" in spec:
        name, arg = spec.split(":", 1)
    if name not in PROPERTY_REGISTRY:
        raise KeyError(f"unknown graph property {name!r}")
    factory = PROPERTY_REGISTRY[name]
    if name == "r-regular":
        if arg is None:
            raise KeyError("r-regular needs a degree, e.g. r-regular(2)")
        return factory(int(arg))
    if arg is not None:
        raise KeyError(f"property {name!r} takes no argument")
    return factory()


def check_property(p: GraphProperty | str, g: Graph) -> bool:
    if isinstance(p, str):
        p = get_property(p)
    return bool(p(g))
