"""Problem-specific blind machines and the decoding of their runs.

Every builder returns a :class:`BuiltInstance`: the machine, a step budget
within which it accepts whenever the instance is a YES instance, and the
hints needed to read the chosen set back off an accepting configuration.

Tape 0 always holds the guessed set, written left to right from cell 0 in
strictly increasing order. Pattern tapes are written right to left during
the guess so that no rewinding is needed afterwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .machine import BlindMachine, RunResult, Transition, iter_accepting, parse_machine, serialize_machine
from .model import Digraph, FqMatrix, Graph, GraphProperty, IntSetSpec, check_property, membership


# --------------------------------------------------------------------------
# parameters


_CARD_KINDS = ("at-most", "at-least-n-minus-k", "exactly", "exactly-n-minus-k")


@dataclass(frozen=True)
class CardinalityMode:
    """Size constraint on the chosen set D of an n-vertex graph."""

    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in _CARD_KINDS:
            raise ValueError(f"unknown cardinality mode {self.kind!r}")
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    @classmethod
    def at_most(cls, k: int) -> CardinalityMode:
        return cls("at-most", k)

    @classmethod
    def at_least_n_minus_k(cls, k: int) -> CardinalityMode:
        return cls("at-least-n-minus-k", k)

    @classmethod
    def exactly(cls, k: int) -> CardinalityMode:
        return cls("exactly", k)

    @classmethod
    def exactly_n_minus_k(cls, k: int) -> CardinalityMode:
        return cls("exactly-n-minus-k", k)

    @classmethod
    def parse(cls, text: str, k: int) -> CardinalityMode:
        return cls(text.strip().lower().replace("_", "-"), k)

    @property
    def dual(self) -> bool:
        """Parameter counts the vertices left out of D."""
        return self.kind.endswith("n-minus-k")

    @property
    def exact(self) -> bool:
        return self.kind.startswith("exactly")

    def admits(self, size: int, n: int) -> bool:
        target = n - self.k if self.dual else self.k
        if self.exact:
            return size == target
        return size >= target if self.dual else size <= target

    def __str__(self) -> str:
        return f"{self.kind}({self.k})"


AtMost = CardinalityMode.at_most
AtLeastNMinusK = CardinalityMode.at_least_n_minus_k
Exactly = CardinalityMode.exactly
ExactlyNMinusK = CardinalityMode.exactly_n_minus_k


class CodeMode(str, enum.Enum):
    MIN_DISTANCE = "min-distance"
    WEIGHT_DISTRIBUTION = "weight-distribution"

    @classmethod
    def parse(cls, text: str) -> CodeMode:
        return cls(text.strip().lower().replace("_", "-"))


MinDistance = CodeMode.MIN_DISTANCE
WeightDistribution = CodeMode.WEIGHT_DISTRIBUTION


@dataclass(frozen=True)
class BuiltInstance:
    """A generated machine with its acceptance budget and decoding hints.

    ``decode`` maps tape symbols of ``decode_tape`` to vertices or columns.
    When ``complement`` is set, the tape holds the items left out of the
    solution (dual parameterizations).
    """

    machine: BlindMachine
    step_bound: int
    problem: str
    decode_tape: int = 0
    decode: dict[int, int] = field(default_factory=dict, compare=False)
    universe: int = 0
    complement: bool = False


def decode_chosen_set(b: BuiltInstance, r: RunResult) -> frozenset[int]:
    """Items written on the decode tape from cell 0 up to the first blank."""
    if not r.accepted or r.final is None:
        raise ValueError("cannot decode a rejected run")
    return frozenset(b.decode[s] for s in r.final.tape_word(b.decode_tape))


def solution_set(b: BuiltInstance, r: RunResult) -> frozenset[int]:
    """The solution itself: the decoded set, or its complement for duals."""
    chosen = decode_chosen_set(b, r)
    if b.complement:
        return frozenset(range(1, b.universe + 1)) - chosen
    return chosen


# --------------------------------------------------------------------------
# table assembly


class _Table:
    """Transitions over interned integer states; names are derived from keys."""

    def __init__(self, tapes: int, alphabet: Sequence[str]):
        self.tapes = tapes
        self.alphabet = tuple(alphabet)
        self.N = len(self.alphabet)
        self._ids: dict[tuple, int] = {}
        self._names: list[str] = []
        self.trans: list[Transition] = []

    def q(self, *key) -> int:
        sid = self._ids.get(key)
        if sid is None:
            sid = self._ids[key] = len(self._names)
            self._names.append("_".join("x" if x is None else str(x) for x in key))
        return sid

    def add(self, reads, src, writes, dst, moves) -> None:
        self.trans.append(Transition(tuple(reads), src, tuple(writes), dst, tuple(moves)))

    def build(self, initial: int, accepting: Iterable[int]) -> BlindMachine:
        return BlindMachine(self.tapes, self.alphabet, tuple(self._names), initial,
                            frozenset(accepting), tuple(self.trans))


def _reject_machine(tapes: int, alphabet: Sequence[str]) -> BlindMachine:
    t = _Table(tapes, alphabet)
    t.q("start")
    return t.build(0, ())


# --------------------------------------------------------------------------
# (sigma, rho) domination and relatives


def _three_phase(n: int, k: int, exact: bool, first: list[list[int]],
                 second: list[list[int]], advance: list[Iterable[int]]) -> BlindMachine:
    """Guess D on tape 0, lay ``first[v]`` on every vertex tape, overwrite the
    tapes of chosen vertices with ``second[v]``, then for each chosen vertex
    step the heads of ``advance[v]`` once. Accept when every head reads 1.

    ``first[v][c]`` / ``second[v][c]`` is the bit that vertex v's head reads
    after it has been advanced c times, for c in [0, k].
    """
    alphabet = ("B", "0", "1") + tuple(f"v{j}" for j in range(1, n + 1))
    t = _Table(n + 1, alphabet)
    N = t.N
    blind = (N,) * n
    still = (0,) * n
    B, ONE = 0, 2

    def vsym(v):
        return 2 + v

    q_read = t.q("read")
    q_sig = t.q("sig") if k else None
    q_acc = t.q("accept")

    # phase 1: k+1 steps; step s writes pattern cell k-s and moves left
    for s in range(k + 1):
        writes = tuple(1 + first[v][k - s] for v in range(1, n + 1))
        if s < k:
            moves = (-1,) * n
            sources = [1] if s == 0 else range(s + 1, n + 2)
            for i in sources:
                src = t.q("pick", i, s)
                for v in range(i, n + 1):
                    t.add((B,) + blind, src, (vsym(v),) + writes, t.q("pick", v + 1, s + 1),
                          (1,) + moves)
                if not exact:
                    t.add((N,) + blind, src, (N,) + writes, t.q("pad", int(i > 1), s + 1),
                          (0,) + moves)
            if s >= 1 and not exact:
                for ne in (0, 1):
                    t.add((N,) + blind, t.q("pad", ne, s), (N,) + writes,
                          t.q("pad", ne, s + 1), (0,) + moves)
        else:
            empty = [t.q("pad", 0, k)] if k and not exact else []
            full = [t.q("pad", 1, k)] if k and not exact else []
            if k == 0:
                empty.append(t.q("pick", 1, 0))
            else:
                full += [t.q("pick", i, k) for i in range(k + 1, n + 2)]
            for src in empty:
                t.add((N,) + blind, src, (N,) + writes, q_read, (0,) + still)
            for src in full:
                t.add((N,) + blind, src, (N,) + writes, q_sig, (-1,) + still)

    # phase 2: right to left over tape 0, rewrite cells [-k, 0] of each chosen
    # vertex tape with its second pattern and return that head to cell -k
    if k:
        for v in range(1, n + 1):
            tape = v - 1

            def only(sym, base=blind, tape=tape):
                out = list(base)
                out[tape] = sym
                return tuple(out)

            t.add((vsym(v),) + blind, q_sig, (N,) + only(1 + second[v][0]),
                  t.q("w", v, 1), (0,) + only(1, still))
            for s in range(1, k + 1):
                src = t.q("w", v, s)
                w = only(1 + second[v][s])
                if s < k:
                    t.add((N,) + blind, src, (N,) + w, t.q("w", v, s + 1), (0,) + only(1, still))
                elif k == 1:
                    t.add((N,) + blind, src, (N,) + w, q_sig, (-1,) + only(-1, still))
                else:
                    t.add((N,) + blind, src, (N,) + w, t.q("ret", v, 1), (0,) + only(-1, still))
            for r in range(1, k):
                src = t.q("ret", v, r)
                if r < k - 1:
                    t.add((N,) + blind, src, (N,) + blind, t.q("ret", v, r + 1),
                          (0,) + only(-1, still))
                else:
                    t.add((N,) + blind, src, (N,) + blind, q_sig, (-1,) + only(-1, still))
        t.add((B,) + blind, q_sig, (N,) + blind, q_read, (1,) + still)

    # phase 3: one blind step per chosen vertex
    for v in range(1, n + 1):
        moves = [0] * n
        for u in advance[v]:
            moves[u - 1] = 1
        t.add((vsym(v),) + blind, q_read, (N,) + blind, q_read, (1,) + tuple(moves))
    t.add((B,) + (ONE,) * n, q_read, (N,) + blind, q_acc, (0,) + still)

    return t.build(t.q("pick", 1, 0), [q_acc])


def _three_phase_bound(k: int) -> int:
    # k+1 guess steps, 2k per chosen vertex plus one per chosen vertex in the
    # last phase, and two bookkeeping steps; at most k chosen
    return 2 if k == 0 else k + 3 + k * (2 * k + 1)


def _vertex_decode(n: int) -> dict[int, int]:
    return {2 + v: v for v in range(1, n + 1)}


def build_sigma_rho(g: Graph, sigma: IntSetSpec, rho: IntSetSpec,
                    mode: CardinalityMode) -> BuiltInstance:
    """Machine accepting iff ``g`` has a (sigma, rho)-dominating set of the given size."""
    n, k = g.n, mode.k
    need = g.max_degree() if mode.dual else k
    for name, spec in (("sigma", sigma), ("rho", rho)):
        if spec.bound < need:
            raise ValueError(f"{name} bound {spec.bound} is below the required {need}")
    first = [[]]
    second = [[]]
    if mode.dual:
        # tape 0 holds the excluded vertices S'; a vertex with c neighbours in
        # S' has deg - c neighbours in D
        for v in g.vertices:
            d = g.degree(v)
            first.append([int(d - c >= 0 and membership(sigma, d - c)) for c in range(k + 1)])
            second.append([int(d - c >= 0 and membership(rho, d - c)) for c in range(k + 1)])
    else:
        chi_rho = list(rho.characteristic(k))
        chi_sigma = list(sigma.characteristic(k))
        first += [chi_rho] * n
        second += [chi_sigma] * n
    adj = [()] + [sorted(g.adjacency[v]) for v in g.vertices]
    m = _three_phase(n, k, mode.exact, first, second, adj)
    return BuiltInstance(m, _three_phase_bound(k), "sigma-rho", 0, _vertex_decode(n), n,
                         mode.dual)


def build_digraph_kernel(d: Digraph, k: int) -> BuiltInstance:
    """Machine accepting iff ``d`` has a kernel of at most ``k`` vertices."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = d.n
    first = [[]] + [[int(c >= 1) for c in range(k + 1)] for _ in range(n)]
    second = [[]] + [[int(c == 0) for c in range(k + 1)] for _ in range(n)]
    # a chosen y moves the head of every x with an arc x -> y
    adv = [()] + [sorted(d.in_neighbors[v]) for v in d.vertices]
    m = _three_phase(n, k, False, first, second, adv)
    return BuiltInstance(m, _three_phase_bound(k), "kernel", 0, _vertex_decode(n), n)


@dataclass(frozen=True)
class PRhoDecision:
    decision: bool
    witness: frozenset[int] | None
    runs_examined: int


def decide_p_rho(g: Graph, p: GraphProperty | str, rho: IntSetSpec, k: int) -> PRhoDecision:
    """Is there D, |D| <= k, whose induced subgraph satisfies ``p`` and which
    rho-dominates the rest? Accepting runs of the (N, rho) machine are
    enumerated and each decoded set is handed to the property check."""
    if rho.bound < k:
        raise ValueError(f"rho bound {rho.bound} is below k={k}")
    b = build_sigma_rho(g, IntSetSpec.all(max(k, 1)), rho, AtMost(k))
    seen = 0
    for r in iter_accepting(b.machine, (), b.step_bound):
        seen += 1
        chosen = decode_chosen_set(b, r)
        if check_property(p, g.induced(sorted(chosen))):
            return PRhoDecision(True, chosen, seen)
    return PRhoDecision(False, None, seen)


# --------------------------------------------------------------------------
# induced r-regular subgraph, one tape


_PLAIN, _L, _R, _LR = range(4)


def build_induced_r_regular(g: Graph, r: int, k: int) -> BuiltInstance:
    """One-tape machine accepting iff some nonempty D, |D| <= k, induces an
    r-regular subgraph.

    The guess writes D in increasing order, marking the first cell L and the
    last R. Each member is then checked by one sweep over the d written cells,
    sweeps alternating direction and turning in place on a marked cell, so
    the run lasts d + d*d steps. Members are checked from the largest down;
    every sweep picks up the member checked next (the cell left of the
    current one).
    """
    if r < 0 or k < 0:
        raise ValueError("r and k must be nonnegative")
    n = g.n
    adj = g.adjacency
    alphabet = ["B"]
    for j in range(1, n + 1):
        alphabet += [f"v{j}", f"v{j}L", f"v{j}R", f"v{j}LR"]
    t = _Table(1, alphabet)

    def sym(v, mark):
        return 1 + 4 * (v - 1) + mark

    q_acc = t.q("accept")
    start = t.q("g", 1, 0)

    # guess
    for s in range(k):
        for i in range(1, n + 1) if s else (1,):
            if s and i < s + 1:
                continue
            src = t.q("g", i, s)
            for v in range(i, n + 1):
                lead = _L if s == 0 else _PLAIN
                if s + 1 < k and v < n:
                    t.add((0,), src, (sym(v, lead),), t.q("g", v + 1, s + 1), (1,))
                last = _LR if s == 0 else _R
                t.add((0,), src, (sym(v, last),), t.q("L", v, 0, "b"), (0,))

    def count(c, u, l):
        return l + (u in adj[c])

    # leftward sweeps: phase "b" before c, "j" just past c, ("p", p) once the
    # next member p is known
    for c in range(1, n + 1):
        for l in range(r + 1):
            for ph in ["b", "j"] + [("p", p) for p in range(1, c)]:
                src = t.q("L", c, l, *(ph if isinstance(ph, tuple) else (ph,)))
                for u in range(1, n + 1):
                    if ph == "b":
                        if u < c:
                            continue
                        nl, nph = (l, "j") if u == c else (count(c, u, l), "b")
                        marks = (_PLAIN, _L, _R, _LR)
                    elif ph == "j":
                        if u >= c:
                            continue
                        nl, nph = count(c, u, l), ("p", u)
                        marks = (_PLAIN, _L)
                    else:
                        if u >= ph[1]:
                            continue
                        nl, nph = count(c, u, l), ph
                        marks = (_PLAIN, _L)
                    if nl > r:
                        continue
                    for mark in marks:
                        read = (sym(u, mark),)
                        if mark in (_L, _LR):
                            if nl != r or nph == "b":
                                continue
                            if nph == "j":
                                t.add(read, src, read, q_acc, (0,))
                            else:
                                t.add(read, src, read, t.q("R", nph[1], 0, "s", None), (0,))
                        else:
                            dst = t.q("L", c, nl, *(nph if isinstance(nph, tuple) else (nph,)))
                            t.add(read, src, read, dst, (-1,))

    # rightward sweeps: ("s", last) while looking for c, ("f", p) after it
    for c in range(1, n + 1):
        for l in range(r + 1):
            for st in [("s", None)] + [("s", u) for u in range(1, c)] + \
                      [("f", None)] + [("f", p) for p in range(1, c)]:
                src = t.q("R", c, l, *st)
                for u in range(1, n + 1):
                    if st[0] == "s":
                        if u > c or (st[1] is not None and u <= st[1]):
                            continue
                        nl, nst = (l, ("f", st[1])) if u == c else (count(c, u, l), ("s", u))
                        marks = (_L, _LR) if st[1] is None else (_PLAIN, _R)
                    else:
                        if u <= c:
                            continue
                        nl, nst = count(c, u, l), st
                        marks = (_PLAIN, _R)
                    if nl > r:
                        continue
                    for mark in marks:
                        read = (sym(u, mark),)
                        if mark in (_R, _LR):
                            if nl != r or nst[0] != "f":
                                continue
                            if nst[1] is None:
                                t.add(read, src, read, q_acc, (0,))
                            else:
                                t.add(read, src, read, t.q("L", nst[1], 0, "b"), (0,))
                        else:
                            t.add(read, src, read, t.q("R", c, nl, *nst), (1,))

    m = t.build(start, [q_acc])
    decode = {sym(v, mark): v for v in range(1, n + 1) for mark in range(4)}
    return BuiltInstance(m, k * k + k, "r-regular", 0, decode, n)


# --------------------------------------------------------------------------
# codes over F_q


def build_code_machine(h: FqMatrix, k: int, mode: CodeMode | str,
                       dual: bool = False) -> BuiltInstance:
    """Machine accepting iff some admissible set of columns of ``h`` sums to 0.

    Non-dual: a nonempty set of at most k columns (min-distance) or exactly
    k columns (weight-distribution). Dual: the complement of the guessed set
    S' is the column set, with |S'| <= k and a nonempty complement, or
    |S'| = k.

    Row tape l carries a 0/1 pattern whose cell c tells whether c (non-dual)
    or rowsum_l - c (dual) vanishes mod q; each guessed column i then pushes
    head l forward H[l, i] cells, spread over q-1 blind steps.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    mode = CodeMode(mode)
    q, m, n = h.q, h.m, h.n
    alphabet = ("B", "0", "1") + tuple(f"h{j}" for j in range(1, n + 1))
    decode = {2 + j: j for j in range(1, n + 1)}
    exact = mode is WeightDistribution
    if dual:
        cap = k if exact else min(k, n - 1)
        least = cap if exact else 0
    else:
        cap, least = (k, k) if exact else (min(k, n), 1)

    def done(machine, bound):
        return BuiltInstance(machine, bound, "code", 0, decode, n, dual)

    if not dual and exact and k == 0:
        # the empty column set always sums to zero
        t = _Table(m + 1, alphabet)
        acc = t.q("accept")
        return done(t.build(acc, [acc]), 0)
    if cap < 0 or least > cap or cap > n:
        return done(_reject_machine(m + 1, alphabet), 0)

    t = _Table(m + 1, alphabet)
    N = t.N
    blind = (N,) * m
    still = (0,) * m
    # sized by k, not by the pick cap, so the budget never depends on n
    W = (q - 1) * k + 1
    if dual:
        pattern = [[int((h.row_sum(l) - c) % q == 0) for c in range(W)] for l in range(1, m + 1)]
    else:
        pattern = [[int(c % q == 0) for c in range(W)] for _ in range(m)]
    q_col = t.q("col")
    q_acc = t.q("accept")

    def after_pick(v, s):
        return t.q("pick", v + 1, s + 1) if s + 1 < cap else t.q("pad", s + 1)

    # phase 1: W steps writing the patterns right to left, picks first
    for s in range(W):
        writes = tuple(1 + pattern[l][W - 1 - s] for l in range(m))
        if s == W - 1:
            src = t.q("pad", s)
            t.add((N,) + blind, src, (N,) + writes, q_col, (-1,) + still)
            continue
        if s < cap:
            for i in ([1] if s == 0 else range(s + 1, n + 2)):
                src = t.q("pick", i, s)
                for v in range(i, n + 1):
                    t.add((0,) + blind, src, (2 + v,) + writes, after_pick(v, s),
                          (1,) + (-1,) * m)
                if s >= least:
                    t.add((N,) + blind, src, (N,) + writes, t.q("pad", s + 1),
                          (0,) + (-1,) * m)
        if s >= 1 or cap == 0:
            t.add((N,) + blind, t.q("pad", s), (N,) + writes, t.q("pad", s + 1),
                  (0,) + (-1,) * m)

    # phase 2: q-1 steps per guessed column, right to left
    for i in range(1, n + 1):
        col = h.column(i)
        moves = tuple(int(col[l] > 0) for l in range(m))
        nxt = t.q("sub", i, 1) if q > 2 else q_col
        t.add((2 + i,) + blind, q_col, (N,) + blind, nxt, (-1,) + moves)
        for step in range(1, q - 1):
            moves = tuple(int(col[l] > step) for l in range(m))
            nxt = t.q("sub", i, step + 1) if step < q - 2 else q_col
            t.add((N,) + blind, t.q("sub", i, step), (N,) + blind, nxt, (0,) + moves)
    t.add((0,) + (2,) * m, q_col, (N,) + blind, q_acc, (0,) + still)

    initial = t.q("pick", 1, 0) if cap else t.q("pad", 0)
    machine = t.build(initial, [q_acc])
    return done(machine, W + k * (q - 1) + 1)


# --------------------------------------------------------------------------
# machine files with decoding hints


def emit_instance(b: BuiltInstance) -> str:
    hints = [
        f"problem {b.problem}",
        f"step-bound {b.step_bound}",
        f"decode-tape {b.decode_tape}",
        f"universe {b.universe}",
        f"complement {int(b.complement)}",
        "decode " + " ".join(f"{b.machine.alphabet[s]}={v}" for s, v in sorted(b.decode.items())),
    ]
    return serialize_machine(b.machine, hints)


def load_instance(text: str) -> BuiltInstance:
    """Inverse of :func:`emit_instance`; missing hints fall back to defaults."""
    m = parse_machine(text)
    hints: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, rest = body.partition(" ")
            hints.setdefault(key, rest)
    decode = {}
    for pair in hints.get("decode", "").split():
        name, _, val = pair.partition("=")
        decode[m.symbol(name)] = int(val)
    step_bound = int(hints.get("step-bound", 0))
    return BuiltInstance(m, step_bound, hints.get("problem", "machine"),
                         int(hints.get("decode-tape", 0)), decode,
                         int(hints.get("universe", 0)), hints.get("complement", "0") == "1")
