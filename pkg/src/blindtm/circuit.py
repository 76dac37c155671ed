"""Compilation of a normalized blind machine into a weft-2 boolean circuit.

The circuit has one input x[i, j] per step i in [1, k] and transition j in
[1, |Delta|]. Its weight-k satisfying assignments are exactly the
encodings of accepting k-step runs (step i performs transition j).

Gates are stored as flat arrays: ``kinds`` (one code per gate), and the
fan-in lists in CSR form (``ptr``/``fanin``). Ids are topologically sorted
and inputs come first, ordered by (step, transition).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _backend
from ._fallback import AND, CONST0, CONST1, INPUT, NOT, OR, SearchLimitExceeded
from .machine import BlindMachine, _word_ids
from .model import ParseError

log = logging.getLogger(__name__)

KIND_NAMES = {INPUT: "input", CONST0: "const0", CONST1: "const1", NOT: "not", AND: "and", OR: "or"}
BRUTE_GUARD = 10**7
DEFAULT_NODE_LIMIT = 5_000_000


class NotNormalizedError(ValueError):
    pass


class ResourceGuardError(RuntimeError):
    pass


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str
    inputs: tuple[int, ...]
    step: int = 0
    trans: int = 0


@dataclass(frozen=True)
class CircuitStats:
    weft: int
    depth: int
    gate_count: int
    large_gate_count: int

    def __str__(self) -> str:
        return f"weft={self.weft} depth={self.depth} gates={self.gate_count}"


@dataclass(frozen=True, eq=False)
class Circuit:
    kinds: np.ndarray      # int8 gate codes
    ptr: np.ndarray        # int64, fan-in of gate g is fanin[ptr[g]:ptr[g+1]]
    fanin: np.ndarray      # int32
    output: int
    steps: int
    n_trans: int
    input_keys: tuple[tuple[int, int], ...]  # (step, trans) of input position p

    @cached_property
    def input_ids(self) -> np.ndarray:
        return np.flatnonzero(self.kinds == INPUT).astype(np.int32)

    @cached_property
    def input_map(self) -> dict[tuple[int, int], int]:
        return {key: int(g) for key, g in zip(self.input_keys, self.input_ids)}

    @cached_property
    def fanout(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of gate successors: (fo_ptr int64, fanout int32)."""
        G = len(self.kinds)
        counts = np.diff(self.ptr)
        owners = np.repeat(np.arange(G, dtype=np.int32), counts)
        order = np.argsort(self.fanin, kind="stable")
        fo = owners[order].astype(np.int32)
        fo_ptr = np.zeros(G + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.fanin, minlength=G), out=fo_ptr[1:])
        return fo_ptr, fo

    def __len__(self) -> int:
        return len(self.kinds)

    def gate(self, g: int) -> Gate:
        kind = int(self.kinds[g])
        ins = tuple(int(a) for a in self.fanin[self.ptr[g]:self.ptr[g + 1]])
        if kind == INPUT:
            step, trans = self.input_keys[int(np.searchsorted(self.input_ids, g))]
            return Gate(g, "input", ins, step, trans)
        return Gate(g, KIND_NAMES[kind], ins)

    @property
    def gates(self) -> list[Gate]:
        return [self.gate(g) for g in range(len(self))]


class CircuitBuilder:
    """Append-only gate list; no folding or sharing beyond what callers do."""

    def __init__(self):
        self.kinds: list[int] = []
        self.ptr: list[int] = [0]
        self.fanin: list[int] = []
        self.keys: list[tuple[int, int]] = []

    def _add(self, kind: int, ins: Iterable[int] = ()) -> int:
        self.kinds.append(kind)
        self.fanin.extend(ins)
        self.ptr.append(len(self.fanin))
        return len(self.kinds) - 1

    def input(self, step: int, trans: int) -> int:
        self.keys.append((step, trans))
        return self._add(INPUT)

    def const(self, value: bool) -> int:
        return self._add(CONST1 if value else CONST0)

    def not_(self, a: int) -> int:
        return self._add(NOT, (a,))

    def and_(self, *ins: int) -> int:
        return self._add(AND, ins)

    def or_(self, *ins: int) -> int:
        return self._add(OR, ins)

    def build(self, output: int, steps: int = 0, n_trans: int = 0) -> Circuit:
        kinds = np.asarray(self.kinds, dtype=np.int8)
        ptr = np.asarray(self.ptr, dtype=np.int64)
        fanin = np.asarray(self.fanin, dtype=np.int32)
        counts = np.diff(ptr)
        owners = np.repeat(np.arange(len(kinds)), counts)
        bad = np.flatnonzero(fanin >= owners)
        if len(bad):
            raise ValueError(f"gate {owners[bad[0]]} reads a later gate")
        bad = np.flatnonzero((kinds == NOT) & (counts != 1))
        if len(bad):
            raise ValueError(f"NOT gate {bad[0]} needs exactly one input")
        if not 0 <= output < len(kinds):
            raise ValueError("output gate out of range")
        return Circuit(kinds, ptr, fanin, output, steps, n_trans, tuple(self.keys))


# --------------------------------------------------------------------------
# the construction


def compile_machine(m: BlindMachine, word=(), k: int = 1) -> Circuit:
    """Circuit accepting weight-k inputs exactly for accepting k-step runs.

    ``m`` must have a single accepting state, as produced by
    :func:`blindtm.machine.normalize_for_exact`.
    """
    if len(m.accepting) != 1:
        raise NotNormalizedError(
            f"machine has {len(m.accepting)} accepting states; normalize it first")
    if k < 1:
        raise ValueError("k must be at least 1")
    word = _word_ids(m, word)
    (q_acc,) = m.accepting
    trans = m.transitions
    D, S, T, Q = len(trans), len(m.alphabet), m.tapes, len(m.states)
    NEU = S
    L = 2 * k + 1  # positions -k..k, index l + k
    cb = CircuitBuilder()

    x = [[cb.input(i + 1, j + 1) for j in range(D)] for i in range(k)]
    zero, one = cb.const(False), cb.const(True)

    def family(i, key, size):
        groups = [[] for _ in range(size)]
        for j, t in enumerate(trans):
            groups[key(t)].append(x[i][j])
        return [cb.or_(*g) for g in groups]

    tau_o, tau_n, sig_o, sig_n, mu = [], [], [], [], []
    for i in range(k):
        tau_o.append(family(i, lambda t: t.src, Q))
        tau_n.append(family(i, lambda t: t.dst, Q))
        sig_o.append([family(i, lambda t, a=a: t.reads[a], S + 1) for a in range(T)])
        sig_n.append([family(i, lambda t, a=a: t.writes[a], S + 1) for a in range(T)])
        mu.append([family(i, lambda t, a=a: t.moves[a] + 1, 3) for a in range(T)])

    # beta[i][t][l]: head t at position l before step i+1
    beta = [[[one if l == k else zero for l in range(L)] for _ in range(T)]]
    # sigma[i][t][l][s]: cell l of tape t holds s before step i+1
    first = []
    for t in range(T):
        rows = []
        for l in range(L):
            pos = l - k
            held = word[pos] if t == 0 and 0 <= pos < len(word) else 0
            rows.append([one if s == held else zero for s in range(S)])
        first.append(rows)
    sigma = [first]
    not_beta = []
    for i in range(1, k):
        prev_b, prev_s = beta[-1], sigma[-1]
        nb_row, b_row, s_row = [], [], []
        for t in range(T):
            mv = mu[i - 1][t]
            nbs, bs, ss = [], [], []
            for l in range(L):
                terms = [cb.and_(prev_b[t][l - d], mv[d + 1])
                         for d in (-1, 0, 1) if 0 <= l - d < L]
                acc = terms[0]
                for term in terms[1:]:
                    acc = cb.or_(acc, term)
                bs.append(acc)
                b = prev_b[t][l]
                nb = cb.not_(b)
                nbs.append(nb)
                blind_write = cb.and_(b, sig_n[i - 1][t][NEU])
                cells = []
                for s in range(S):
                    old = prev_s[t][l][s]
                    keep = cb.and_(nb, old)
                    wrote = cb.and_(b, sig_n[i - 1][t][s])
                    kept = cb.and_(blind_write, old)
                    cells.append(cb.or_(cb.or_(keep, wrote), kept))
                ss.append(cells)
            nb_row.append(nbs)
            b_row.append(bs)
            s_row.append(ss)
        not_beta.append(nb_row)
        beta.append(b_row)
        sigma.append(s_row)
    # negations for the last step's head wires (earlier ones were made above)
    not_beta.append([[cb.not_(beta[k - 1][t][l]) for l in range(L)] for t in range(T)])

    clauses = [cb.not_(zero)]  # E0
    nx = [[cb.not_(x[i][j]) for j in range(D)] for i in range(k)]
    for i in range(k):  # E1: at most one transition per step
        row = nx[i]
        for j in range(D):
            for j2 in range(j + 1, D):
                clauses.append(cb.or_(row[j], row[j2]))
    for i in range(1, k):  # E2: consecutive steps agree on the state
        for q in range(Q):
            clauses.append(cb.or_(cb.not_(tau_n[i - 1][q]), tau_o[i][q]))
    for i in range(k):  # E3: a transition reads what is under the head
        for t in range(T):
            allowed = [cb.or_(sig_o[i][t][s], sig_o[i][t][NEU]) for s in range(S)]
            for l in range(L):
                nb = not_beta[i][t][l]
                for s in range(S):
                    ns = cb.not_(sigma[i][t][l][s])
                    clauses.append(cb.or_(cb.or_(nb, ns), allowed[s]))
    clauses.append(tau_o[0][m.initial])  # E4
    clauses.append(tau_n[k - 1][q_acc])
    out = cb.and_(*clauses)
    return cb.build(out, k, D)


compile = compile_machine  # noqa: A001 - public name used by the toolkit


# --------------------------------------------------------------------------
# evaluation and weighted satisfiability


def _positions(c: Circuit, assignment) -> list[int]:
    """Input positions set to true; ``assignment`` is a mapping over all
    (step, trans) keys, or an iterable of the true keys."""
    index = {key: p for p, key in enumerate(c.input_keys)}
    if isinstance(assignment, Mapping):
        missing = [key for key in c.input_keys if key not in assignment]
        if missing:
            raise KeyError(f"assignment misses {len(missing)} inputs, e.g. {missing[0]}")
        return [index[key] for key in c.input_keys if assignment[key]]
    out = []
    for key in assignment:
        key = tuple(key)
        if key not in index:
            raise KeyError(f"no input {key}")
        out.append(index[key])
    return out


def evaluate(c: Circuit, assignment) -> bool:
    words = [0] * len(c.input_keys)
    for p in _positions(c, assignment):
        words[p] = 1
    kern = _backend.get()
    vals = kern.eval_words(c.kinds, c.ptr, c.fanin, c.input_ids.tolist(), words, 1)
    return bool(vals[c.output] & 1)


def _keys(c: Circuit, positions) -> frozenset[tuple[int, int]]:
    return frozenset(c.input_keys[p] for p in positions)


def weighted_sat_brute(c: Circuit, weight: int, backend: str | None = None):
    """First weight-``weight`` satisfying input set in lexicographic order of
    input positions, as a set of (step, trans) keys, or None."""
    n = len(c.input_keys)
    if weight < 0 or weight > n:
        return None
    total = comb(n, weight)
    if total > BRUTE_GUARD:
        raise ResourceGuardError(
            f"C({n}, {weight}) = {total} assignments exceed the guard {BRUTE_GUARD}")
    kern = _backend.get(backend)
    hit = kern.brute_first(c.kinds, c.ptr, c.fanin, c.input_ids, c.output, weight)
    return None if hit is None else _keys(c, hit)


def weighted_sat_search(c: Circuit, weight: int, node_limit: int = DEFAULT_NODE_LIMIT,
                        backend: str | None = None):
    """Same answer as :func:`weighted_sat_brute` without enumerating.

    Depth-first over the inputs in order, trying true before false, with
    three-valued propagation through every gate and the cardinality bound
    pruning each node. Raises :class:`ResourceGuardError` past ``node_limit``
    decisions.
    """
    n = len(c.input_keys)
    if weight < 0 or weight > n:
        return None
    fo_ptr, fanout = c.fanout
    kern = _backend.get(backend)
    try:
        hit = kern.bcp_search(c.kinds, c.ptr, c.fanin, fo_ptr, fanout, c.input_ids,
                              c.output, weight, node_limit)
    except SearchLimitExceeded as exc:
        raise ResourceGuardError(str(exc)) from None
    return None if hit is None else _keys(c, hit)


def assignment_of_run(c: Circuit, witness: Sequence[int]) -> frozenset[tuple[int, int]]:
    """Input keys encoding a transition sequence (0-based machine indices)."""
    return frozenset((i + 1, j + 1) for i, j in enumerate(witness))


def decode_assignment(c: Circuit, keys: Iterable[tuple[int, int]]) -> list[int]:
    """Transition sequence (0-based machine indices) of a one-per-step assignment."""
    by_step: dict[int, int] = {}
    for step, trans in keys:
        if step in by_step:
            raise ValueError(f"step {step} performs more than one transition")
        by_step[step] = trans - 1
    if sorted(by_step) != list(range(1, c.steps + 1)):
        raise ValueError("assignment does not cover every step exactly once")
    return [by_step[i] for i in range(1, c.steps + 1)]


# --------------------------------------------------------------------------
# structure


def analyze(c: Circuit, backend: str | None = None) -> CircuitStats:
    """Weft over input-to-output paths; depth counts the non-source gates on
    the longest path into the output. Large means an AND/OR of fan-in >= 3."""
    kern = _backend.get(backend)
    weft, depth, large = kern.structure(c.kinds, c.ptr, c.fanin, c.output)
    return CircuitStats(weft, depth, len(c.kinds), large)


# --------------------------------------------------------------------------
# circuit files


def serialize_circuit(c: Circuit, comments: Iterable[str] = ()) -> str:
    lines = [f"# {x}" for x in comments]
    lines.append(f"circuit {len(c.input_keys)}")
    keys = iter(c.input_keys)
    kinds, ptr, fanin = c.kinds.tolist(), c.ptr.tolist(), c.fanin.tolist()
    for g, kind in enumerate(kinds):
        ins = " ".join(map(str, fanin[ptr[g]:ptr[g + 1]]))
        if kind == INPUT:
            step, trans = next(keys)
            lines.append(f"input {g} {step} {trans}")
        elif kind in (CONST0, CONST1):
            lines.append(f"const {g} {int(kind == CONST1)}")
        else:
            lines.append(f"{KIND_NAMES[kind]} {g} {ins}".rstrip())
    lines.append(f"output {c.output}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    cb = CircuitBuilder()
    declared = None
    output = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        key = toks[0]
        try:
            args = [int(a) for a in toks[1:]]
        except ValueError:
            raise ParseError("expected integers", lineno) from None
        if declared is None:
            if key != "circuit" or len(args) != 1:
                raise ParseError("expected header 'circuit <inputs>'", lineno)
            declared = args[0]
            continue
        if key == "output":
            if len(args) != 1:
                raise ParseError("expected 'output <id>'", lineno)
            output = args[0]
            continue
        if not args or args[0] != len(cb.kinds):
            raise ParseError(f"gate ids must be consecutive from 0 (expected {len(cb.kinds)})",
                             lineno)
        rest = args[1:]
        if any(not 0 <= a < args[0] for a in rest) and key in ("not", "and", "or"):
            raise ParseError("gate reads an undefined or later gate", lineno)
        if key == "input":
            if len(rest) != 2:
                raise ParseError("expected 'input <id> <step> <trans>'", lineno)
            cb.input(*rest)
        elif key == "const":
            if rest not in ([0], [1]):
                raise ParseError("expected 'const <id> <0|1>'", lineno)
            cb.const(bool(rest[0]))
        elif key == "not":
            if len(rest) != 1:
                raise ParseError("NOT takes exactly one input", lineno)
            cb.not_(rest[0])
        elif key == "and":
            cb.and_(*rest)
        elif key == "or":
            cb.or_(*rest)
        else:
            raise ParseError(f"unknown gate kind {key!r}", lineno)
    if declared is None:
        raise ParseError("empty input: missing 'circuit' header")
    if output is None:
        raise ParseError("missing 'output' line")
    if len(cb.keys) != declared:
        raise ParseError(f"header declares {declared} inputs, found {len(cb.keys)}")
    steps = max((s for s, _ in cb.keys), default=0)
    n_trans = max((j for _, j in cb.keys), default=0)
    return cb.build(output, steps, n_trans)
