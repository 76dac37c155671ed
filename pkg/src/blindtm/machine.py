"""Blind multi-tape nondeterministic Turing machines.

A transition may read the neutral symbol ``_`` on a tape (it then fires
whatever the head sees) and may write ``_`` (the cell is kept). Symbols are
small integers: 0 is the blank, ``len(alphabet)`` is the neutral symbol and
never appears on a tape.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from . import _backend
from .model import ParseError

log = logging.getLogger(__name__)

NEUTRAL_NAME = "_"


@dataclass(frozen=True)
class Transition:
    reads: tuple[int, ...]
    src: int
    writes: tuple[int, ...]
    dst: int
    moves: tuple[int, ...]


@dataclass(frozen=True)
class BlindMachine:
    tapes: int
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    initial: int
    accepting: frozenset[int]
    transitions: tuple[Transition, ...]

    @property
    def neutral(self) -> int:
        return len(self.alphabet)

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def symbol_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.alphabet)}

    @cached_property
    def by_state(self) -> tuple[tuple[int, ...], ...]:
        """Transition indices grouped by source state, table order preserved."""
        groups: list[list[int]] = [[] for _ in self.states]
        for j, t in enumerate(self.transitions):
            if 0 <= t.src < len(groups):
                groups[t.src].append(j)
        return tuple(tuple(g) for g in groups)

    def symbol(self, name: str) -> int:
        if name == NEUTRAL_NAME:
            return self.neutral
        return self.symbol_index[name]

    def state(self, name: str) -> int:
        return self.state_index[name]

    def symbol_name(self, sym: int) -> str:
        return NEUTRAL_NAME if sym == self.neutral else self.alphabet[sym]

    def describe(self, j: int) -> str:
        t = self.transitions[j]
        names = self.symbol_name
        return "<{} {} {} {} {}>".format(
            " ".join(map(names, t.reads)),
            self.states[t.src],
            " ".join(map(names, t.writes)),
            self.states[t.dst],
            " ".join(f"{d:+d}" if d else "0" for d in t.moves),
        )


class MachineBuilder:
    """Incremental construction of a :class:`BlindMachine` by names."""

    def __init__(self, tapes: int, alphabet: Sequence[str]):
        if NEUTRAL_NAME in alphabet:
            raise ValueError("'_' is reserved for the neutral symbol")
        self.tapes = tapes
        self.alphabet = tuple(alphabet)
        self._sym = {s: i for i, s in enumerate(self.alphabet)}
        self._states: dict[str, int] = {}
        self._transitions: list[Transition] = []
        self.initial: str | None = None
        self.accepting: set[str] = set()

    def state(self, name: str) -> int:
        idx = self._states.get(name)
        if idx is None:
            idx = self._states[name] = len(self._states)
        return idx

    def sym(self, name: str) -> int:
        return len(self.alphabet) if name == NEUTRAL_NAME else self._sym[name]

    def add(self, reads: Sequence[str], src: str, writes: Sequence[str], dst: str,
            moves: Sequence[int]) -> None:
        if not len(reads) == len(writes) == len(moves) == self.tapes:
            raise ValueError(f"transition arity mismatch for {self.tapes} tapes")
        self._transitions.append(Transition(
            tuple(self.sym(r) for r in reads), self.state(src),
            tuple(self.sym(w) for w in writes), self.state(dst), tuple(moves)))

    def build(self) -> BlindMachine:
        if self.initial is None:
            raise ValueError("initial state not set")
        init = self.state(self.initial)
        acc = frozenset(self.state(a) for a in sorted(self.accepting))
        states = tuple(sorted(self._states, key=self._states.__getitem__))
        return BlindMachine(self.tapes, self.alphabet, states, init, acc,
                            tuple(self._transitions))


# --------------------------------------------------------------------------
# configurations


Tape = tuple[tuple[int, int], ...]  # sorted (position, symbol) pairs, no blanks


@dataclass(frozen=True)
class Configuration:
    state: int
    tapes: tuple[Tape, ...]
    heads: tuple[int, ...]

    def cell(self, tape: int, pos: int) -> int:
        cells = self.tapes[tape]
        i = bisect.bisect_left(cells, (pos, -1))
        if i < len(cells) and cells[i][0] == pos:
            return cells[i][1]
        return 0

    def under_heads(self) -> tuple[int, ...]:
        return tuple(self.cell(t, h) for t, h in enumerate(self.heads))

    def tape_word(self, tape: int, start: int = 0) -> list[int]:
        """Symbols from ``start`` up to (excluding) the first blank."""
        out = []
        pos = start
        while (sym := self.cell(tape, pos)) != 0:
            out.append(sym)
            pos += 1
        return out


def initial_configuration(m: BlindMachine, word: Sequence[int] = ()) -> Configuration:
    first: Tape = tuple((i, s) for i, s in enumerate(word) if s != 0)
    tapes = (first,) + ((),) * (m.tapes - 1)
    return Configuration(m.initial, tapes, (0,) * m.tapes)


def applicable(m: BlindMachine, c: Configuration) -> list[int]:
    seen = c.under_heads()
    neutral = m.neutral
    out = []
    for j in m.by_state[c.state]:
        reads = m.transitions[j].reads
        if all(r == neutral or r == s for r, s in zip(reads, seen)):
            out.append(j)
    return out


def _write(cells: Tape, pos: int, sym: int) -> Tape:
    i = bisect.bisect_left(cells, (pos, -1))
    hit = i < len(cells) and cells[i][0] == pos
    rest = cells[i + 1:] if hit else cells[i:]
    if sym == 0:
        return cells[:i] + rest
    return cells[:i] + ((pos, sym),) + rest


def step(m: BlindMachine, c: Configuration, j: int) -> Configuration:
    if j not in applicable(m, c):
        raise ValueError(f"transition {j} is not applicable in this configuration")
    t = m.transitions[j]
    tapes = list(c.tapes)
    for i, w in enumerate(t.writes):
        if w != m.neutral:
            tapes[i] = _write(tapes[i], c.heads[i], w)
    heads = tuple(h + d for h, d in zip(c.heads, t.moves))
    return Configuration(t.dst, tuple(tapes), heads)


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    steps: int = 0
    witness: tuple[int, ...] = ()
    final: Configuration | None = field(default=None)


def replay(m: BlindMachine, witness: Iterable[int], word: Sequence[int] = ()) -> Configuration:
    c = initial_configuration(m, word)
    for j in witness:
        c = step(m, c, j)
    return c


def _word_ids(m: BlindMachine, word: Sequence[int] | Sequence[str] | str) -> tuple[int, ...]:
    if isinstance(word, str):
        word = word.split()
    ids = tuple(m.symbol(w) if isinstance(w, str) else int(w) for w in word)
    for s in ids:
        if not 0 <= s < m.neutral:
            raise ValueError(f"input symbol {s} is not a tape symbol")
    return ids


def search_accepting(m: BlindMachine, word=(), k: int = 0, backend: str | None = None) -> RunResult:
    """Is there a computation of at most ``k`` steps reaching an accepting state?

    Breadth-first, transitions expanded in table order; the witness is the
    first accepting path in that order, so results are reproducible.
    """
    if k < 0:
        raise ValueError("step budget must be nonnegative")
    for r in _run(m, word, k, 1, backend):
        return r
    return RunResult(False)


def iter_accepting(m: BlindMachine, word=(), k: int = 0, backend: str | None = None) -> Iterator[RunResult]:
    """Every distinct accepting configuration reachable within ``k`` steps, in BFS order."""
    if k < 0:
        raise ValueError("step budget must be nonnegative")
    yield from _run(m, word, k, 0, backend)


def _run(m, word, k, limit, backend):
    ids = _word_ids(m, word)
    kern = _backend.get(backend)
    for witness, state, heads, tapes in kern.bfs(m, ids, k, limit):
        final = Configuration(state, tapes, heads)
        yield RunResult(True, len(witness), tuple(witness), final)


def normalize_for_exact(m: BlindMachine, k: int | None = None) -> BlindMachine:
    """Machine accepting in exactly k+2 steps iff ``m`` accepts in at most k.

    Old accepting states collapse into a fresh non-accepting ``q_a`` that may
    idle before moving to the fresh accepting ``q_A``. A fresh start state
    spends one blind step entering the old initial state, which pins the
    exact length: s + 1 + idles + 1 = k + 2 needs s <= k.

    The construction does not depend on ``k``; it is accepted (and checked)
    so callers can state the budget they normalize for.
    """
    if k is not None and k < 0:
        raise ValueError("step budget must be nonnegative")
    neutral = m.neutral
    blind = (neutral,) * m.tapes
    stay = (0,) * m.tapes
    base = len(m.states)
    q_a, q_A, q_start = base, base + 1, base + 2
    names = set(m.states)

    def fresh(name):
        while name in names:
            name += "'"
        names.add(name)
        return name

    states = m.states + (fresh("q_a"), fresh("q_A"), fresh("q_start"))

    def redirect(q):
        return q_a if q in m.accepting else q

    trans = [Transition(t.reads, redirect(t.src), t.writes, redirect(t.dst), t.moves)
             for t in m.transitions]
    trans += [
        Transition(blind, q_a, blind, q_a, stay),
        Transition(blind, q_a, blind, q_A, stay),
        Transition(blind, q_start, blind, redirect(m.initial), stay),
    ]
    return BlindMachine(m.tapes, m.alphabet, states, q_start, frozenset({q_A}), tuple(trans))


def pad_to_exact(normalized: BlindMachine, witness: Sequence[int], total: int) -> list[int]:
    """Stretch an accepting run of a normalized machine to ``total`` steps by
    idling in ``q_a`` before the final accept step."""
    if len(witness) > total:
        raise ValueError(f"run of {len(witness)} steps is longer than {total}")
    *body, last = witness
    t = normalized.transitions[last]
    idle = [j for j, u in enumerate(normalized.transitions)
            if u.src == u.dst == t.src and all(r == normalized.neutral for r in u.reads)
            and all(w == normalized.neutral for w in u.writes) and not any(u.moves)]
    if not idle:
        raise ValueError("run does not end with the normalized accept step")
    return list(body) + [idle[0]] * (total - len(witness)) + [last]


def validate_machine(m: BlindMachine) -> list[str]:
    diags = []
    nstates = len(m.states)
    neutral = m.neutral
    if m.tapes < 1:
        diags.append("machine needs at least one tape")
    if not m.alphabet:
        diags.append("alphabet is empty (the blank symbol is required)")
    if NEUTRAL_NAME in m.alphabet:
        diags.append("'_' is reserved and may not be declared")
    if len(set(m.alphabet)) != len(m.alphabet):
        diags.append("duplicate alphabet symbols")
    if len(set(m.states)) != len(m.states):
        diags.append("duplicate state names")
    if not 0 <= m.initial < nstates:
        diags.append(f"initial state {m.initial} is not declared")
    for q in sorted(m.accepting):
        if not 0 <= q < nstates:
            diags.append(f"accepting state {q} is not declared")
    for j, t in enumerate(m.transitions):
        if not (len(t.reads) == len(t.writes) == len(t.moves) == m.tapes):
            diags.append(f"transition {j}: arity differs from {m.tapes} tapes")
            continue
        for label, q in (("source", t.src), ("target", t.dst)):
            if not 0 <= q < nstates:
                diags.append(f"transition {j}: {label} state {q} is not declared")
        if any(not 0 <= s <= neutral for s in t.reads + t.writes):
            diags.append(f"transition {j}: undeclared symbol")
        if any(d not in (-1, 0, 1) for d in t.moves):
            diags.append(f"transition {j}: move outside {{-1, 0, 1}}")
    return diags


# --------------------------------------------------------------------------
# machine files


def serialize_machine(m: BlindMachine, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines += [
        "machine",
        f"tapes {m.tapes}",
        "alphabet " + " ".join(m.alphabet),
        "states " + " ".join(m.states),
        f"initial {m.states[m.initial]}",
        "accepting " + " ".join(m.states[q] for q in sorted(m.accepting)),
    ]
    name = m.symbol_name
    for t in m.transitions:
        lines.append("trans {} {} {} {} {}".format(
            " ".join(map(name, t.reads)), m.states[t.src],
            " ".join(map(name, t.writes)), m.states[t.dst],
            " ".join(map(str, t.moves))))
    return "\n".join(lines) + "\n"


def parse_machine(text: str) -> BlindMachine:
    tapes = alphabet = states = initial = None
    accepting: list[str] = []
    raw_trans: list[tuple[int, list[str]]] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        key, args = toks[0], toks[1:]
        if not seen_header:
            if key != "machine" or args:
                raise ParseError("expected 'machine' header", lineno)
            seen_header = True
        elif key == "tapes":
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("expected 'tapes <m>' with m >= 1", lineno)
            tapes = int(args[0])
        elif key == "alphabet":
            if NEUTRAL_NAME in args:
                raise ParseError("'_' is reserved and may not be declared", lineno)
            if not args or len(set(args)) != len(args):
                raise ParseError("alphabet must list distinct symbols, blank first", lineno)
            alphabet = tuple(args)
        elif key == "states":
            if not args or len(set(args)) != len(args):
                raise ParseError("states must list distinct names", lineno)
            states = tuple(args)
        elif key == "initial":
            if len(args) != 1:
                raise ParseError("expected 'initial <q>'", lineno)
            initial = args[0]
        elif key == "accepting":
            accepting = args
        elif key == "trans":
            raw_trans.append((lineno, args))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if not seen_header:
        raise ParseError("empty input: missing 'machine' header")
    for what, val in (("tapes", tapes), ("alphabet", alphabet), ("states", states),
                      ("initial", initial)):
        if val is None:
            raise ParseError(f"missing '{what}' line")
    sidx = {s: i for i, s in enumerate(states)}
    aidx = {s: i for i, s in enumerate(alphabet)}
    aidx[NEUTRAL_NAME] = len(alphabet)

    def st(name, lineno):
        if name not in sidx:
            raise ParseError(f"undeclared state {name!r}", lineno)
        return sidx[name]

    def sy(name, lineno):
        if name not in aidx:
            raise ParseError(f"undeclared symbol {name!r}", lineno)
        return aidx[name]

    trans = []
    for lineno, args in raw_trans:
        m = tapes
        if len(args) != 3 * m + 2:
            raise ParseError(f"transition needs {3 * m + 2} fields for {m} tapes", lineno)
        reads = tuple(sy(a, lineno) for a in args[:m])
        src = st(args[m], lineno)
        writes = tuple(sy(a, lineno) for a in args[m + 1:2 * m + 1])
        dst = st(args[2 * m + 1], lineno)
        try:
            moves = tuple(int(a) for a in args[2 * m + 2:])
        except ValueError:
            raise ParseError("moves must be integers", lineno) from None
        if any(d not in (-1, 0, 1) for d in moves):
            raise ParseError("moves must be in {-1, 0, 1}", lineno)
        trans.append(Transition(reads, src, writes, dst, moves))
    return BlindMachine(tapes, alphabet, states, st(initial, 0),
                        frozenset(st(a, 0) for a in accepting), tuple(trans))
