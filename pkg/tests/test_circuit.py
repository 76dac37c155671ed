from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindtm import _backend
from blindtm._fallback import NOT, OR
from blindtm.builders import AtMost, build_digraph_kernel, build_sigma_rho
from blindtm.circuit import (Circuit, CircuitBuilder, NotNormalizedError, ResourceGuardError,
                             analyze, assignment_of_run, compile_machine, decode_assignment,
                             evaluate, parse_circuit, serialize_circuit, weighted_sat_brute,
                             weighted_sat_search)
from blindtm.machine import (BlindMachine, MachineBuilder, Transition, normalize_for_exact,
                             pad_to_exact, replay, search_accepting)
from blindtm.model import Digraph, IntSetSpec, ParseError

from helpers import accepts_within, cycle

BACKENDS = ["python"] + (["compiled"] if _backend.HAVE_COMPILED else [])
ZERO, POS = IntSetSpec.finite(0), IntSetSpec.positive()


def reference_eval(c: Circuit, true_keys) -> bool:
    """Gate-by-gate evaluation straight off the Gate records."""
    val = {}
    for g in c.gates:
        if g.kind == "input":
            val[g.id] = (g.step, g.trans) in true_keys
        elif g.kind in ("const0", "const1"):
            val[g.id] = g.kind == "const1"
        elif g.kind == "not":
            val[g.id] = not val[g.inputs[0]]
        elif g.kind == "and":
            val[g.id] = all(val[a] for a in g.inputs)
        else:
            val[g.id] = any(val[a] for a in g.inputs)
    return val[c.output]


def reference_first(c: Circuit, weight: int):
    for combo in combinations(c.input_keys, weight):
        if reference_eval(c, set(combo)):
            return frozenset(combo)
    return None


class TestSmallCircuits:
    def test_single_input(self):
        cb = CircuitBuilder()
        x = cb.input(1, 1)
        c = cb.build(x, 1, 1)
        assert evaluate(c, {(1, 1): True}) and not evaluate(c, {(1, 1): False})
        assert weighted_sat_brute(c, 0) is None
        assert weighted_sat_brute(c, 1) == {(1, 1)}

    def test_or_of_five(self):
        cb = CircuitBuilder()
        xs = [cb.input(1, j) for j in range(1, 6)]
        c = cb.build(cb.or_(*xs), 1, 5)
        assert not evaluate(c, {key: False for key in c.input_keys})
        assert evaluate(c, [(1, 3)])

    def test_const_one_weight_zero(self):
        cb = CircuitBuilder()
        cb.input(1, 1)
        c = cb.build(cb.const(True), 1, 1)
        assert weighted_sat_brute(c, 0) == frozenset()
        assert weighted_sat_search(c, 0) == frozenset()

    def test_missing_assignment(self):
        cb = CircuitBuilder()
        a, b = cb.input(1, 1), cb.input(1, 2)
        c = cb.build(cb.and_(a, b), 1, 2)
        with pytest.raises(KeyError):
            evaluate(c, {(1, 1): True})
        with pytest.raises(KeyError):
            evaluate(c, [(3, 3)])

    def test_bad_structure(self):
        cb = CircuitBuilder()
        a = cb.input(1, 1)
        cb._add(NOT, (a, a))
        with pytest.raises(ValueError):
            cb.build(1)
        cb = CircuitBuilder()
        cb.input(1, 1)
        cb._add(OR, (3,))  # reads a gate that does not exist yet
        with pytest.raises(ValueError):
            cb.build(1)

    def test_small_gates_only(self):
        cb = CircuitBuilder()
        a, b = cb.input(1, 1), cb.input(1, 2)
        s = analyze(cb.build(cb.or_(cb.and_(a, b), cb.not_(a))))
        assert s.weft == 0 and s.depth == 2 and s.large_gate_count == 0

    def test_one_big_or(self):
        cb = CircuitBuilder()
        xs = [cb.input(1, j) for j in range(1, 11)]
        s = analyze(cb.build(cb.or_(*xs)))
        assert (s.weft, s.depth, s.gate_count, s.large_gate_count) == (1, 1, 11, 1)

    def test_brute_guard(self):
        cb = CircuitBuilder()
        xs = [cb.input(1, j) for j in range(1, 61)]
        c = cb.build(cb.or_(*xs))
        with pytest.raises(ResourceGuardError):
            weighted_sat_brute(c, 10)

    def test_weight_out_of_range(self):
        cb = CircuitBuilder()
        c = cb.build(cb.or_(cb.input(1, 1)))
        assert weighted_sat_brute(c, 2) is None and weighted_sat_search(c, -1) is None


@st.composite
def circuits(draw):
    cb = CircuitBuilder()
    n = draw(st.integers(1, 7))
    ids = [cb.input(1, j) for j in range(1, n + 1)]
    for _ in range(draw(st.integers(1, 14))):
        kind = draw(st.sampled_from(["and", "or", "not", "const"]))
        if kind == "const":
            ids.append(cb.const(draw(st.booleans())))
        elif kind == "not":
            ids.append(cb.not_(draw(st.sampled_from(ids))))
        else:
            ins = draw(st.lists(st.sampled_from(ids), min_size=0, max_size=4))
            ids.append(cb.and_(*ins) if kind == "and" else cb.or_(*ins))
    return cb.build(ids[-1], 1, n)


@settings(max_examples=300, deadline=None)
@given(circuits(), st.integers(0, 7), st.sampled_from(BACKENDS))
def test_weighted_sat_agrees_with_reference(c, w, backend):
    want = reference_first(c, w) if w <= len(c.input_keys) else None
    assert weighted_sat_brute(c, w, backend=backend) == want
    assert weighted_sat_search(c, w, backend=backend) == want


@settings(max_examples=200, deadline=None)
@given(circuits(), st.data())
def test_evaluate_agrees_with_reference(c, data):
    true_keys = data.draw(st.sets(st.sampled_from(c.input_keys)))
    assert evaluate(c, true_keys) == reference_eval(c, true_keys)


@settings(max_examples=100, deadline=None)
@given(circuits())
def test_file_round_trip(c):
    back = parse_circuit(serialize_circuit(c, ["round trip"]))
    assert back.input_keys == c.input_keys and back.output == c.output
    assert back.kinds.tolist() == c.kinds.tolist() and back.fanin.tolist() == c.fanin.tolist()
    assert analyze(back) == analyze(c)


@given(circuits())
def test_weft_at_most_depth(c):
    s = analyze(c)
    assert s.weft <= s.depth


@pytest.mark.parametrize("text", [
    "input 0 1 1",
    "circuit 1\ninput 1 1 1\noutput 1",
    "circuit 1\ninput 0 1 1\nnot 1 2\noutput 1",
    "circuit 1\ninput 0 1 1\nxor 1 0\noutput 1",
    "circuit 1\ninput 0 1 1\nconst 1 2\noutput 1",
    "circuit 1\ninput 0 1 1",
])
def test_circuit_file_errors(text):
    with pytest.raises(ParseError):
        parse_circuit(text)


# compiled machines --------------------------------------------------------------


def never_accepting():
    b = MachineBuilder(1, ["B", "a"])
    b.initial = "s"
    b.accepting = {"t"}
    b.add(["_"], "s", ["a"], "s", [1])
    b.add(["a"], "s", ["_"], "s", [-1])
    b.state("t")
    return normalize_for_exact(b.build())


def test_never_accepting_has_no_weighted_solution():
    m = never_accepting()
    for k in range(1, 7):
        c = compile_machine(m, (), k)
        assert weighted_sat_brute(c, k) is None
        assert weighted_sat_search(c, k) is None


def test_compile_requires_normalized():
    b = MachineBuilder(1, ["B"])
    b.initial = "s"
    b.accepting = {"t", "u"}
    b.add(["_"], "s", ["_"], "t", [0])
    b.state("u")
    with pytest.raises(NotNormalizedError):
        compile_machine(b.build(), (), 2)
    with pytest.raises(ValueError):
        compile_machine(normalize_for_exact(b.build()), (), 0)


def test_input_layout():
    c = compile_machine(never_accepting(), (), 3)
    assert c.input_keys == tuple((i, j) for i in range(1, 4) for j in range(1, 6))
    assert c.input_ids.tolist() == list(range(15))
    assert c.input_map[(2, 1)] == 5


@pytest.fixture(scope="module")
def c5_k2():
    b = build_sigma_rho(cycle(5), ZERO, POS, AtMost(2))
    norm = normalize_for_exact(b.machine, b.step_bound)
    k = b.step_bound + 2
    return b, norm, k, compile_machine(norm, (), k)


def test_c5_k2_circuit(c5_k2):
    b, norm, k, c = c5_k2
    stats = analyze(c)
    assert stats.weft == 2
    hit = weighted_sat_search(c, k)
    assert hit is not None
    run = decode_assignment(c, hit)
    assert replay(norm, run).state in norm.accepting
    with pytest.raises(ResourceGuardError):
        weighted_sat_brute(c, k)


def test_simulator_witness_satisfies_circuit(c5_k2):
    b, norm, k, c = c5_k2
    r = search_accepting(norm, (), k)
    run = pad_to_exact(norm, r.witness, k)
    assert evaluate(c, assignment_of_run(c, run))
    # dropping the last step breaks the weight-k encoding
    assert not evaluate(c, assignment_of_run(c, run[:-1]))


def test_depth_depends_on_k_only():
    for k in (1, 2):
        depths = set()
        for n in (4, 5, 6):
            b = build_sigma_rho(cycle(n), ZERO, POS, AtMost(k))
            c = compile_machine(normalize_for_exact(b.machine), (), b.step_bound + 2)
            s = analyze(c)
            assert s.weft == 2
            depths.add(s.depth)
        assert len(depths) == 1


def test_gate_count_is_polynomial():
    """Gates are Theta(k |Delta|^2 + k^2 m |Sigma|): the at-most-one
    constraint contributes the |Delta|^2 term."""
    for n, k in ((3, 1), (4, 1), (4, 2), (5, 2)):
        b = build_sigma_rho(cycle(n), ZERO, POS, AtMost(k))
        m = normalize_for_exact(b.machine)
        kk = b.step_bound + 2
        c = compile_machine(m, (), kk)
        D, S, Q, T = len(m.transitions), len(m.alphabet), len(m.states), m.tapes
        assert len(c) <= 12 * kk * (D * D + Q + T * (2 * kk + 1) * (S + 2))


def test_decode_assignment_errors():
    c = compile_machine(never_accepting(), (), 2)
    with pytest.raises(ValueError):
        decode_assignment(c, [(1, 1), (1, 2)])
    with pytest.raises(ValueError):
        decode_assignment(c, [(1, 1)])


@st.composite
def tiny_machines(draw):
    tapes = draw(st.integers(1, 2))
    nstates = draw(st.integers(1, 3))
    sym = st.integers(0, 2)  # blank, one letter, neutral
    trans = draw(st.lists(st.builds(
        Transition,
        st.tuples(*[sym] * tapes), st.integers(0, nstates - 1),
        st.tuples(*[sym] * tapes), st.integers(0, nstates - 1),
        st.tuples(*[st.integers(-1, 1)] * tapes)), min_size=1, max_size=4))
    acc = frozenset({draw(st.integers(0, nstates - 1))})
    return BlindMachine(tapes, ("B", "a"), tuple(f"q{i}" for i in range(nstates)), 0, acc,
                        tuple(trans))


@settings(max_examples=120, deadline=None)
@given(tiny_machines(), st.lists(st.integers(0, 1), max_size=2), st.integers(0, 2))
def test_compiled_circuit_matches_simulator(m, word, k):
    norm = normalize_for_exact(m, k)
    c = compile_machine(norm, word, k + 2)
    brute = weighted_sat_brute(c, k + 2)
    search = weighted_sat_search(c, k + 2)
    assert brute == search
    assert (brute is not None) == accepts_within(m, k, word)
    if brute is not None:
        run = decode_assignment(c, brute)
        assert replay(norm, run, word).state in norm.accepting
        assert len(run) == k + 2


def test_kernel_machine_compiles_to_weft_two():
    d = Digraph(3, frozenset({(1, 2), (2, 3), (3, 1)}))
    b = build_digraph_kernel(d, 1)
    c = compile_machine(normalize_for_exact(b.machine), (), b.step_bound + 2)
    assert analyze(c).weft == 2
    assert weighted_sat_search(c, b.step_bound + 2) is None
