import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindtm.builders import (AtLeastNMinusK, AtMost, CardinalityMode, CodeMode, Exactly,
                              ExactlyNMinusK, MinDistance, WeightDistribution, build_code_machine,
                              build_digraph_kernel, build_induced_r_regular, build_sigma_rho,
                              decide_p_rho, decode_chosen_set, emit_instance, load_instance,
                              solution_set)
from blindtm.generators import random_digraph, random_graph, random_matrix
from blindtm.machine import iter_accepting, search_accepting, validate_machine
from blindtm.model import STANDARD_SPECS, Digraph, FqMatrix, Graph, IntSetSpec
from blindtm.oracles import (column_sum_zero, is_kernel, is_sigma_rho_set, oracle_code_sum,
                             oracle_kernel, oracle_p_rho, oracle_r_regular, oracle_sigma_rho)

from helpers import complete, cycle, path

ZERO, POS, ALL = IntSetSpec.finite(0), IntSetSpec.positive(), IntSetSpec.all()
MODES = (AtMost, AtLeastNMinusK, Exactly, ExactlyNMinusK)


def run(b):
    return search_accepting(b.machine, (), b.step_bound)


class TestSigmaRho:
    def test_c5_independent_dominating(self):
        g = cycle(5)
        b = build_sigma_rho(g, ZERO, POS, AtMost(2))
        r = run(b)
        assert r.accepted
        d = decode_chosen_set(b, r)
        assert len(d) <= 2 and is_sigma_rho_set(g, d, ZERO, POS)

    def test_p3_total_domination_needs_two(self):
        b = build_sigma_rho(path(3), POS, POS, AtMost(1))
        assert not run(b).accepted
        assert not oracle_sigma_rho(path(3), POS, POS, AtMost(1)).decision

    def test_k3_dual(self):
        g = complete(3)
        b = build_sigma_rho(g, ALL, POS, AtLeastNMinusK(1))
        r = run(b)
        assert r.accepted
        d = solution_set(b, r)
        assert len(d) >= 2 and is_sigma_rho_set(g, d, ALL, POS)

    def test_machine_shape(self):
        b = build_sigma_rho(cycle(5), ZERO, POS, AtMost(2))
        m = b.machine
        assert m.tapes == 6 and m.alphabet[:3] == ("B", "0", "1") and len(m.alphabet) == 8
        assert validate_machine(m) == []

    def test_at_most_zero_decodes_empty(self):
        b = build_sigma_rho(Graph(3), ALL, ALL, AtMost(0))
        r = run(b)
        assert r.accepted and decode_chosen_set(b, r) == frozenset()

    def test_bound_precondition(self):
        with pytest.raises(ValueError):
            build_sigma_rho(cycle(5), IntSetSpec.all(bound=1), POS, AtMost(2))
        with pytest.raises(ValueError):
            build_sigma_rho(complete(4), IntSetSpec.all(bound=2), POS, AtLeastNMinusK(1))

    def test_decode_rejected_run(self):
        b = build_sigma_rho(path(3), POS, POS, AtMost(1))
        with pytest.raises(ValueError):
            decode_chosen_set(b, run(b))

    def test_step_bound_independent_of_n(self):
        bounds = {build_sigma_rho(cycle(n), ZERO, POS, AtMost(2)).step_bound
                  for n in range(3, 9)}
        assert len(bounds) == 1

    def test_every_accepting_run_decodes_to_a_solution(self):
        g = cycle(6)
        b = build_sigma_rho(g, ZERO, POS, AtMost(2))
        sets = {decode_chosen_set(b, r) for r in iter_accepting(b.machine, (), b.step_bound)}
        assert sets == set(oracle_sigma_rho(g, ZERO, POS, AtMost(2)).witnesses)

    @pytest.mark.parametrize("mode", MODES)
    def test_oracle_agreement_sample(self, mode):
        rng = random.Random(f"builders:{mode.__name__}")
        names = sorted(STANDARD_SPECS)
        for _ in range(60):
            g = random_graph(rng, rng.randint(1, 5))
            k = rng.randint(0, 3)
            s, r = STANDARD_SPECS[rng.choice(names)], STANDARD_SPECS[rng.choice(names)]
            b = build_sigma_rho(g, s, r, mode(k))
            res = run(b)
            assert res.accepted == oracle_sigma_rho(g, s, r, mode(k)).decision
            if res.accepted:
                d = solution_set(b, res)
                assert is_sigma_rho_set(g, d, s, r) and mode(k).admits(len(d), g.n)


class TestKernel:
    def test_single_arc(self):
        d = Digraph(2, frozenset({(1, 2)}))
        b = build_digraph_kernel(d, 1)
        r = run(b)
        assert r.accepted and decode_chosen_set(b, r) == {2}

    def test_directed_triangle(self):
        d = Digraph(3, frozenset({(1, 2), (2, 3), (3, 1)}))
        assert not any(run(build_digraph_kernel(d, k)).accepted for k in range(4))

    def test_two_cycle(self):
        d = Digraph(2, frozenset({(1, 2), (2, 1)}))
        b = build_digraph_kernel(d, 1)
        r = run(b)
        assert r.accepted and decode_chosen_set(b, r) in ({1}, {2})

    def test_negative_k(self):
        with pytest.raises(ValueError):
            build_digraph_kernel(Digraph(1), -1)

    def test_oracle_agreement_sample(self):
        rng = random.Random("kernel-sample")
        for _ in range(80):
            d = random_digraph(rng, rng.randint(1, 5))
            k = rng.randint(0, 3)
            b = build_digraph_kernel(d, k)
            r = run(b)
            assert r.accepted == oracle_kernel(d, k).decision
            if r.accepted:
                assert is_kernel(d, decode_chosen_set(b, r))


class TestPRho:
    def test_star_connected(self):
        star = Graph(4, frozenset({(1, 2), (1, 3), (1, 4)}))
        out = decide_p_rho(star, "connected", POS, 1)
        assert out.decision and out.witness == {1}

    def test_p4_connected(self):
        assert not decide_p_rho(path(4), "connected", POS, 1).decision

    def test_always_true_matches_sigma_all(self):
        rng = random.Random("p-rho")
        for _ in range(40):
            g = random_graph(rng, rng.randint(1, 5))
            k = rng.randint(0, 3)
            rho = STANDARD_SPECS[rng.choice(sorted(STANDARD_SPECS))]
            assert (decide_p_rho(g, "always-true", rho, k).decision
                    == run(build_sigma_rho(g, ALL, rho, AtMost(k))).accepted)

    @pytest.mark.parametrize("prop", ["connected", "clique", "independent", "r-regular(1)"])
    def test_oracle_agreement(self, prop):
        rng = random.Random(prop)
        for _ in range(30):
            g = random_graph(rng, rng.randint(1, 5))
            k = rng.randint(0, 3)
            out = decide_p_rho(g, prop, POS, k)
            assert out.decision == oracle_p_rho(g, prop, POS, k).decision

    def test_bound_precondition(self):
        with pytest.raises(ValueError):
            decide_p_rho(cycle(4), "connected", IntSetSpec.all(bound=1), 2)


class TestInducedRegular:
    def test_triangle(self):
        b = build_induced_r_regular(complete(3), 2, 3)
        r = run(b)
        assert r.accepted and decode_chosen_set(b, r) == {1, 2, 3}
        assert b.machine.tapes == 1
        assert all(b.machine.neutral not in t.reads + t.writes for t in b.machine.transitions)

    def test_single_vertex_is_zero_regular(self):
        for g in (Graph(1), cycle(4), complete(3)):
            assert run(build_induced_r_regular(g, 0, 1)).accepted

    def test_c5_has_no_small_two_regular(self):
        assert not run(build_induced_r_regular(cycle(5), 2, 4)).accepted
        assert run(build_induced_r_regular(cycle(5), 2, 5)).accepted

    def test_step_bound(self):
        assert [build_induced_r_regular(cycle(5), 1, k).step_bound for k in range(4)] == \
            [0, 2, 6, 12]

    def test_oracle_agreement_sample(self):
        rng = random.Random("rreg")
        for _ in range(80):
            g = random_graph(rng, rng.randint(1, 6))
            k = rng.randint(0, 3)
            r = rng.randint(0, 2)
            b = build_induced_r_regular(g, r, k)
            res = run(b)
            assert res.accepted == oracle_r_regular(g, r, k).decision
            if res.accepted:
                d = decode_chosen_set(b, res)
                assert d and len(d) <= k and all(len(g.adjacency[v] & d) == r for v in d)


class TestCode:
    def test_repeated_column(self):
        assert run(build_code_machine(FqMatrix(2, ((1, 1),)), 2, WeightDistribution)).accepted

    def test_identity_min_distance(self):
        h = FqMatrix(2, ((1, 0), (0, 1)))
        assert not run(build_code_machine(h, 2, MinDistance)).accepted

    def test_f3_pair(self):
        b = build_code_machine(FqMatrix(3, ((1, 2),)), 2, "weight-distribution")
        r = run(b)
        assert r.accepted and decode_chosen_set(b, r) == {1, 2}

    def test_decoded_columns_sum_to_zero(self):
        h = FqMatrix(3, ((1, 2, 1, 0), (2, 1, 0, 1)))
        for mode in CodeMode:
            b = build_code_machine(h, 3, mode)
            for r in iter_accepting(b.machine, (), b.step_bound):
                cols = decode_chosen_set(b, r)
                assert cols and column_sum_zero(h, cols)

    @pytest.mark.parametrize("q", [2, 3, 5])
    @pytest.mark.parametrize("dual", [False, True])
    def test_oracle_agreement_sample(self, q, dual):
        rng = random.Random(f"code:{q}:{dual}")
        for _ in range(40):
            h = random_matrix(rng, q, rng.randint(1, 3), rng.randint(1, 4))
            k = rng.randint(0, 3)
            for mode in CodeMode:
                b = build_code_machine(h, k, mode, dual)
                res = run(b)
                assert res.accepted == oracle_code_sum(h, k, mode, dual).decision
                if res.accepted and b.step_bound:
                    assert column_sum_zero(h, solution_set(b, res))

    def test_step_bound_independent_of_n(self):
        rng = random.Random(5)
        bounds = {build_code_machine(random_matrix(rng, 3, 2, n), 2, MinDistance).step_bound
                  for n in range(2, 7)}
        assert bounds == {2 * 2 * 2 + 2}


# size of generated tables ---------------------------------------------------


def test_transition_tables_grow_polynomially():
    """Observed growth: the three-phase machines are Theta(n^2 k^2) (picks are
    strictly increasing, so a step can pick any larger vertex). The size
    regression is stated per builder against that polynomial."""
    for n in range(2, 9):
        g = cycle(n) if n > 2 else complete(2)
        for k in range(0, 4):
            size = len(build_sigma_rho(g, ZERO, POS, AtMost(k)).machine.transitions)
            assert size <= 8 * (n + 1) ** 2 * (k + 2) ** 2
            size = len(build_induced_r_regular(g, 1, k).machine.transitions)
            assert size <= 8 * (n + 1) ** 2 * (k + 2) ** 3
            h = FqMatrix(3, (tuple((i * i + 1) % 3 for i in range(n)),))
            size = len(build_code_machine(h, k, MinDistance).machine.transitions)
            assert size <= 8 * (n + 1) ** 2 * (k + 2) * (3 * k + 2)


# emitted files ---------------------------------------------------------------


@pytest.mark.parametrize("make", [
    lambda: build_sigma_rho(cycle(5), ZERO, POS, AtMost(2)),
    lambda: build_sigma_rho(complete(3), ALL, POS, AtLeastNMinusK(1)),
    lambda: build_digraph_kernel(Digraph(3, frozenset({(1, 2), (2, 3)})), 2),
    lambda: build_code_machine(FqMatrix(2, ((1, 1, 0),)), 2, MinDistance, True),
])
def test_emit_round_trip(make):
    b = make()
    back = load_instance(emit_instance(b))
    assert back.machine == b.machine and back.step_bound == b.step_bound
    assert back.decode == b.decode and back.complement == b.complement
    r1, r2 = run(b), run(back)
    assert r1 == r2
    if r1.accepted:
        assert solution_set(b, r1) == solution_set(back, r2)


def test_cardinality_mode_parsing():
    assert CardinalityMode.parse("at_least_n_minus_k", 2) == AtLeastNMinusK(2)
    with pytest.raises(ValueError):
        CardinalityMode.parse("most", 1)
    with pytest.raises(ValueError):
        AtMost(-1)
    assert ExactlyNMinusK(1).admits(3, 4) and not ExactlyNMinusK(1).admits(4, 4)


# property: dual verdict and the degree identity --------------------------------


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 5))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, frozenset(chosen))


specs = st.sampled_from(sorted(STANDARD_SPECS))


@settings(max_examples=80, deadline=None)
@given(small_graphs(), specs, specs, st.integers(0, 3), st.booleans())
def test_dual_builder_matches_oracle(g, s, r, k, exact):
    mode = ExactlyNMinusK(k) if exact else AtLeastNMinusK(k)
    sigma, rho = STANDARD_SPECS[s], STANDARD_SPECS[r]
    b = build_sigma_rho(g, sigma, rho, mode)
    assert run(b).accepted == oracle_sigma_rho(g, sigma, rho, mode).decision


@given(small_graphs(), st.data())
def test_outside_count_identity(g, data):
    d = frozenset(data.draw(st.sets(st.integers(1, g.n))))
    rest = frozenset(g.vertices) - d
    for v in g.vertices:
        assert len(g.adjacency[v] & rest) == g.degree(v) - len(g.adjacency[v] & d)
