import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindtm.model import (STANDARD_SPECS, Digraph, FqMatrix, Graph, IntSetSpec, ParseError,
                           check_property, degree, get_property, membership, parse_graph,
                           parse_matrix, parse_set_spec, register_property, serialize_graph,
                           serialize_matrix)

from helpers import complete, cycle

C5_TEXT = "graph 5\nedge 1 2\nedge 2 3\nedge 3 4\nedge 4 5\nedge 1 5"


class TestParseGraph:
    def test_k2(self):
        g = parse_graph("graph 2\nedge 1 2")
        assert g.n == 2 and g.edges == {(1, 2)}

    def test_c5(self):
        g = parse_graph(C5_TEXT)
        assert g == cycle(5)

    def test_out_of_range(self):
        with pytest.raises(ParseError) as exc:
            parse_graph("graph 3\nedge 1 4")
        assert exc.value.lineno == 2

    @pytest.mark.parametrize("text, line", [
        ("graph 3\nedge 1 2\nedge 2 1", 3),
        ("graph 3\nedge 2 2", 2),
        ("graph 3\nedge 1", 2),
        ("graph x", 1),
        ("graph 3\narc 1 2", 2),
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ParseError) as exc:
            parse_graph(text)
        assert exc.value.lineno == line

    def test_comments_and_digraph(self):
        d = parse_graph("# a digraph\ndigraph 3\narc 1 2  # first\narc 2 1\n")
        assert isinstance(d, Digraph) and d.arcs == {(1, 2), (2, 1)}

    def test_empty_input(self):
        with pytest.raises(ParseError):
            parse_graph("# nothing\n")


class TestMembership:
    def test_examples(self):
        assert membership(IntSetSpec.even(), 4)
        assert not membership(IntSetSpec.positive(), 0)
        co = IntSetSpec.cofinite(1)
        assert not membership(co, 1) and membership(co, 2)

    def test_beyond_bound_is_an_error(self):
        with pytest.raises(ValueError):
            membership(IntSetSpec.all(bound=3), 4)
        with pytest.raises(ValueError):
            membership(IntSetSpec.all(), -1)

    def test_geq_and_vector(self):
        assert [membership(IntSetSpec.geq(2), x) for x in range(4)] == [False, False, True, True]
        v = IntSetSpec.vector([0, 1, 1])
        assert v.bound == 2 and [x in v for x in range(3)] == [False, True, True]

    def test_parse_set_spec(self):
        assert parse_set_spec("finite:0") == IntSetSpec.finite(0)
        assert parse_set_spec("positive") == IntSetSpec.positive()
        assert parse_set_spec("cofinite:1,3") == IntSetSpec.cofinite(1, 3)
        assert parse_set_spec("geq:2") == IntSetSpec.geq(2)
        assert parse_set_spec("vector:101").characteristic(2) == (1, 0, 1)
        for bad in ("nope", "vector:12", "geq:", "finite:a"):
            with pytest.raises(ParseError):
                parse_set_spec(bad)


class TestDegreeAndProperties:
    def test_degree(self):
        assert degree(cycle(5), 1) == 2
        assert degree(Graph(1), 1) == 0
        assert degree(complete(2), 1) == 1
        with pytest.raises(ValueError):
            degree(Graph(2), 3)

    def test_properties(self):
        assert check_property("connected", complete(2))
        assert not check_property("connected", Graph(2))
        assert check_property("connected", Graph(0))
        assert check_property(get_property("r-regular(2)"), complete(3))
        assert not check_property("r-regular:1", complete(3))
        assert check_property("clique", complete(4)) and not check_property("clique", cycle(4))
        assert check_property("independent", Graph(3))

    def test_registry(self):
        with pytest.raises(KeyError):
            get_property("planar")
        with pytest.raises(KeyError):
            get_property("r-regular")
        register_property("has-edge", lambda g: bool(g.edges))
        assert check_property("has-edge", complete(2))

    def test_r_regular_by_enumeration(self):
        # every vertex of K3 has exactly two neighbours
        g = complete(3)
        assert all(sum(g.has_edge(v, u) for u in g.vertices if u != v) == 2 for v in g.vertices)
        assert check_property("r-regular(2)", g)


def test_standard_spec_partition():
    even, odd = STANDARD_SPECS["EVEN"], STANDARD_SPECS["ODD"]
    for x in range(0, 200):
        assert (x in even) != (x in odd)
        assert x in STANDARD_SPECS["N"]
    assert [x for x in range(50) if x not in STANDARD_SPECS["N+"]] == [0]


def test_matrix_parse_and_validation():
    h = parse_matrix("matrix 3 2 3\n1 2 0\n0 1 1\n")
    assert h.q == 3 and h.m == 2 and h.n == 3 and h.column(2) == (2, 1)
    assert parse_matrix(serialize_matrix(h)) == h
    for bad in ("matrix 4 1 1\n1", "matrix 2 1 2\n1 2", "matrix 2 2 1\n1", "matrix 2 1 2\n1"):
        with pytest.raises(ParseError):
            parse_matrix(bad)
    with pytest.raises(ValueError):
        FqMatrix(2, ((0, 2),))


# -- properties --------------------------------------------------------------

named_specs = st.sampled_from(["all", "positive", "even", "odd"])


@given(named_specs, st.integers(1, 40))
def test_vector_encoding_matches_named(kind, bound):
    named = IntSetSpec(kind, (), bound)
    vec = IntSetSpec.vector(named.characteristic(bound))
    assert all(membership(vec, x) == membership(named, x) for x in range(bound + 1))


@given(st.sampled_from(sorted(STANDARD_SPECS)), st.integers(0, 1024))
def test_membership_is_pure(name, x):
    s = STANDARD_SPECS[name]
    assert membership(s, x) == membership(s, x)


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, frozenset(chosen))


@st.composite
def digraphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    arcs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]
    chosen = draw(st.lists(st.sampled_from(arcs), unique=True)) if arcs else []
    return Digraph(n, frozenset(chosen))


@settings(max_examples=200)
@given(graphs())
def test_graph_round_trip(g):
    assert parse_graph(serialize_graph(g, ["generated"])) == g


@settings(max_examples=100)
@given(digraphs())
def test_digraph_round_trip(d):
    assert parse_graph(serialize_graph(d)) == d


@given(graphs())
def test_handshake(g):
    assert sum(degree(g, v) for v in g.vertices) == 2 * len(g.edges)
