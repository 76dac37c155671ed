"""One request, three ways to decide it: machine search, circuit
satisfiability, brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass

from .builders import (AtMost, BuiltInstance, CardinalityMode, CodeMode, build_code_machine,
                       build_digraph_kernel, build_induced_r_regular, build_sigma_rho,
                       decide_p_rho, solution_set)
from .circuit import compile_machine, decode_assignment, weighted_sat_brute, weighted_sat_search
from .machine import RunResult, normalize_for_exact, replay, search_accepting
from .model import Digraph, FqMatrix, Graph, GraphProperty, IntSetSpec
from .oracles import (oracle_code_sum, oracle_kernel, oracle_p_rho, oracle_r_regular,
                      oracle_sigma_rho)

PROBLEMS = ("sigma-rho", "p-rho", "kernel", "r-regular", "code")
ENGINES = ("tm", "circuit", "oracle")


class UnsupportedRequest(ValueError):
    pass


@dataclass(frozen=True)
class Request:
    problem: str
    instance: Graph | Digraph | FqMatrix
    k: int
    sigma: IntSetSpec | None = None
    rho: IntSetSpec | None = None
    card: CardinalityMode | None = None
    r: int | None = None
    prop: GraphProperty | None = None
    code_mode: CodeMode | None = None
    dual: bool = False

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise UnsupportedRequest(f"unknown problem {self.problem!r}")
        wants = {"kernel": Digraph, "code": FqMatrix}.get(self.problem, Graph)
        if not isinstance(self.instance, wants):
            raise UnsupportedRequest(f"{self.problem} needs a {wants.__name__} instance")
        if self.problem == "sigma-rho" and (self.sigma is None or self.rho is None):
            raise UnsupportedRequest("sigma-rho needs --sigma and --rho")
        if self.problem == "p-rho" and (self.rho is None or self.prop is None):
            raise UnsupportedRequest("p-rho needs --rho and --property")
        if self.problem == "r-regular" and self.r is None:
            raise UnsupportedRequest("r-regular needs --r")
        if self.problem == "code" and self.code_mode is None:
            raise UnsupportedRequest("code needs --mode")

    @property
    def cardinality(self) -> CardinalityMode:
        return self.card or AtMost(self.k)


@dataclass(frozen=True)
class Verdict:
    decision: bool
    witness: frozenset[int] | None = None
    trace: tuple[str, ...] = ()


def build(req: Request) -> BuiltInstance:
    if req.problem == "sigma-rho":
        return build_sigma_rho(req.instance, req.sigma, req.rho, req.cardinality)
    if req.problem == "p-rho":
        return build_sigma_rho(req.instance, IntSetSpec.all(), req.rho, AtMost(req.k))
    if req.problem == "kernel":
        return build_digraph_kernel(req.instance, req.k)
    if req.problem == "r-regular":
        return build_induced_r_regular(req.instance, req.r, req.k)
    return build_code_machine(req.instance, req.k, req.code_mode, req.dual)


def _verdict(b: BuiltInstance, r: RunResult, machine=None) -> Verdict:
    if not r.accepted:
        return Verdict(False)
    m = machine or b.machine
    return Verdict(True, solution_set(b, r), tuple(m.describe(j) for j in r.witness))


def solve_tm(req: Request, backend: str | None = None) -> Verdict:
    if req.problem == "p-rho":
        d = decide_p_rho(req.instance, req.prop, req.rho, req.k)
        return Verdict(d.decision, d.witness)
    b = build(req)
    return _verdict(b, search_accepting(b.machine, (), b.step_bound, backend=backend))


def solve_circuit(req: Request, solver: str = "search", node_limit: int | None = None,
                  backend: str | None = None) -> Verdict:
    if req.problem == "p-rho":
        raise UnsupportedRequest("p-rho enumerates runs; the circuit engine cannot")
    b = build(req)
    norm = normalize_for_exact(b.machine, b.step_bound)
    steps = b.step_bound + 2
    c = compile_machine(norm, (), steps)
    if solver == "brute":
        hit = weighted_sat_brute(c, steps, backend=backend)
    else:
        kw = {} if node_limit is None else {"node_limit": node_limit}
        hit = weighted_sat_search(c, steps, backend=backend, **kw)
    if hit is None:
        return Verdict(False)
    run = decode_assignment(c, hit)
    final = replay(norm, run)
    return _verdict(b, RunResult(True, len(run), tuple(run), final), norm)


def solve_oracle(req: Request) -> Verdict:
    g = req.instance
    if req.problem == "sigma-rho":
        bound = g.max_degree()
        if min(req.sigma.bound, req.rho.bound) < bound:
            raise UnsupportedRequest("set bounds must cover the maximum degree")
        v = oracle_sigma_rho(g, req.sigma, req.rho, req.cardinality, cap=1)
    elif req.problem == "p-rho":
        v = oracle_p_rho(g, req.prop, req.rho, req.k, cap=1)
    elif req.problem == "kernel":
        v = oracle_kernel(g, req.k, cap=1)
    elif req.problem == "r-regular":
        v = oracle_r_regular(g, req.r, req.k, cap=1)
    else:
        v = oracle_code_sum(g, req.k, req.code_mode, req.dual, cap=1)
    return Verdict(v.decision, v.witnesses[0] if v.witnesses else None)


def solve(req: Request, engine: str = "tm", **kw) -> Verdict:
    if engine == "tm":
        return solve_tm(req, kw.get("backend"))
    if engine == "circuit":
        return solve_circuit(req, kw.get("solver", "search"), kw.get("node_limit"),
                             kw.get("backend"))
    if engine == "oracle":
        return solve_oracle(req)
    raise UnsupportedRequest(f"unknown engine {engine!r}")
