"""Command-line front end.

Exit status: 0 when the run completed (YES or NO alike), 1 when a verify
campaign found a disagreement, 2 for usage and parse errors, 3 when a
resource guard stopped the run.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from collections import Counter
from pathlib import Path

from . import _backend
from .builders import CardinalityMode, CodeMode, emit_instance, load_instance
from .circuit import (NotNormalizedError, ResourceGuardError, analyze, compile_machine,
                      serialize_circuit, weighted_sat_brute, weighted_sat_search)
from .engines import ENGINES, PROBLEMS, Request, UnsupportedRequest, build, solve
from .generators import random_digraph, random_graph, random_matrix
from .machine import normalize_for_exact
from .model import (STANDARD_SPECS, Graph, ParseError, get_property, parse_graph,
                    parse_matrix, parse_set_spec)
from .oracles import OracleGuardError
from .reductions import reduce_is_to_sss, verify_reduction

log = logging.getLogger("blindtm")

USAGE, GUARD, DISAGREE = 2, 3, 1
CARDS = ("at-most", "at-least-n-minus-k", "exactly", "exactly-n-minus-k")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _fmt_set(s) -> str:
    return "{" + ", ".join(map(str, sorted(s))) + "}"


def _request(a: argparse.Namespace) -> Request:
    if a.problem == "code":
        if not a.matrix:
            raise UsageError("--matrix is required for the code problem")
        inst = parse_matrix(_read(a.matrix))
    else:
        if not a.graph:
            raise UsageError("--graph is required")
        inst = parse_graph(_read(a.graph))
    if a.k is None:
        raise UsageError("--k is required")
    sigma = parse_set_spec(a.sigma) if a.sigma else None
    rho = parse_set_spec(a.rho) if a.rho else None
    try:
        prop = get_property(a.property) if a.property else None
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    return Request(
        a.problem, inst, a.k, sigma=sigma, rho=rho,
        card=CardinalityMode.parse(a.card, a.k), r=a.r, prop=prop,
        code_mode=CodeMode.parse(a.mode) if a.mode else None, dual=a.dual)


def _problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True, choices=PROBLEMS)
    p.add_argument("--graph", help="graph or digraph file")
    p.add_argument("--matrix", help="matrix file (code problem)")
    p.add_argument("--k", type=int)
    p.add_argument("--sigma", help="set spec, e.g. finite:0")
    p.add_argument("--rho", help="set spec, e.g. positive")
    p.add_argument("--card", default="at-most", choices=CARDS)
    p.add_argument("--r", type=int, help="degree for r-regular")
    p.add_argument("--property", help="graph property for p-rho, e.g. connected")
    p.add_argument("--mode", choices=[m.value for m in CodeMode])
    p.add_argument("--dual", action="store_true", help="dual code parameterization")


# --------------------------------------------------------------------------
# subcommands


def cmd_solve(a) -> int:
    req = _request(a)
    v = solve(req, a.engine, solver=a.circuit_solver, node_limit=a.node_limit,
              backend=a.backend)
    print("YES" if v.decision else "NO")
    if a.witness and v.decision:
        print(_fmt_set(v.witness))
    if a.trace and v.trace:
        for line in v.trace:
            print(line)
    return 0


def cmd_build_machine(a) -> int:
    req = _request(a)
    b = build(req)
    text = emit_instance(b)
    if a.normalize:
        norm = normalize_for_exact(b.machine, a.k)
        b = type(b)(norm, b.step_bound + 2, b.problem, b.decode_tape, b.decode, b.universe,
                    b.complement)
        text = emit_instance(b)
    Path(a.out).write_text(text, encoding="utf-8")
    m = b.machine
    print(f"wrote {a.out}: tapes={m.tapes} states={len(m.states)} "
          f"transitions={len(m.transitions)} step-bound={b.step_bound}", file=sys.stderr)
    return 0


def cmd_compile_circuit(a) -> int:
    b = load_instance(_read(a.machine))
    m = b.machine
    if a.normalize:
        m = normalize_for_exact(m)
    k = a.k if a.k is not None else b.step_bound + (2 if a.normalize else 0)
    if k < 1:
        raise UsageError("--k must be at least 1")
    c = compile_machine(m, a.word.split() if a.word else (), k)
    if a.out:
        Path(a.out).write_text(serialize_circuit(c), encoding="utf-8")
    print(analyze(c))
    if a.sat:
        hit = (weighted_sat_brute(c, k) if a.circuit_solver == "brute"
               else weighted_sat_search(c, k, node_limit=a.node_limit))
        print("sat=" + ("yes" if hit is not None else "no"))
    return 0


def cmd_reduce(a) -> int:
    g = parse_graph(_read(a.graph))
    if not isinstance(g, Graph):
        raise UsageError("the reduction takes an undirected graph")
    red = reduce_is_to_sss(g, a.k or 0)
    text = red.serialize()
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"n={red.g_prime.n} edges={len(red.g_prime.edges)}", file=sys.stderr)
    return 0


# verify campaigns ----------------------------------------------------------


def _trial(problem: str, rng: random.Random, max_n: int, max_k: int, circuit: bool):
    """One random instance: returns (tm verdict, oracle verdict, circuit verdict or None)."""
    n = rng.randint(1, max_n)
    k = rng.randint(0, max_k)
    if problem in ("sigma-rho", "dual"):
        g = random_graph(rng, n)
        names = sorted(STANDARD_SPECS)
        sigma, rho = STANDARD_SPECS[rng.choice(names)], STANDARD_SPECS[rng.choice(names)]
        kinds = CARDS[1::2] if problem == "dual" else CARDS
        req = Request("sigma-rho", g, k, sigma, rho, CardinalityMode(rng.choice(kinds), k))
    elif problem == "kernel":
        req = Request("kernel", random_digraph(rng, n), k)
    elif problem == "r-regular":
        req = Request("r-regular", random_graph(rng, n), k, r=rng.randint(0, max(k - 1, 0)))
    elif problem == "p-rho":
        prop = rng.choice(["always-true", "connected", "clique", "independent"])
        req = Request("p-rho", random_graph(rng, n), k, rho=STANDARD_SPECS[
            rng.choice(sorted(STANDARD_SPECS))], prop=get_property(prop))
    elif problem == "code":
        q = rng.choice([2, 3, 5])
        h = random_matrix(rng, q, rng.randint(1, 3), n)
        req = Request("code", h, k, code_mode=rng.choice(list(CodeMode)),
                      dual=rng.random() < 0.5)
    else:
        g = random_graph(rng, n)
        return verify_reduction(g, k), True, None
    tm = solve(req, "tm").decision
    orc = solve(req, "oracle").decision
    circ = None
    if circuit and problem != "p-rho" and n <= 4 and k <= 2:
        circ = solve(req, "circuit").decision
    return tm, orc, circ


VERIFY_PROBLEMS = ("sigma-rho", "dual", "kernel", "r-regular", "p-rho", "code", "reduction")


def cmd_verify(a) -> int:
    problems = VERIFY_PROBLEMS if a.problem == "all" else (a.problem,)
    ok_all = True
    for problem in problems:
        rng = random.Random(f"{a.seed}:{problem}")
        tally = Counter()
        for _ in range(a.trials):
            tm, orc, circ = _trial(problem, rng, a.max_n, a.max_k, a.circuit)
            tally["agree" if tm == orc else "disagree"] += 1
            if circ is not None:
                tally["circuit-checked"] += 1
                tally["circuit-agree"] += circ == orc
        line = f"{problem}: {tally['agree']}/{a.trials} agree"
        if a.circuit:
            line += f", circuit {tally['circuit-agree']}/{tally['circuit-checked']}"
        print(line)
        ok_all &= tally["agree"] == a.trials and tally["circuit-agree"] == tally["circuit-checked"]
    return 0 if ok_all else DISAGREE


# --------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blindtm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--backend", choices=("auto", "compiled", "python"), default=None,
                   help="kernel implementation (default: compiled when built)")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="decide an instance")
    _problem_args(s)
    s.add_argument("--engine", default="tm", choices=ENGINES)
    s.add_argument("--witness", action="store_true")
    s.add_argument("--trace", action="store_true")
    s.add_argument("--circuit-solver", default="search", choices=("search", "brute"))
    s.add_argument("--node-limit", type=int, default=None)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("build-machine", help="emit the builder's machine file")
    _problem_args(b)
    b.add_argument("--out", required=True)
    b.add_argument("--normalize", action="store_true",
                   help="emit the exact-length normalization instead")
    b.set_defaults(func=cmd_build_machine)

    c = sub.add_parser("compile-circuit", help="compile a normalized machine file")
    c.add_argument("--machine", required=True)
    c.add_argument("--word", default="", help="space-separated input symbols")
    c.add_argument("--k", type=int, help="exact step count (default: file's step bound)")
    c.add_argument("--out")
    c.add_argument("--normalize", action="store_true", help="normalize before compiling")
    c.add_argument("--sat", action="store_true", help="also decide weighted satisfiability")
    c.add_argument("--circuit-solver", default="search", choices=("search", "brute"))
    c.add_argument("--node-limit", type=int, default=5_000_000)
    c.set_defaults(func=cmd_compile_circuit)

    v = sub.add_parser("verify", help="engine-versus-oracle campaign")
    v.add_argument("--problem", default="all", choices=VERIFY_PROBLEMS + ("all",))
    v.add_argument("--max-n", type=int, default=6)
    v.add_argument("--max-k", type=int, default=3)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--circuit", action="store_true",
                   help="also run the circuit engine on instances with n <= 4, k <= 2")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="instance transformations")
    r.add_argument("kind", choices=("is-to-sss",))
    r.add_argument("--graph", required=True)
    r.add_argument("--out")
    r.add_argument("--k", type=int)
    r.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if a.backend:
        try:
            _backend.get(a.backend)
        except RuntimeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return USAGE
        os.environ["BLINDTM_BACKEND"] = a.backend
        a.backend = None
    try:
        return a.func(a)
    except (OracleGuardError, ResourceGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return GUARD
    except (UsageError, ParseError, UnsupportedRequest, NotNormalizedError, ValueError,
            KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
