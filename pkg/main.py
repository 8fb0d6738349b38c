import argparse
import sys

from dotenv import load_dotenv

from matcher.config import CorpusConfig, SolverConfig
from matcher.errors import InternalConsistencyError, ResourceLimitError
from matcher.matching import MatchingKind, classify, find_alternating_cycle
from matcher.reductions import (
    assignment_to_matching_t1,
    assignment_to_matching_t2,
    build,
    matching_to_assignment_t1,
    matching_to_assignment_t2,
    roles_to_json,
)
from matcher.sat import brute_force_sat, brute_force_xsat, normalize_xsat
from matcher.solvers import max_matching_number, solve_all
from matcher.utils.io import (
    read_assignment,
    read_cnf,
    read_graph,
    read_matching,
    write_assignment,
    write_cnf,
    write_graph,
    write_matching,
)
from matcher.utils.json_stuff import load_json, save_as_json, to_json_line
from matcher.verify import run_corpus

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_ARGUMENT = 2
EXIT_RESOURCE_LIMIT = 3


def _edges_text(matching) -> str:
    return " ".join(f"{u + 1}-{v + 1}" for u, v in matching) or "(empty)"


def _solver_config(args) -> SolverConfig:
    config = SolverConfig(debug=getattr(args, "debug", False))
    if getattr(args, "limit", None) is not None:
        config.vertex_limit = args.limit
    return config


def cmd_classify(args) -> int:
    g = read_graph(args.graph)
    m = read_matching(args.matching, g)
    kinds = classify(g, m)
    if not kinds:
        print("not a matching of the graph")
        return EXIT_INVALID_ARGUMENT
    print("kinds: " + " ".join(kind.code for kind in sorted(kinds, reverse=True)))
    if MatchingKind.UNIQUELY_RESTRICTED not in kinds:
        cycle = find_alternating_cycle(g, m)
        print("alternating cycle: " + " ".join(str(v + 1) for v in cycle))
    return EXIT_OK


def cmd_solve(args) -> int:
    g = read_graph(args.graph)
    config = _solver_config(args)
    if args.all:
        results = solve_all(g, config)
    else:
        kind = MatchingKind.from_code(args.kind)
        results = {kind: max_matching_number(g, kind, config)}
    for kind, result in results.items():
        print(f"{kind.code} = {result.value}    witness: {_edges_text(result.witness)}")
    return EXIT_OK


def cmd_normalize_xsat(args) -> int:
    f = read_cnf(args.input)
    result = normalize_xsat(f, strict=not args.relaxed)
    if args.map:
        save_as_json({
            "unsatisfiable": result.unsatisfiable,
            "source_variable_count": result.source_variable_count,
            "fixed": {str(var): value for var, value in sorted(result.fixed.items())},
            "variables": {
                str(var): {key: value for key, value in vars(origin).items() if value is not None}
                for var, origin in sorted(result.origins.items())
            },
        }, args.map)
    if result.unsatisfiable:
        print("unsatisfiable: propagation of repeated literals reached a contradiction")
        return EXIT_OK
    write_cnf(result.formula, args.output, comments=(f"normalised from {args.input}",))
    print(f"normalised: {f.variable_count} vars, {f.m} clauses -> "
          f"{result.formula.variable_count} vars, {result.formula.m} clauses")
    return EXIT_OK


def cmd_oracle(args) -> int:
    f = read_cnf(args.input)
    limit = args.limit if args.limit is not None else SolverConfig().oracle_limit
    oracle = brute_force_sat if args.mode == "sat" else brute_force_xsat
    witness = oracle(f, limit)
    if witness is None:
        print("s UNSATISFIABLE")
        return EXIT_OK
    print("s SATISFIABLE")
    print("v " + " ".join(str(v if witness.value(v) else -v) for v in range(1, f.variable_count + 1)) + " 0")
    if args.output:
        write_assignment(witness, args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    rg = build(read_cnf(args.input), args.which)
    write_graph(rg.graph, args.output)
    if args.roles:
        save_as_json(roles_to_json(rg), args.roles)
    print(f"{args.which}: {rg.graph.vertex_count} vertices, {rg.graph.edge_count} edges")
    return EXIT_OK


def cmd_witness(args) -> int:
    rg = build(read_cnf(args.input), args.which)
    if args.dir == "a2m":
        if not args.assignment:
            raise ValueError("--assignment is required for a2m")
        convert = assignment_to_matching_t1 if args.which == "t1" else assignment_to_matching_t2
        matching = convert(rg, read_assignment(args.assignment))
        write_matching(matching, args.output)
        print(f"matching of size {len(matching)}: {_edges_text(matching)}")
    else:
        if not args.matching:
            raise ValueError("--matching is required for m2a")
        convert = matching_to_assignment_t1 if args.which == "t1" else matching_to_assignment_t2
        assignment = convert(rg, read_matching(args.matching, rg.graph))
        write_assignment(assignment, args.output)
        print("assignment: " + " ".join(str(assignment.value(v)) for v in range(1, rg.n + 1)))
    return EXIT_OK


def cmd_verify(args) -> int:
    overrides = {"which": args.which}
    if args.exhaustive:
        overrides.update(mode="exhaustive", n_max=args.exhaustive[0], m_max=args.exhaustive[1])
    elif args.random:
        overrides.update(mode="random", count=args.random[0], seed=args.random[1])
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.output_dir:
        overrides["output_dir"] = args.output_dir
    if args.json:
        overrides["json_output"] = True

    if args.config:
        base = load_json(args.config)
        if args.which == "all":
            overrides.pop("which")
        config = CorpusConfig(**{**base, **overrides})
    else:
        config = CorpusConfig(**overrides)

    result = run_corpus(config)
    if config.json_output:
        for report in result.reports:
            print(to_json_line(report.model_dump()))
    else:
        print(result.summary().to_string(index=False))
    return EXIT_OK if result.passed else EXIT_VERIFICATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Restricted matchings: classify, solve exactly, reduce from SAT, verify")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Print every kind a matching satisfies")
    p.add_argument("--graph", required=True)
    p.add_argument("--matching", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="Exact matching numbers with witnesses")
    p.add_argument("--graph", required=True)
    p.add_argument("--kind", choices=["nu", "ur", "ac", "s"], default="nu")
    p.add_argument("--all", action="store_true")
    p.add_argument("--limit", type=int, default=None, help="Vertex cap for the exact search")
    p.add_argument("--debug", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("normalize-xsat", help="Normalise a positive exact-3-SAT instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--map", default=None)
    p.add_argument("--relaxed", action="store_true", help="Accept variables occurring fewer than three times")
    p.set_defaults(func=cmd_normalize_xsat)

    p = sub.add_parser("oracle", help="Brute-force SAT or exact-SAT")
    p.add_argument("--mode", choices=["sat", "xsat"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", default=None)
    p.add_argument("--limit", type=int, default=None, help="Variable cap for the enumeration")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("reduce", help="Build the gadget graph of a formula")
    p.add_argument("--which", choices=["t1", "t2"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--roles", default=None)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("witness", help="Convert between assignments and matchings of a gadget graph")
    p.add_argument("--dir", choices=["a2m", "m2a"], required=True)
    p.add_argument("--which", choices=["t1", "t2"], required=True)
    p.add_argument("--in", dest="input", required=True, help="The formula the gadget graph was built from")
    p.add_argument("--assignment", default=None)
    p.add_argument("--matching", default=None)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", help="Check the reduction guarantees on a corpus")
    p.add_argument("--which", choices=["lemma1", "thm1", "lemma4", "thm2", "all"], default="all")
    corpus = p.add_mutually_exclusive_group()
    corpus.add_argument("--exhaustive", nargs=2, type=int, metavar=("N", "M"))
    corpus.add_argument("--random", nargs=2, type=int, metavar=("COUNT", "SEED"))
    p.add_argument("--config", default=None, help="Corpus configuration JSON")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as e:
        print(f"resource limit: {e}", file=sys.stderr, flush=True)
        return EXIT_RESOURCE_LIMIT
    except (ValueError, FileNotFoundError) as e:
        print(f"invalid argument: {e}", file=sys.stderr, flush=True)
        return EXIT_INVALID_ARGUMENT
    except InternalConsistencyError as e:
        print(f"internal consistency error: {e}", file=sys.stderr, flush=True)
        return EXIT_VERIFICATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
