"""Command-line entry point: ``scoop <subcommand> ...``.

Exit status is 0 on success, 2 for usage errors, 3 for invalid instances,
parameters or violated contracts, and 4 when a size cap is exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiment as exp
from .encodings import PROBLEMS, TWINS, build_hamiltonian, resolve_penalties
from .errors import CapacityError, ScoopError
from .instances import (
    parse_instance,
    random_connected_graph,
    random_regular_graph,
    random_set_cover,
    serialize_instance,
)
from .metrics import compute_metrics, constrained_diagonal, report_dict
from .oracles import brute_force_polynomial, exact_constrained
from .pbpoly import binary_to_ising, dump_terms, locality_stats
from .postprocess import enhancer_for, postprocess_distribution
from .qaoa import OptimizerConfig, expectation, optimize, precompute_diagonal, probabilities, run_circuit

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_CAPACITY = 0, 2, 3, 4


def _read_instance(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise _Usage(f"cannot read instance: {exc}") from exc
    return parse_instance(data)


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        from .errors import ParseError

        raise ParseError(f"{path}: malformed JSON: {exc}") from exc


class _Usage(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _hamiltonian_for(args, inst):
    pc = resolve_penalties(args.problem, inst, args.A, args.B, args.C)
    poly, _ = build_hamiltonian(args.problem, inst, pc)
    return poly


def _load_distribution(path: str, n_vars: int):
    from .errors import ParseError

    rec = _read_json(path)
    try:
        entries = rec["distribution"] if isinstance(rec, dict) else rec
        return rec if isinstance(rec, dict) else {}, exp.distribution_from_entries(entries, n_vars)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: not a distribution record: {exc!r}") from exc


# -- subcommands ------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.kind == "regular":
        inst = random_regular_graph(args.n, args.d, args.seed)
    elif args.kind == "connected":
        inst = random_connected_graph(args.n, args.edge_prob, args.seed)
    else:
        inst = random_set_cover(args.n, args.subsets, args.seed, args.density)
    sys.stdout.write(serialize_instance(inst).decode())
    return EXIT_OK


def cmd_hamiltonian(args) -> int:
    inst = _read_instance(args.instance)
    poly = _hamiltonian_for(args, inst)
    target = binary_to_ising(poly) if args.ising else poly
    stats = locality_stats(target)
    sys.stdout.write(dump_terms(target))
    print(f"# max_degree {stats.max_degree}")
    print(f"# term_count {stats.term_count}")
    for deg, count in sorted(stats.per_degree_counts.items()):
        print(f"# degree {deg}: {count}")
    return EXIT_OK


def cmd_exact(args) -> int:
    inst = _read_instance(args.instance)
    if args.problem in TWINS:
        rec = brute_force_polynomial(_hamiltonian_for(args, inst))
    else:
        rec = exact_constrained(args.problem, inst)
    _emit(rec.to_json())
    return EXIT_OK


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(
        steps=args.steps,
        learning_rate=args.learning_rate,
        decay=args.decay,
        epsilon=args.epsilon,
        init_seed=args.seed,
        gradient_step=args.gradient_step,
    )


def cmd_qaoa(args) -> int:
    inst = _read_instance(args.instance)
    dc = precompute_diagonal(_hamiltonian_for(args, inst))
    cfg = _optimizer_config(args)
    # seeds are tried in order; the lowest final expectation wins
    best = None
    for s in range(args.seed, args.seed + args.restarts):
        res = optimize(dc, args.p, replace(cfg, init_seed=s))
        val = expectation(run_circuit(dc, res.params), dc)
        if best is None or val < best[0]:
            best = (val, s, res)
    val, seed, res = best
    dist = probabilities(run_circuit(dc, res.params))
    exp.audit_normalized(dist, "qaoa")
    iid = args.instance_id or Path(args.instance).stem
    _emit(exp.result_record(iid, args.problem, args.p, seed, res.params, val, res.trace, dist, args.top))
    return EXIT_OK


def cmd_postprocess(args) -> int:
    if args.problem not in TWINS:
        raise _Usage(f"post-processing is defined for profit twins only: {', '.join(TWINS)}")
    inst = _read_instance(args.instance)
    poly = _hamiltonian_for(args, inst)
    rec, dist = _load_distribution(args.distribution, poly.num_vars)
    exp.audit_normalized(dist, "input distribution")
    pp = postprocess_distribution(dist, enhancer_for(args.problem, inst))
    exp.audit_normalized(pp, "post-processed distribution")
    exp.audit_feasible(pp, constrained_diagonal(args.problem, inst), "post-processed distribution")
    out = dict(rec)
    out.update(
        problem=args.problem,
        expectation=float(np.dot(pp, precompute_diagonal(poly).costs)),
        postprocessed=True,
        distribution=exp.distribution_entries(pp),
    )
    out.setdefault("instance_id", Path(args.instance).stem)
    _emit(out)
    return EXIT_OK


def cmd_metrics(args) -> int:
    inst = _read_instance(args.instance)
    poly = _hamiltonian_for(args, inst)
    dc = precompute_diagonal(poly)
    rec, dist = _load_distribution(args.distribution, poly.num_vars)
    exp.audit_normalized(dist, "distribution")
    optimum = brute_force_polynomial(poly)
    postprocessed = args.postprocessed or bool(rec.get("postprocessed"))
    if postprocessed:
        if args.problem not in TWINS:
            raise _Usage("--postprocessed needs a profit twin")
        cdc = constrained_diagonal(args.problem, inst)
        exp.audit_feasible(dist, cdc, "distribution")
        report = compute_metrics(dist, dc, optimum.best_value, exact_constrained(args.problem, inst).value_ladder, rank_dc=cdc)
    else:
        report = compute_metrics(dist, dc, optimum.best_value, optimum.value_ladder)
    _emit({**report_dict(report), "postprocessed": postprocessed})
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = exp.load_config(args.config)
    if args.output:
        cfg = replace(cfg, output_dir=args.output)
    result = exp.run_experiment(cfg)
    for prob, pr in result.problems.items():
        rows = exp.aggregate_rows(pr) if args.aggregate else pr.rows
        cols = exp.AGGREGATE_COLUMNS if args.aggregate else exp.CSV_COLUMNS
        sys.stdout.write(exp.to_csv(rows, cols))
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _add_problem(sp, penalties=True):
    sp.add_argument("--problem", required=True, choices=PROBLEMS)
    sp.add_argument("--instance", required=True, help="instance JSON file")
    if penalties:
        for name in ("A", "B", "C"):
            sp.add_argument(f"--{name}", type=float, default=None, help=f"penalty weight {name} (baselines only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scoop", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="random instance as canonical JSON")
    sp.add_argument("--kind", choices=("regular", "connected", "setcover"), default="regular")
    sp.add_argument("--n", type=int, required=True, help="vertices, or universe size for set cover")
    sp.add_argument("--d", type=int, default=3, help="degree for regular graphs")
    sp.add_argument("--edge-prob", type=float, default=0.5)
    sp.add_argument("--subsets", type=int, default=5)
    sp.add_argument("--density", type=float, default=0.4)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("hamiltonian", help="dump the cost polynomial and its locality")
    _add_problem(sp)
    sp.add_argument("--ising", action="store_true", help="dump the spin form instead")
    sp.set_defaults(func=cmd_hamiltonian)

    sp = sub.add_parser("exact", help="brute-force optimum as JSON")
    _add_problem(sp)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("qaoa", help="optimize a QAOA circuit and print the result record")
    _add_problem(sp)
    sp.add_argument("--p", type=int, default=1, help="layers")
    sp.add_argument("--seed", type=int, default=0, help="first initialization seed")
    sp.add_argument("--restarts", type=int, default=1, help="consecutive seeds to try")
    defaults = OptimizerConfig()
    sp.add_argument("--steps", type=int, default=defaults.steps)
    sp.add_argument("--learning-rate", type=float, default=defaults.learning_rate)
    sp.add_argument("--decay", type=float, default=defaults.decay)
    sp.add_argument("--epsilon", type=float, default=defaults.epsilon)
    sp.add_argument("--gradient-step", type=float, default=defaults.gradient_step)
    sp.add_argument("--top", type=int, default=0, help="keep only the most likely entries (0 keeps all)")
    sp.add_argument("--instance-id", default=None)
    sp.set_defaults(func=cmd_qaoa)

    sp = sub.add_parser("postprocess", help="enhance a distribution onto feasible solutions")
    _add_problem(sp, penalties=False)
    sp.add_argument("--distribution", required=True, help="result record or entry list ('-' for stdin)")
    sp.set_defaults(func=cmd_postprocess, A=None, B=None, C=None)

    sp = sub.add_parser("metrics", help="top-k probabilities and approximation ratio of a distribution")
    _add_problem(sp)
    sp.add_argument("--distribution", required=True, help="result record or entry list ('-' for stdin)")
    sp.add_argument("--postprocessed", action="store_true", help="rank against the constrained optimum")
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("sweep", help="run an experiment config and print its CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--output", default=None, help="output directory (overrides the config)")
    sp.add_argument("--aggregate", action="store_true", help="print aggregate rows instead of per-run rows")
    sp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"scoop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"scoop: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ScoopError as exc:
        print(f"scoop: invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
