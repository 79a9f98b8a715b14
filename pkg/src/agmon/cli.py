"""Command-line front end.

Exit codes: 0 success (all requested bounds hold), 1 bound violation,
2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import report
from .bounds import verify_refined, verify_theorem
from .errors import AgmonError, EmptyAllowedRegion, InputError, NoForbiddenRegion, NumericalError
from .experiments import check_level_recurrence, compare_decay_rates, run_tree_experiment, tree_potential
from .graph import (
    gen_cycle,
    gen_grid,
    gen_path,
    gen_random_connected,
    gen_tree_hub,
    load_edge_list,
    load_graph,
    save_graph,
)
from .metric import agmon_distance, fmt_distance
from .spectral import assemble, eig_all, eig_smallest
from .stochastic import verify_walk_bound, vacuous_walk_report, walk_bound

log = logging.getLogger("agmon")

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _load(args):
    if getattr(args, "potential_file", None):
        return load_edge_list(args.graph, args.potential_file)
    return load_graph(args.graph)


def _check_paths(args) -> None:
    out = getattr(args, "output", None)
    if out is None:
        return
    for name in ("graph", "pairs", "potential_file"):
        src = getattr(args, name, None)
        if src is not None and Path(src).resolve() == Path(out).resolve():
            raise InputError(f"output path {out} is the same as input --{name}")


def _emit(doc: dict, rows: list[dict], args, columns=None) -> None:
    if args.format == "csv":
        text = report.to_csv(rows, columns)
    else:
        text = json.dumps(doc, indent=1) + "\n"
    if args.output is None:
        sys.stdout.write(text)
    elif args.format == "csv":
        report.write_csv(rows, args.output, columns)
    else:
        report.write_json(doc, args.output)


def _solve(h, args, count=None):
    method = getattr(args, "method", "ql")
    if method == "lanczos":
        return eig_smallest(h, count or h.n, tol=args.tol_eig, seed=args.seed)
    pairs = eig_all(h, tol=args.tol_eig, method=method)
    return pairs if count is None else pairs[:count]


def _pair(args, graph, potential, h):
    """The eigenpair selected by ``--pairs``/``--index`` (solving if needed)."""
    if getattr(args, "pairs", None):
        doc = json.loads(Path(args.pairs).read_text())
        pairs = report.pairs_from_document(doc)
        if args.index not in pairs:
            raise InputError(f"no eigenpair with index {args.index} in {args.pairs}")
        pair = pairs[args.index]
        if pair.eigenvector.shape != (graph.n,):
            raise InputError(f"eigenvector has {pair.eigenvector.size} entries, graph has {graph.n} vertices")
        return pair
    if not 0 <= args.index < graph.n:
        raise InputError(f"pair index {args.index} outside 0..{graph.n - 1}")
    return _solve(h, args, count=args.index + 1)[args.index]


# commands -------------------------------------------------------------------

_GEN_REQUIRED = {
    "path": ("n",),
    "cycle": ("n",),
    "grid": ("rows", "cols"),
    "tree-hub": ("q", "k"),
    "random": ("n", "p"),
}


def cmd_gen(args) -> int:
    missing = [f"--{name}" for name in _GEN_REQUIRED[args.family] if getattr(args, name) is None]
    if missing:
        raise InputError(f"family {args.family} needs {', '.join(missing)}")
    hub = None
    if args.family == "path":
        graph = gen_path(args.n)
    elif args.family == "cycle":
        graph = gen_cycle(args.n)
    elif args.family == "grid":
        graph = gen_grid(args.rows, args.cols)
    elif args.family == "tree-hub":
        graph, hub = gen_tree_hub(args.q, args.k)
    else:
        graph = gen_random_connected(args.n, args.p, args.seed)
    if args.potential is not None:
        potential = args.potential
    elif args.w_mag is not None:
        if hub is None:
            raise InputError("--w-mag only applies to the tree-hub family")
        potential = tree_potential(graph.n, hub, args.w_mag)
    else:
        potential = np.zeros(graph.n)
    save_graph(graph, potential, args.output)
    log.info("wrote %s: n=%d, m=%d%s", args.output, graph.n, graph.n_edges, "" if hub is None else f", hub={hub}")
    return EXIT_OK


def cmd_solve(args) -> int:
    graph, potential = _load(args)
    h = assemble(graph, potential)
    tol = args.tol_eig if args.tol_eig is not None else h.default_tol()
    pairs = _solve(h, args, count=args.count)
    doc = report.pairs_document(pairs, tol, args.method)
    if args.output is None:
        sys.stdout.write(json.dumps(doc, indent=1) + "\n")
    else:
        report.write_json(doc, args.output)
    return EXIT_OK


def cmd_agmon(args) -> int:
    graph, potential = _load(args)
    if args.energy is not None:
        energy = args.energy
    else:
        energy = _pair(args, graph, potential, assemble(graph, potential)).eigenvalue
    empty = False
    try:
        agmon = agmon_distance(graph, potential, energy, energy_shift=args.energy_shift)
        fmt = fmt_distance(graph, potential, agmon.energy) if args.fmt else None
    except EmptyAllowedRegion as exc:
        log.warning("%s", exc)
        agmon, empty = exc.field, True
        fmt = np.full(graph.n, np.inf) if args.fmt else None
    doc = report.field_document(graph, potential, agmon, fmt, empty_allowed=empty)
    _emit(doc, doc["rows"], args, report.FIELD_COLUMNS)
    return EXIT_OK


def cmd_verify(args) -> int:
    graph, potential = _load(args)
    h = assemble(graph, potential)
    pair = _pair(args, graph, potential, h)
    tol_eig = args.tol_eig if args.tol_eig is not None else h.default_tol()
    residual = float(np.linalg.norm(h.matrix @ pair.eigenvector - pair.eigenvalue * pair.eigenvector))
    eigen_ok = residual <= tol_eig * max(1.0, float(np.linalg.norm(pair.eigenvector)))
    agmon = agmon_distance(graph, potential, pair.eigenvalue)
    theorem = verify_theorem(graph, potential, pair, agmon, tol=args.tol_verify)
    refined = walk = walk_info = None
    if args.refined:
        refined = verify_refined(graph, potential, pair, agmon=agmon, tol=args.tol_verify)
    if args.rw:
        try:
            walk_info = walk_bound(graph, potential, pair.eigenvalue, samples=args.samples, seed=args.seed)
            walk = verify_walk_bound(pair, walk_info, rho=agmon.rho, tol=args.tol_verify)
        except NoForbiddenRegion:
            walk = vacuous_walk_report(pair, np.asarray(potential) <= pair.eigenvalue, agmon.rho)
    doc = report.bound_document(theorem, refined, walk, walk_info, residual, eigen_ok)
    columns = list(report.BOUND_COLUMNS)
    if refined is not None:
        columns += report.REFINED_COLUMNS
    if walk is not None:
        columns += report.WALK_COLUMNS
    _emit(doc, doc["rows"], args, columns)
    failures = []
    if not eigen_ok:
        failures.append(f"eigenpair residual {residual:.3e} exceeds {tol_eig:.3e}; bounds are not certified")
    for rep in (theorem, refined, walk):
        if rep is not None and not rep.passed:
            v = rep.worst_vertex
            failures.append(
                f"{rep.kind} bound violated; worst vertex {v}: |phi| = {rep.abs_phi[v]:.6e}, "
                f"bound = {rep.bound[v]:.6e}, slack = {rep.slack[v]:.3e}"
            )
    if walk is not None and walk.vacuous:
        log.info("walk bound vacuous: no forbidden region at E = %r", pair.eigenvalue)
    for msg in failures:
        print(f"agmon verify: {msg}", file=sys.stderr)
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_rw_bound(args) -> int:
    graph, potential = _load(args)
    if args.energy is not None:
        info = walk_bound(graph, potential, args.energy, samples=args.samples, seed=args.seed)
        doc = report.walk_document(graph, info)
        _emit(doc, doc["rows"], args, ("v", "allowed", "exact", "mc", "mc_stderr"))
        return EXIT_OK
    h = assemble(graph, potential)
    pair = _pair(args, graph, potential, h)
    agmon = agmon_distance(graph, potential, pair.eigenvalue)
    theorem = verify_theorem(graph, potential, pair, agmon, tol=args.tol_verify)
    try:
        info = walk_bound(graph, potential, pair.eigenvalue, samples=args.samples, seed=args.seed)
        walk = verify_walk_bound(pair, info, rho=agmon.rho, tol=args.tol_verify)
    except NoForbiddenRegion:
        info = None
        walk = vacuous_walk_report(pair, np.asarray(potential) <= pair.eigenvalue, agmon.rho)
    doc = report.bound_document(theorem, None, walk, info)
    if info is not None and info.mc_moment is not None:
        for row, mc, se in zip(doc["rows"], info.mc_moment, info.mc_stderr):
            row["walk_mc"] = report.num(mc)
            row["walk_mc_stderr"] = report.num(se)
    columns = list(report.BOUND_COLUMNS) + list(report.WALK_COLUMNS)
    if info is not None and info.mc_moment is not None:
        columns += ["walk_mc", "walk_mc_stderr"]
    _emit(doc, doc["rows"], args, columns)
    if not walk.passed:
        v = walk.worst_vertex
        print(f"agmon rw-bound: walk bound violated at vertex {v} (slack {walk.slack[v]:.3e})", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_tree_demo(args) -> int:
    exp = run_tree_experiment(args.q, args.k, args.w_mag, seed=args.seed)
    agmon = agmon_distance(exp.graph, exp.potential, exp.lambda1)
    cmp = compare_decay_rates(exp, agmon)
    doc = report.experiment_document(exp, agmon, cmp, check_level_recurrence(exp))
    if args.output is None:
        sys.stdout.write(json.dumps(doc, indent=1) + "\n")
    else:
        report.write_json(doc, args.output)
    if args.csv:
        report.write_csv(doc["profile"], args.csv, report.PROFILE_COLUMNS)
    return EXIT_OK if exp.lambda_bound_ok else EXIT_VIOLATION


# parser ---------------------------------------------------------------------

def _add_input(p, pairs=False):
    p.add_argument("graph", help="graph JSON file (or edge list with --potential-file)")
    p.add_argument("--potential-file", help="one value per line; makes GRAPH a plain 'u v' edge list")
    if pairs:
        p.add_argument("--pairs", help="eigenpair JSON from 'agmon solve' (default: solve now)")
        p.add_argument("--index", type=int, default=0, help="eigenpair index, 0 = ground state")
        p.add_argument("--method", choices=("ql", "lapack", "lanczos"), default="ql")


def _add_tols(p):
    p.add_argument("--tol-eig", type=_positive, default=None, help="eigen-residual tolerance (default 1e-10*||H||)")
    p.add_argument("--tol-verify", type=_positive, default=None, help="bound tolerance (default 1e-9*max|phi|)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agmon", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a graph JSON file")
    p.add_argument("family", choices=("path", "cycle", "grid", "tree-hub", "random"))
    p.add_argument("--n", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--potential", type=_floats, help="comma-separated W values")
    p.add_argument("--w-mag", type=float, help="tree-hub: W = W_MAG off the hub, 0 on it")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="eigenpairs of L + W")
    _add_input(p)
    p.add_argument("--count", type=int, help="only the lowest COUNT pairs")
    p.add_argument("--method", choices=("ql", "lapack", "lanczos"), default="ql")
    p.add_argument("--tol-eig", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("agmon", help="Agmon distance field")
    _add_input(p, pairs=True)
    p.add_argument("--energy", type=float, help="explicit E instead of an eigenvalue")
    p.add_argument("--energy-shift", type=float, default=0.0)
    p.add_argument("--fmt", action="store_true", help="add the edge-cost comparison distance")
    p.add_argument("--tol-eig", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_agmon)

    p = sub.add_parser("verify", help="check the decay bounds for one eigenpair")
    _add_input(p, pairs=True)
    p.add_argument("--refined", action="store_true")
    p.add_argument("--rw", action="store_true", help="also check the random-walk bound")
    p.add_argument("--samples", type=int, default=0, help="Monte Carlo walks per vertex for --rw")
    p.add_argument("--seed", type=int, default=0)
    _add_tols(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rw-bound", help="random-walk moment bound")
    _add_input(p, pairs=True)
    p.add_argument("--energy", type=float, help="only compute moments at this E")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    _add_tols(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rw_bound)

    p = sub.add_parser("tree-demo", help="hub-tree sharpness experiment")
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--w-mag", type=float, default=1e6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="also write the level profile as CSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tree_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        _check_paths(args)
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"agmon {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"agmon {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AgmonError as exc:
        print(f"agmon {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
