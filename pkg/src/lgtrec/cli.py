"""Command line interface.

Subcommands: check-network, time-check, dstree, reconcile, verify, sconsist,
gen, oracle.  Stdout carries data only (pass --json for one machine-readable
object); diagnostics go to stderr.  Exit codes: 0 success, 2 usage,
3 infeasible or inconsistent result, 4 invalid witness, 5 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formats, highways, netops, reductions, relations
from .model import INF, validate_network
from .netops import TimeAssignment
from .reconcile import DegreeTooLargeError, InfeasibleError, extract_witness, min_transfer_cost
from .relations import NotRepresentableError
from .verify import check_displays, verify_reconciliation

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NEGATIVE = 3
EXIT_INVALID = 4
EXIT_IO = 5


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError("cannot read %s: %s" % (path, exc), EXIT_IO)


def _write(path: str, text: str):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _CliError("cannot write %s: %s" % (path, exc), EXIT_IO)


def _load(parser_fn, path: str):
    try:
        return parser_fn(_read(path))
    except formats.FormatError as exc:
        raise _CliError("%s: %s" % (path, exc), EXIT_IO)


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _cmd_check_network(args) -> int:
    net = _load(formats.parse_network, args.network)
    report = validate_network(net)
    payload = {"ok": report.ok, "violations": [str(v) for v in report.violations]}
    _emit(args, payload, "OK" if report.ok else "\n".join(str(v) for v in report.violations))
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _cmd_time_check(args) -> int:
    net = _load(formats.parse_network, args.network)
    result = netops.check_time_consistency(net)
    if isinstance(result, TimeAssignment):
        times = {n: result.times[n] for n in sorted(result.times)}
        _emit(args, {"consistent": True, "times": times}, json.dumps(times, sort_keys=True))
        return EXIT_OK
    payload = {"consistent": False, "cycle": [list(step) for step in result.cycle]}
    _emit(args, payload, str(result))
    return EXIT_NEGATIVE


def _cmd_dstree(args) -> int:
    graph = _load(formats.parse_relation_graph, args.relations)
    try:
        tree = relations.build_least_resolved_dstree(graph)
    except NotRepresentableError as exc:
        payload = {"representable": False, "obstruction": list(exc.obstruction)}
        _emit(args, payload, "NOT-REPRESENTABLE induced path: %s" % " - ".join(exc.obstruction))
        return EXIT_NEGATIVE
    newick = formats.write_dstree(tree)
    _emit(args, {"representable": True, "dstree": newick}, newick)
    return EXIT_OK


def _require_sigma(args, tree) -> dict:
    if args.genes is None:
        raise _CliError("a gene -> species map is required (--genes FILE)", EXIT_USAGE)
    sigma = _load(formats.parse_gene_map, args.genes)
    missing = [g for g in tree.leaves() if g not in sigma]
    if missing:
        raise _CliError("no species assignment for genes: %s" % ", ".join(missing), EXIT_IO)
    return sigma


def _cmd_reconcile(args) -> int:
    tree = _load(formats.parse_dstree, args.dstree)
    net = _load(formats.parse_network, args.network)
    sigma = _require_sigma(args, tree)
    report = validate_network(net)
    if not report.ok:
        raise _CliError("invalid network: %s" % report.violations[0], EXIT_IO)
    degree_cap = args.max_degree_local if args.max_degree_local is not None else args.max_degree
    try:
        if args.witness or args.refined:
            witness = extract_witness(tree, net, sigma, max_degree=degree_cap)
            cost = witness.cost
            if args.witness:
                _write(args.witness, formats.write_reconciliation(witness.reconciliation))
            if args.refined:
                _write(args.refined, formats.write_dstree(witness.refined) + "\n")
        else:
            cost = min_transfer_cost(tree, net, sigma, max_degree=degree_cap)
    except DegreeTooLargeError as exc:
        raise _CliError(str(exc), EXIT_USAGE)
    except InfeasibleError:
        cost = INF
    if cost == INF:
        _emit(args, {"feasible": False, "cost": None}, "INFEASIBLE")
        return EXIT_NEGATIVE
    _emit(args, {"feasible": True, "cost": int(cost)}, str(int(cost)))
    return EXIT_OK


def _cmd_verify(args) -> int:
    tree = _load(formats.parse_dstree, args.dstree)
    net = _load(formats.parse_network, args.network)
    recon = _load(formats.parse_reconciliation, args.recon)
    sigma = _require_sigma(args, tree)
    report = verify_reconciliation(tree, net, recon, sigma)
    payload = {
        "valid": report.valid,
        "transfers": report.transfer_count,
        "violations": [str(v) for v in report.violations],
    }
    lines = ["VALID %d" % report.transfer_count if report.valid else "INVALID"]
    lines += [str(v) for v in report.violations]
    ok = report.valid
    if args.relations and report.valid:
        graph = _load(formats.parse_relation_graph, args.relations)
        displays = check_displays(tree, recon, graph)
        payload["displays"] = displays
        lines.append("DISPLAYS" if displays else "DOES-NOT-DISPLAY")
        ok = ok and displays
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_INVALID


def _cmd_sconsist(args) -> int:
    graph = _load(formats.parse_relation_graph, args.relations)
    species_tree = _load(formats.parse_species_tree, args.species)
    consistent = highways.decide_s_consistency(graph, species_tree)
    payload = {"consistent": consistent}
    if not consistent:
        _emit(args, payload, "INCONSISTENT")
        return EXIT_NEGATIVE
    if args.emit_network or args.emit_witness or args.emit_refined:
        missing = [g for g in graph.gene_ids() if graph.sigma[g] not in species_tree.leaf_species.values()]
        if missing:
            raise _CliError("species of genes %s are not species-tree leaves" % ", ".join(missing), EXIT_IO)
        least = relations.build_least_resolved_dstree(graph)
        binary = next(iter(relations.enumerate_binary_refinements(least)))
        net = highways.construct_network(binary, species_tree)
        witness = highways.build_s_witness(binary, net, graph.sigma)
        if args.emit_network:
            _write(args.emit_network, formats.write_network(net))
        if args.emit_witness:
            _write(args.emit_witness, formats.write_reconciliation(witness))
        if args.emit_refined:
            _write(args.emit_refined, formats.write_dstree(binary) + "\n")
    _emit(args, payload, "CONSISTENT")
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "act":
        mcc = _load(reductions.parse_mcc, args.mcc)
        act = reductions.mcc_to_act(mcc)
        text = reductions.write_act(act)
        if args.out:
            _write(args.out, text)
            _emit(args, {"out": args.out, "elements": len(act.elements)}, args.out)
        else:
            print(text, end="")
        return EXIT_OK
    if args.kind == "nc":
        act = _load(reductions.parse_act, args.act)
        try:
            nc = reductions.act_to_nc(act)
        except ValueError as exc:
            raise _CliError(str(exc), EXIT_IO)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write(str(out / "dstree.nwk"), formats.write_dstree(nc.dstree) + "\n")
        _write(str(out / "network.json"), formats.write_network(nc.network))
        graph = relations.relation_graph_of(nc.dstree, nc.sigma)
        _write(str(out / "relations.json"), formats.write_relation_graph(graph))
        files = ["dstree.nwk", "network.json", "relations.json"]
        _emit(args, {"out_dir": str(out), "files": files}, str(out))
        return EXIT_OK
    fas = _load(reductions.parse_fas, args.fas)
    try:
        inst = reductions.fas_to_tmstc(fas)
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_IO)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write(str(out / "dstree.nwk"), formats.write_dstree(inst.dstree) + "\n")
    _write(str(out / "species.nwk"), formats.write_species_tree(inst.species_tree) + "\n")
    graph = relations.relation_graph_of(inst.dstree, inst.sigma)
    _write(str(out / "relations.json"), formats.write_relation_graph(graph))
    _write(str(out / "budget.json"), json.dumps({"transfers": inst.transfer_budget}) + "\n")
    files = ["dstree.nwk", "species.nwk", "relations.json", "budget.json"]
    if args.emit_witness:
        aprime = reductions.minimum_feedback_arc_set(fas)
        net, recon = reductions.fas_witness(fas, aprime, inst)
        _write(str(out / "witness-network.json"), formats.write_network(net))
        _write(str(out / "witness-recon.json"), formats.write_reconciliation(recon))
        files += ["witness-network.json", "witness-recon.json"]
    _emit(args, {"out_dir": str(out), "files": files, "budget": inst.transfer_budget}, str(out))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    if args.kind == "act":
        act = _load(reductions.parse_act, args.act)
        try:
            value = reductions.solve_act_bruteforce(act, max_elements=args.bound)
        except reductions.BoundExceededError as exc:
            raise _CliError(str(exc), EXIT_USAGE)
        if value == INF:
            _emit(args, {"feasible": False, "weight": None}, "INFEASIBLE")
            return EXIT_NEGATIVE
        _emit(args, {"feasible": True, "weight": int(value)}, str(int(value)))
        return EXIT_OK
    fas = _load(reductions.parse_fas, args.fas)
    try:
        size = reductions.solve_fas_bruteforce(fas, max_arcs=args.bound)
    except reductions.BoundExceededError as exc:
        raise _CliError(str(exc), EXIT_USAGE)
    _emit(args, {"size": size}, str(size))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgtrec", description=__doc__)
    parser.add_argument("--json", action="store_true", help="emit one JSON object on stdout")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized tooling (unused by deterministic commands)")
    parser.add_argument("--threads", type=int, default=1, help="reserved; results are identical for any value")
    parser.add_argument("--max-degree", type=int, default=8, help="largest DS-tree node degree the solver accepts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-network", help="validate the structural rules of a network file")
    p.add_argument("--network", required=True)
    p.set_defaults(fn=_cmd_check_network)

    p = sub.add_parser("time-check", help="decide time consistency; print times or a cycle certificate")
    p.add_argument("--network", required=True)
    p.set_defaults(fn=_cmd_time_check)

    p = sub.add_parser("dstree", help="build the least-resolved DS-tree of a relation graph")
    p.add_argument("--relations", required=True)
    p.set_defaults(fn=_cmd_dstree)

    p = sub.add_parser("reconcile", help="minimum transfers to reconcile a DS-tree with a network")
    p.add_argument("--dstree", required=True)
    p.add_argument("--network", required=True)
    p.add_argument("--genes", help="gene -> species map (JSON; a relations file also works)")
    p.add_argument("--witness", help="write the witness reconciliation here")
    p.add_argument("--refined", help="write the witness's binary refinement here")
    # also accepted after the subcommand; None defers to the global flag
    p.add_argument("--max-degree", dest="max_degree_local", type=int, default=None)
    p.set_defaults(fn=_cmd_reconcile)

    p = sub.add_parser("verify", help="check a reconciliation against a DS-tree and network")
    p.add_argument("--dstree", required=True)
    p.add_argument("--network", required=True)
    p.add_argument("--recon", required=True)
    p.add_argument("--genes", help="gene -> species map (JSON; a relations file also works)")
    p.add_argument("--relations", help="also check that the tree displays this relation graph")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("sconsist", help="decide species-tree consistency; optionally emit a witness")
    p.add_argument("--relations", required=True)
    p.add_argument("--species", required=True)
    p.add_argument("--emit-network")
    p.add_argument("--emit-witness")
    p.add_argument("--emit-refined")
    p.set_defaults(fn=_cmd_sconsist)

    p = sub.add_parser("gen", help="generate reduction-pipeline instances")
    gen_sub = p.add_subparsers(dest="kind", required=True)
    g = gen_sub.add_parser("act", help="multicolored clique -> antichain instance")
    g.add_argument("--mcc", required=True)
    g.add_argument("--out")
    g.set_defaults(fn=_cmd_gen, kind="act")
    g = gen_sub.add_parser("nc", help="antichain instance -> DS-tree + network")
    g.add_argument("--act", required=True)
    g.add_argument("--out-dir", required=True)
    g.set_defaults(fn=_cmd_gen, kind="nc")
    g = gen_sub.add_parser("tmstc", help="feedback arc set -> DS-tree + species tree + budget")
    g.add_argument("--fas", required=True)
    g.add_argument("--out-dir", required=True)
    g.add_argument("--emit-witness", action="store_true", help="also emit a witness network and reconciliation")
    g.set_defaults(fn=_cmd_gen, kind="tmstc")

    p = sub.add_parser("oracle", help="run the brute-force solvers")
    oracle_sub = p.add_subparsers(dest="kind", required=True)
    o = oracle_sub.add_parser("act", help="minimum-weight incomparable assignment")
    o.add_argument("--act", required=True)
    o.add_argument("--bound", type=int, default=12)
    o.set_defaults(fn=_cmd_oracle, kind="act")
    o = oracle_sub.add_parser("fas", help="minimum feedback arc set size")
    o.add_argument("--fas", required=True)
    o.add_argument("--bound", type=int, default=16)
    o.set_defaults(fn=_cmd_oracle, kind="fas")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
