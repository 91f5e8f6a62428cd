"""End-to-end command line behavior and exit codes."""

import json

from lgtrec.cli import main
from lgtrec.formats import (
    parse_dstree,
    parse_network,
    parse_reconciliation,
    write_network,
    write_relation_graph,
)
from lgtrec.model import Gene, RelationGraph
from lgtrec.reductions import FASInstance, MCCInstance, write_fas, write_mcc
from oracles import transfer_network, two_leaf_network

FIG_EDGES = [
    ("a1", "b1"), ("a1", "c1"), ("a1", "d1"), ("b1", "c1"), ("b1", "d1"), ("c1", "d1"),
    ("a2", "b2"), ("a2", "c2"), ("a2", "d2"), ("b2", "c2"),
]


def _file(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_check_network_ok_and_violations(tmp_path, capsys):
    good = _file(tmp_path, "net.json", write_network(two_leaf_network()))
    assert main(["check-network", "--network", good]) == 0
    assert capsys.readouterr().out.strip() == "OK"

    bad = _file(
        tmp_path,
        "bad.json",
        json.dumps(
            {
                "nodes": ["r", "A", "B", "C"],
                "root": "r",
                "arcs": [
                    {"from": "r", "to": "A", "kind": "principal"},
                    {"from": "r", "to": "B", "kind": "principal"},
                    {"from": "r", "to": "C", "kind": "principal"},
                ],
                "leaves": {"A": "A", "B": "B", "C": "C"},
            }
        ),
    )
    assert main(["check-network", "--network", bad]) == 3
    assert "degree" in capsys.readouterr().out


def test_time_check_emits_assignment_or_certificate(tmp_path, capsys):
    net = _file(tmp_path, "net.json", write_network(transfer_network()))
    assert main(["time-check", "--network", net]) == 0
    times = json.loads(capsys.readouterr().out)
    assert times["tb"] == times["ha"]

    cyclic = _file(
        tmp_path,
        "cyclic.json",
        json.dumps(
            {
                "nodes": ["r", "v", "u", "A", "B", "C"],
                "root": "r",
                "arcs": [
                    {"from": "r", "to": "v", "kind": "principal"},
                    {"from": "v", "to": "u", "kind": "principal"},
                    {"from": "u", "to": "A", "kind": "principal"},
                    {"from": "u", "to": "B", "kind": "principal"},
                    {"from": "v", "to": "C", "kind": "principal"},
                    {"from": "u", "to": "v", "kind": "secondary"},
                ],
                "leaves": {"A": "A", "B": "B", "C": "C"},
            }
        ),
    )
    assert main(["time-check", "--network", cyclic]) == 3
    assert "time inconsistency" in capsys.readouterr().out


def test_dstree_builds_the_worked_example(tmp_path, capsys):
    graph = RelationGraph(
        [Gene(g, g[0].upper()) for g in sorted({x for e in FIG_EDGES for x in e})],
        FIG_EDGES,
    )
    relations = _file(tmp_path, "fig1c.json", write_relation_graph(graph))
    assert main(["dstree", "--relations", relations]) == 0
    assert capsys.readouterr().out.strip() == "((a1,b1,c1,d1)S,(a2,((b2,c2)S,d2)D)S)D;"

    p4 = RelationGraph(
        [Gene(g, "A") for g in "abcd"],
        [("a", "b"), ("b", "c"), ("c", "d")],
    )
    bad = _file(tmp_path, "p4.json", write_relation_graph(p4))
    assert main(["dstree", "--relations", bad]) == 3
    assert "NOT-REPRESENTABLE" in capsys.readouterr().out


def test_reconcile_cost_witness_and_infeasible(tmp_path, capsys):
    net_path = _file(tmp_path, "net.json", write_network(two_leaf_network()))
    tree_path = _file(tmp_path, "d.nwk", "(x,y)S;")
    genes_path = _file(tmp_path, "genes.json", json.dumps({"x": "A", "y": "B"}))
    witness_path = str(tmp_path / "witness.json")
    refined_path = str(tmp_path / "refined.nwk")
    code = main([
        "reconcile", "--dstree", tree_path, "--network", net_path,
        "--genes", genes_path, "--witness", witness_path, "--refined", refined_path,
    ])
    assert code == 0
    assert capsys.readouterr().out.strip() == "0"
    recon = parse_reconciliation(open(witness_path).read())
    assert recon.transfer_count == 0
    assert parse_dstree(open(refined_path).read().strip()) == parse_dstree("(x,y)S;")

    same = _file(tmp_path, "same.json", json.dumps({"x": "A", "y": "A"}))
    assert main(["reconcile", "--dstree", tree_path, "--network", net_path, "--genes", same]) == 3
    assert capsys.readouterr().out.strip() == "INFEASIBLE"


def test_reconcile_requires_genes(tmp_path, capsys):
    net_path = _file(tmp_path, "net.json", write_network(two_leaf_network()))
    tree_path = _file(tmp_path, "d.nwk", "(x,y)S;")
    assert main(["reconcile", "--dstree", tree_path, "--network", net_path]) == 2


def test_verify_accepts_witness_and_rejects_mutation(tmp_path, capsys):
    net_path = _file(tmp_path, "net.json", write_network(transfer_network()))
    tree_path = _file(tmp_path, "d.nwk", "(x,y)S;")
    genes_path = _file(tmp_path, "genes.json", json.dumps({"x": "A", "y": "A"}))
    witness_path = str(tmp_path / "w.json")
    refined_path = str(tmp_path / "r.nwk")
    main([
        "reconcile", "--dstree", tree_path, "--network", net_path,
        "--genes", genes_path, "--witness", witness_path, "--refined", refined_path,
    ])
    capsys.readouterr()
    code = main([
        "verify", "--dstree", refined_path, "--network", net_path,
        "--recon", witness_path, "--genes", genes_path,
    ])
    assert code == 0
    assert capsys.readouterr().out.startswith("VALID 1")

    payload = json.loads(open(witness_path).read())
    payload["events"]["@0"][-1] = "D"
    broken = _file(tmp_path, "broken.json", json.dumps(payload))
    code = main([
        "verify", "--dstree", refined_path, "--network", net_path,
        "--recon", broken, "--genes", genes_path,
    ])
    assert code == 4
    assert "INVALID" in capsys.readouterr().out


def test_sconsist_pipeline_and_exit_codes(tmp_path, capsys):
    graph = RelationGraph(
        [Gene("x", "A"), Gene("y", "B"), Gene("z", "A")],
        [("x", "y")],
    )
    relations = _file(tmp_path, "r.json", write_relation_graph(graph))
    species = _file(tmp_path, "s.nwk", "(A,B);")
    out_net = str(tmp_path / "n.json")
    out_witness = str(tmp_path / "a.json")
    out_refined = str(tmp_path / "d.nwk")
    code = main([
        "sconsist", "--relations", relations, "--species", species,
        "--emit-network", out_net, "--emit-witness", out_witness, "--emit-refined", out_refined,
    ])
    assert code == 0
    assert capsys.readouterr().out.strip() == "CONSISTENT"
    net = parse_network(open(out_net).read())
    refined = parse_dstree(open(out_refined).read().strip())
    recon = parse_reconciliation(open(out_witness).read())
    from lgtrec.verify import verify_reconciliation

    assert verify_reconciliation(refined, net, recon, graph.sigma).valid

    p4 = RelationGraph(
        [Gene(g, "A") for g in "abcd"],
        [("a", "b"), ("b", "c"), ("c", "d")],
    )
    bad = _file(tmp_path, "p4.json", write_relation_graph(p4))
    assert main(["sconsist", "--relations", bad, "--species", species]) == 3
    assert capsys.readouterr().out.strip() == "INCONSISTENT"


def test_gen_and_oracle_round_trip(tmp_path, capsys):
    mcc_path = _file(tmp_path, "mcc.json", write_mcc(MCCInstance.create([["u"], ["v"]], [("u", "v")])))
    act_path = str(tmp_path / "act.json")
    assert main(["gen", "act", "--mcc", mcc_path, "--out", act_path]) == 0
    capsys.readouterr()
    assert main(["oracle", "act", "--act", act_path, "--bound", "20"]) == 0
    assert capsys.readouterr().out.strip() == "8"

    nc_dir = str(tmp_path / "nc")
    assert main(["gen", "nc", "--act", act_path, "--out-dir", nc_dir]) == 0
    capsys.readouterr()
    tree = parse_dstree(open(tmp_path / "nc" / "dstree.nwk").read().strip())
    net = parse_network(open(tmp_path / "nc" / "network.json").read())
    from lgtrec.model import validate_network

    assert validate_network(net).ok
    assert tree.leaves()

    fas_path = _file(tmp_path, "fas.json", write_fas(FASInstance.create(["a", "b"], [("a", "b"), ("b", "a")], 1)))
    assert main(["oracle", "fas", "--fas", fas_path]) == 0
    assert capsys.readouterr().out.strip() == "1"
    tmstc_dir = str(tmp_path / "tmstc")
    assert main(["gen", "tmstc", "--fas", fas_path, "--out-dir", tmstc_dir, "--emit-witness"]) == 0
    capsys.readouterr()
    refined = parse_dstree(open(tmp_path / "tmstc" / "dstree.nwk").read().strip())
    wnet = parse_network(open(tmp_path / "tmstc" / "witness-network.json").read())
    recon = parse_reconciliation(open(tmp_path / "tmstc" / "witness-recon.json").read())
    genes = json.loads(open(tmp_path / "tmstc" / "relations.json").read())["genes"]
    from lgtrec.verify import verify_reconciliation

    report = verify_reconciliation(refined, wnet, recon, genes)
    assert report.valid
    assert report.transfer_count == 5
    budget = json.loads(open(tmp_path / "tmstc" / "budget.json").read())
    assert budget["transfers"] == 5


def test_parse_and_io_errors_exit_5(tmp_path, capsys):
    bad = _file(tmp_path, "bad.json", "not json")
    assert main(["check-network", "--network", bad]) == 5
    assert main(["check-network", "--network", str(tmp_path / "missing.json")]) == 5


def test_json_mode_wraps_reconcile_result(tmp_path, capsys):
    net_path = _file(tmp_path, "net.json", write_network(two_leaf_network()))
    tree_path = _file(tmp_path, "d.nwk", "(x,y)S;")
    genes_path = _file(tmp_path, "genes.json", json.dumps({"x": "A", "y": "B"}))
    assert main(["--json", "reconcile", "--dstree", tree_path, "--network", net_path, "--genes", genes_path]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"cost": 0, "feasible": True}


def test_stdout_is_byte_identical_across_runs(tmp_path, capsys):
    graph = RelationGraph(
        [Gene(g, g[0].upper()) for g in sorted({x for e in FIG_EDGES for x in e})],
        FIG_EDGES,
    )
    relations = _file(tmp_path, "fig1c.json", write_relation_graph(graph))
    main(["--json", "dstree", "--relations", relations])
    first = capsys.readouterr().out
    main(["--json", "dstree", "--relations", relations])
    second = capsys.readouterr().out
    assert first == second
    json.loads(first)
