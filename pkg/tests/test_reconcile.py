"""The minimum-transfer solver against its definitions and small fixtures."""

import random

import pytest

from lgtrec.formats import parse_dstree
from lgtrec.model import DSTree, INF, SPEC
from lgtrec.netops import transfer_distances
from lgtrec.reconcile import (
    DegreeTooLargeError,
    InfeasibleError,
    enumerate_lbrs,
    extract_witness,
    min_transfer_cost,
    reconcile_lbr,
)
from lgtrec.verify import verify_reconciliation
from oracles import (
    oracle_min_transfer_cost,
    random_dstree,
    random_sigma,
    random_species_network,
    transfer_network,
    two_leaf_network,
)


@pytest.mark.parametrize("k,count", [(2, 1), (3, 3), (4, 15), (5, 105), (6, 945)])
def test_lbr_counts_match_double_factorial(k, count):
    handles = ["c%d" % i for i in range(k)]
    lbrs = enumerate_lbrs(handles, SPEC)
    assert len(lbrs) == count
    assert len({lbr.shape for lbr in lbrs}) == count


def test_reconcile_lbr_cherry_cases():
    cherry = enumerate_lbrs(["x", "y"], SPEC)[0]
    net = two_leaf_network()
    dist = transfer_distances(net)
    split = {"x": {"A": 0}, "y": {"B": 0}}
    assert reconcile_lbr(cherry, net, "r", split, dist) == 0
    same = {"x": {"A": 0}, "y": {"A": 0}}
    for s in net.nodes:
        assert reconcile_lbr(cherry, net, s, same, dist) == INF
    net2 = transfer_network()
    dist2 = transfer_distances(net2)
    assert reconcile_lbr(cherry, net2, "r", same, dist2) == 1


def test_leaf_costs_are_zero_exactly_at_the_species_leaf():
    net = transfer_network()
    tree = parse_dstree("(x,y)S;")
    from lgtrec.reconcile import _run_dp

    f, _, _ = _run_dp(tree, net, {"x": "A", "y": "B"}, 8, record=False)
    assert f["x"] == {"A": 0}
    assert f["y"] == {"B": 0}


def test_duplication_cherry_costs_nothing_on_a_tree():
    net = two_leaf_network()
    tree = parse_dstree("(x,y)D;")
    assert min_transfer_cost(tree, net, {"x": "A", "y": "B"}) == 0


def test_same_species_speciation_needs_the_highway():
    tree = parse_dstree("(x,y)S;")
    sigma = {"x": "A", "y": "A"}
    assert min_transfer_cost(tree, two_leaf_network(), sigma) == INF
    assert min_transfer_cost(tree, transfer_network(), sigma) == 1


def test_unknown_species_or_gene_is_an_error():
    tree = parse_dstree("(x,y)S;")
    with pytest.raises(ValueError, match="not a network leaf"):
        min_transfer_cost(tree, two_leaf_network(), {"x": "A", "y": "Z"})
    with pytest.raises(ValueError, match="no species assignment"):
        min_transfer_cost(tree, two_leaf_network(), {"x": "A"})


def test_single_gene_tree_reconciles_at_its_leaf():
    tree = parse_dstree("x;")
    net = two_leaf_network()
    assert min_transfer_cost(tree, net, {"x": "B"}) == 0
    witness = extract_witness(tree, net, {"x": "B"})
    assert witness.reconciliation.alpha == {"x": ("B",)}


def test_degree_cap_names_the_node():
    tree = DSTree.from_structure(("S", ["g%d" % i for i in range(5)]))
    sigma = {"g%d" % i: "A" for i in range(5)}
    with pytest.raises(DegreeTooLargeError, match="@0"):
        min_transfer_cost(tree, two_leaf_network(), sigma, max_degree=4)


def test_adding_a_secondary_arc_never_raises_the_cost():
    base = two_leaf_network()
    more = transfer_network()
    rng = random.Random(2)
    for _ in range(20):
        genes = ["g%d" % i for i in range(rng.randint(2, 5))]
        tree = random_dstree(rng, genes)
        sigma = random_sigma(rng, genes, ["A", "B"])
        assert min_transfer_cost(tree, more, sigma) <= min_transfer_cost(tree, base, sigma)


def test_solver_matches_oracle_on_random_instances():
    rng = random.Random(77)
    finite = 0
    for _ in range(60):
        n_species = rng.randint(2, 4)
        net = random_species_network(rng, n_species, rng.randint(0, 3))
        genes = ["g%d" % i for i in range(rng.randint(2, 6))]
        tree = random_dstree(rng, genes)
        sigma = random_sigma(rng, genes, net.leaf_species.values())
        got = min_transfer_cost(tree, net, sigma)
        assert got == oracle_min_transfer_cost(tree, net, sigma)
        finite += got < INF
    assert finite > 10


def test_witness_is_valid_and_matches_cost():
    rng = random.Random(31)
    checked = 0
    for _ in range(40):
        net = random_species_network(rng, rng.randint(2, 4), rng.randint(0, 3))
        genes = ["g%d" % i for i in range(rng.randint(2, 6))]
        tree = random_dstree(rng, genes)
        sigma = random_sigma(rng, genes, net.leaf_species.values())
        cost = min_transfer_cost(tree, net, sigma)
        if cost == INF:
            with pytest.raises(InfeasibleError):
                extract_witness(tree, net, sigma)
            continue
        witness = extract_witness(tree, net, sigma)
        assert witness.cost == cost
        assert witness.reconciliation.transfer_count == cost
        report = verify_reconciliation(witness.refined, net, witness.reconciliation, sigma)
        assert report.valid, [str(v) for v in report.violations]
        assert report.transfer_count == cost
        checked += 1
    assert checked > 10


def test_witness_refinement_contracts_back_to_the_input():
    from lgtrec.relations import contract_fully

    rng = random.Random(41)
    for _ in range(20):
        net = random_species_network(rng, rng.randint(2, 3), rng.randint(1, 2))
        genes = ["g%d" % i for i in range(rng.randint(3, 6))]
        tree = random_dstree(rng, genes)
        sigma = random_sigma(rng, genes, net.leaf_species.values())
        if min_transfer_cost(tree, net, sigma) == INF:
            continue
        witness = extract_witness(tree, net, sigma)
        assert witness.refined.is_binary()
        assert contract_fully(witness.refined) == contract_fully(tree)


def test_witness_extraction_is_deterministic():
    rng = random.Random(59)
    checked = 0
    while checked < 3:
        net = random_species_network(rng, 3, 2)
        genes = ["g%d" % i for i in range(5)]
        tree = random_dstree(rng, genes)
        sigma = random_sigma(rng, genes, net.leaf_species.values())
        if min_transfer_cost(tree, net, sigma) == INF:
            continue
        first = extract_witness(tree, net, sigma)
        second = extract_witness(tree, net, sigma)
        assert first.refined == second.refined
        assert first.reconciliation == second.reconciliation
        checked += 1


def test_engine_agrees_with_direct_lbr_formula():
    # the shared-relaxation engine and the literal per-case minimization
    # compute the same local refinement costs
    from lgtrec.reconcile import _lbr_engine

    rng = random.Random(67)
    for _ in range(20):
        net = random_species_network(rng, rng.randint(2, 4), rng.randint(0, 2))
        dist = transfer_distances(net)
        topo = net.topological_order()
        label = rng.choice(["S", "D"])
        handles = ["h%d" % i for i in range(rng.randint(2, 4))]
        leaf_costs = {}
        for h in handles:
            row = {}
            for node in net.nodes:
                if rng.random() < 0.3:
                    row[node] = rng.randint(0, 3)
            if not row:
                row[rng.choice(net.nodes)] = 0
            leaf_costs[h] = row
        for refinement in enumerate_lbrs(handles, label):
            tables, _ = _lbr_engine(refinement, net, topo, leaf_costs, record=False)
            root = tables[refinement.root_index]
            for s in net.nodes:
                assert root.get(s, INF) == reconcile_lbr(refinement, net, s, leaf_costs, dist)
