"""Cotree construction, display, contraction and binary refinements."""

import random

import pytest

from lgtrec.formats import parse_dstree, write_dstree
from lgtrec.model import DSTree, Gene, RelationGraph
from lgtrec.relations import (
    NotRepresentableError,
    build_least_resolved_dstree,
    contract_fully,
    enumerate_binary_refinements,
    l_contract,
    relation_graph_of,
)
from oracles import plant_p4, random_dstree

# the worked 8-gene example: a K4 component plus a second component
FIG_EDGES = [
    ("a1", "b1"), ("a1", "c1"), ("a1", "d1"), ("b1", "c1"), ("b1", "d1"), ("c1", "d1"),
    ("a2", "b2"), ("a2", "c2"), ("a2", "d2"), ("b2", "c2"),
]
FIG_SIGMA = {g: g[0].upper() for g in ("a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2")}


def fig_graph() -> RelationGraph:
    return RelationGraph([Gene(g, s) for g, s in FIG_SIGMA.items()], FIG_EDGES)


def test_cherry_labels_drive_single_edges():
    assert sorted(relation_graph_of(parse_dstree("(x,y)S;")).edges) == [("x", "y")]
    assert sorted(relation_graph_of(parse_dstree("(x,y)D;")).edges) == []


def test_worked_example_tree_displays_its_edge_list():
    tree = parse_dstree("((a1,b1,c1,d1)S,(a2,((b2,c2)S,d2)D)S)D;")
    assert relation_graph_of(tree, FIG_SIGMA) == fig_graph()


def test_worked_example_build_round_trips_over_all_pairs():
    graph = fig_graph()
    tree = build_least_resolved_dstree(graph)
    assert write_dstree(tree) == "((a1,b1,c1,d1)S,(a2,((b2,c2)S,d2)D)S)D;"
    assert tree.is_least_resolved()
    back = relation_graph_of(tree, FIG_SIGMA)
    genes = sorted(FIG_SIGMA)
    for i in range(len(genes)):
        for j in range(i + 1, len(genes)):
            assert back.has_edge(genes[i], genes[j]) == graph.has_edge(genes[i], genes[j])


def test_single_edge_builds_speciation_cherry():
    graph = RelationGraph([Gene("x", "X"), Gene("y", "Y")], [("x", "y")])
    assert write_dstree(build_least_resolved_dstree(graph)) == "(x,y)S;"


def test_p4_is_not_representable():
    graph = RelationGraph(
        [Gene(g, g.upper()) for g in "abcd"],
        [("a", "b"), ("b", "c"), ("c", "d")],
    )
    with pytest.raises(NotRepresentableError) as err:
        build_least_resolved_dstree(graph)
    a, b, c, d = err.value.obstruction
    assert graph.has_edge(a, b) and graph.has_edge(b, c) and graph.has_edge(c, d)
    assert not (graph.has_edge(a, c) or graph.has_edge(a, d) or graph.has_edge(b, d))


def test_l_contract_merges_same_label_arc():
    tree = parse_dstree("((a,b)S,c)S;")
    inner = [n for n in tree.internal_nodes() if n != tree.root][0]
    merged = l_contract(tree, tree.root, inner)
    assert write_dstree(merged) == "(a,b,c)S;"


def test_l_contract_rejects_label_mismatch_and_leaves():
    tree = parse_dstree("((a,b)D,c)S;")
    inner = [n for n in tree.internal_nodes() if n != tree.root][0]
    with pytest.raises(ValueError, match="labels differ"):
        l_contract(tree, tree.root, inner)
    with pytest.raises(ValueError):
        l_contract(tree, tree.root, "c")


def test_contraction_preserves_displayed_relations():
    rng = random.Random(23)
    for _ in range(100):
        genes = ["g%d" % i for i in range(rng.randint(3, 9))]
        tree = random_dstree(rng, genes)
        before = relation_graph_of(tree)
        arcs = [
            (n, c)
            for n in tree.internal_nodes()
            for c in tree.children(n)
            if not tree.is_leaf(c) and tree.label(c) == tree.label(n)
        ]
        if not arcs:
            continue
        contracted = l_contract(tree, *arcs[rng.randrange(len(arcs))])
        assert relation_graph_of(contracted) == before


def test_binary_tree_refines_to_itself_only():
    tree = parse_dstree("((a,b)D,c)S;")
    assert list(enumerate_binary_refinements(tree)) == [tree]


@pytest.mark.parametrize("degree,count", [(3, 3), (4, 15)])
def test_refinement_counts_for_one_multifurcation(degree, count):
    genes = ["g%d" % i for i in range(degree)]
    tree = DSTree.from_structure(("S", genes))
    refinements = list(enumerate_binary_refinements(tree))
    assert len(refinements) == count
    assert len(set(refinements)) == count
    for refined in refinements:
        assert refined.is_binary()
        assert relation_graph_of(refined) == relation_graph_of(tree)


def test_refinements_reduce_back_by_greedy_contraction():
    rng = random.Random(5)
    for _ in range(25):
        genes = ["g%d" % i for i in range(rng.randint(3, 7))]
        tree = random_dstree(rng, genes)
        least = contract_fully(tree)
        for refined in enumerate_binary_refinements(least):
            assert contract_fully(refined) == least


def test_uniqueness_on_random_cotrees():
    rng = random.Random(91)
    for _ in range(200):
        genes = ["g%d" % i for i in range(rng.randint(2, 10))]
        generating = contract_fully(random_dstree(rng, genes))
        graph = relation_graph_of(generating)
        rebuilt = build_least_resolved_dstree(graph)
        assert rebuilt == generating
        assert relation_graph_of(rebuilt) == graph


def test_planted_p4_graphs_are_rejected():
    rng = random.Random(17)
    for _ in range(50):
        graph = plant_p4(rng, rng.randint(4, 10))
        with pytest.raises(NotRepresentableError):
            build_least_resolved_dstree(graph)
