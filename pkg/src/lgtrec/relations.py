"""Relation graphs versus DS-trees: display, canonical construction, refinement.

A relation graph is representable by a DS-tree exactly when it is a cograph.
Construction follows the cotree recursion: a disconnected graph gets a
duplication root over its components, a graph with disconnected complement
gets a speciation root over its co-components, and anything else on two or
more vertices has an induced P4 and is rejected.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator, Mapping, Optional

from .model import DSTree, DUP, Gene, RelationGraph, SPEC


class NotRepresentableError(ValueError):
    """Raised when a relation graph admits no DS-tree; carries one induced P4."""

    def __init__(self, obstruction: tuple[str, str, str, str]):
        self.obstruction = obstruction
        super().__init__("no DS-tree displays this relation graph; induced path %s - %s - %s - %s" % obstruction)


def relation_graph_of(tree: DSTree, sigma: Optional[Mapping[str, str]] = None) -> RelationGraph:
    """The relation graph displayed by a DS-tree.

    A gene pair is an edge exactly when the label of its lowest common
    ancestor is a speciation.  When no species assignment is given, each
    gene is treated as its own species.
    """
    genes = tree.leaves()
    if sigma is None:
        sigma = {g: g for g in genes}
    edges = []
    for node in tree.internal_nodes():
        if tree.label(node) != SPEC:
            continue
        # pairs with lca at this node: leaves in two different child subtrees
        groups = [tree.subtree_leaves(c) for c in tree.children(node)]
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                for a in groups[i]:
                    for b in groups[j]:
                        edges.append((a, b))
    return RelationGraph([Gene(g, sigma[g]) for g in genes], edges)


def build_least_resolved_dstree(graph: RelationGraph) -> DSTree:
    """The unique least-resolved DS-tree displaying the graph.

    Raises NotRepresentableError (with an induced P4) when none exists.
    """
    genes = graph.gene_ids()
    if not genes:
        raise ValueError("relation graph has no genes")
    adjacency = {g: graph.neighbors(g) for g in genes}

    def recurse(vertices: tuple[str, ...]):
        if len(vertices) == 1:
            return vertices[0]
        parts = _components(vertices, adjacency, complement=False)
        if len(parts) > 1:
            return (DUP, [recurse(p) for p in parts])
        parts = _components(vertices, adjacency, complement=True)
        if len(parts) > 1:
            return (SPEC, [recurse(p) for p in parts])
        raise NotRepresentableError(_find_p4(vertices, adjacency))

    return DSTree.from_structure(recurse(genes))


def _components(vertices, adjacency, complement: bool):
    vset = set(vertices)
    unseen = set(vertices)
    parts = []
    while unseen:
        start = min(unseen)
        comp = {start}
        frontier = [start]
        unseen.discard(start)
        while frontier:
            v = frontier.pop()
            if complement:
                nxt = (vset - adjacency[v]) - comp - {v}
            else:
                nxt = (adjacency[v] & vset) - comp
            for w in nxt:
                comp.add(w)
                unseen.discard(w)
                frontier.append(w)
        parts.append(tuple(sorted(comp)))
    parts.sort(key=lambda p: p[0])
    return parts


def _find_p4(vertices, adjacency) -> tuple[str, str, str, str]:
    from itertools import combinations, permutations

    for quad in combinations(sorted(vertices), 4):
        for a, b, c, d in permutations(quad):
            if a > d:
                continue  # report each path once
            present = b in adjacency[a] and c in adjacency[b] and d in adjacency[c]
            absent = c not in adjacency[a] and d not in adjacency[a] and d not in adjacency[b]
            if present and absent:
                return (a, b, c, d)
    raise AssertionError("graph is not a cograph yet has no induced P4")


def l_contract(tree: DSTree, parent: str, child: str) -> DSTree:
    """Contract the arc parent->child when both are internal with equal labels."""
    if child not in tree or parent not in tree:
        raise ValueError("unknown node")
    if tree.parent(child) != parent:
        raise ValueError("%r is not the parent of %r" % (parent, child))
    if tree.is_leaf(parent) or tree.is_leaf(child):
        raise ValueError("contraction endpoints must be internal nodes")
    if tree.label(parent) != tree.label(child):
        raise ValueError(
            "cannot contract %s-%s arc: labels differ (%s vs %s)"
            % (parent, child, tree.label(parent), tree.label(child))
        )

    def rebuild(node: str):
        if tree.is_leaf(node):
            return node
        kids = []
        for c in tree.children(node):
            if c == child:
                kids.extend(rebuild(gc) for gc in tree.children(child))
            else:
                kids.append(rebuild(c))
        return (tree.label(node), kids)

    return DSTree.from_structure(rebuild(tree.root))


def contract_fully(tree: DSTree) -> DSTree:
    """Apply l-contractions until none is possible (the least-resolved form)."""
    while True:
        arc = None
        for node in tree.internal_nodes():
            for c in tree.children(node):
                if not tree.is_leaf(c) and tree.label(c) == tree.label(node):
                    arc = (node, c)
                    break
            if arc:
                break
        if arc is None:
            return tree
        tree = l_contract(tree, *arc)


def binary_shapes(items: tuple) -> list:
    """All rooted binary shapes over the given leaves, as nested pairs.

    Enumerated by inserting each leaf in turn at every position of every
    shape over the previous leaves; there are (2k-3)!! shapes for k leaves,
    each produced exactly once, in a fixed order.
    """
    if not items:
        raise ValueError("need at least one leaf")
    shapes = [items[0]]
    for item in items[1:]:
        grown = []
        for shape in shapes:
            grown.extend(_insert_everywhere(shape, item))
        shapes = grown
    return shapes


def _insert_everywhere(shape, item) -> list:
    out = [(shape, item)]
    if isinstance(shape, tuple):
        left, right = shape
        out.extend((new_left, right) for new_left in _insert_everywhere(left, item))
        out.extend((left, new_right) for new_right in _insert_everywhere(right, item))
    return out


def enumerate_binary_refinements(tree: DSTree) -> Iterator[DSTree]:
    """Yield every binary DS-tree that l-contracts back to the given tree.

    Each multifurcation is refined independently into a same-label binary
    subtree; the stream covers the product of the per-node shape choices in
    a fixed order and never repeats a tree.
    """
    multis = [n for n in tree.preorder() if not tree.is_leaf(n) and len(tree.children(n)) > 2]
    options = [binary_shapes(tuple(range(len(tree.children(n))))) for n in multis]
    for combo in product(*options):
        chosen = dict(zip(multis, combo))

        def rebuild(node: str):
            if tree.is_leaf(node):
                return node
            kids = [rebuild(c) for c in tree.children(node)]
            if node in chosen:
                def expand(shape):
                    if isinstance(shape, tuple):
                        return (tree.label(node), [expand(shape[0]), expand(shape[1])])
                    return kids[shape]

                return expand(chosen[node])
            return (tree.label(node), kids)

        yield DSTree.from_structure(rebuild(tree.root))
