"""Transfer-highway construction on bare species trees.

Any binary DS-tree can be reconciled with any species tree once enough
donor/receiver highways are stacked onto the pendant arcs: one highway per
ordered species pair per depth round, rounds 0 .. h(D)+1.  The witness makes
every internal tree node a transfer at a donor node of its depth, routing
the two subtrees to depth+1 donors (the left child through the receiver
side, the right child down the donor side).
"""

from __future__ import annotations

from typing import Mapping

from .model import (
    DSTree,
    EXTANT,
    LGTNetwork,
    NetworkBuilder,
    Reconciliation,
    RelationGraph,
    TRANSFER,
    step_event,
)
from .relations import build_least_resolved_dstree, NotRepresentableError


def _donor(i: int, j: int, d: int) -> str:
    return "don_%d_%d_%d" % (i, j, d)


def _receiver(j: int, i: int, d: int) -> str:
    return "recv_%d_%d_%d" % (j, i, d)


def construct_network(tree: DSTree, species_tree: LGTNetwork) -> LGTNetwork:
    """Augment a species tree with (h(D)+2) * m * (m-1) stacked highways.

    Species are ordered lexicographically.  Each subdivision lands directly
    above a leaf, so earlier rounds sit higher on the pendant arc and every
    depth-d node keeps a principal descent to all depth-(d+1) donors below.
    """
    if species_tree.secondary_arcs():
        raise ValueError("the base species tree must not already carry secondary arcs")
    species = sorted(species_tree.species())
    if len(species) < 2:
        raise ValueError("need at least 2 species")
    builder = NetworkBuilder.from_network(species_tree)
    leaf_node = {idx + 1: species_tree.species_leaf(sp) for idx, sp in enumerate(species)}
    m = len(species)
    for d in range(tree.height() + 2):
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                if j == i:
                    continue
                builder.subdivide_above(leaf_node[i], _donor(i, j, d))
                builder.subdivide_above(leaf_node[j], _receiver(j, i, d))
                builder.add_arc(_donor(i, j, d), _receiver(j, i, d), "secondary")
    return builder.build()


def build_s_witness(tree: DSTree, net: LGTNetwork, sigma: Mapping[str, str]) -> Reconciliation:
    """A witness reconciliation for a binary DS-tree on its highway network.

    Every internal node v becomes a transfer at don(i, j, depth(v)); the
    transfer count is not minimized, only guaranteed finite.
    """
    if not tree.is_binary():
        raise ValueError("the witness construction needs a binary DS-tree")
    species = sorted(net.species())
    index = {sp: k + 1 for k, sp in enumerate(species)}
    leaf_node = {k + 1: net.species_leaf(sp) for k, sp in enumerate(species)}

    def descend(top: str, bottom: str) -> list[str]:
        # unique principal path, found by climbing parent links
        path = [bottom]
        node = bottom
        while node != top:
            node = net.principal_parent(node)
            if node is None:
                raise AssertionError("%s is not a principal ancestor of %s" % (top, bottom))
            path.append(node)
        path.reverse()
        return path

    def via_highway(start: str, stack_index: int, target_index: int, d: int) -> list[str]:
        # from a node on the stack_index pendant down to the target species leaf
        if target_index == stack_index:
            return descend(start, leaf_node[stack_index])
        path = descend(start, _donor(stack_index, target_index, d + 1))
        path.append(_receiver(target_index, stack_index, d + 1))
        path.extend(descend(path[-1], leaf_node[target_index])[1:])
        return path

    alpha: dict[str, tuple] = {}
    events: dict[str, tuple] = {}

    def record(node: str, path: list[str], terminal: str):
        alpha[node] = tuple(path)
        labels = [step_event(net, path[k], path[k + 1]) for k in range(len(path) - 1)]
        labels.append(terminal)
        events[node] = tuple(labels)

    def realize(v: str, i: int, j: int, d: int, path: list[str]):
        record(v, path, TRANSFER)
        left, right = tree.children(v)
        receiver_start = _receiver(j, i, d)
        donor_start = _donor(i, j, d)
        if tree.is_leaf(left) and tree.is_leaf(right):
            record(left, via_highway(receiver_start, j, index[sigma[left]], d), EXTANT)
            record(right, via_highway(donor_start, i, index[sigma[right]], d), EXTANT)
        elif tree.is_leaf(left) or tree.is_leaf(right):
            leaf, internal = (left, right) if tree.is_leaf(left) else (right, left)
            record(leaf, via_highway(receiver_start, j, index[sigma[leaf]], d), EXTANT)
            realize(internal, i, j, d + 1, descend(donor_start, _donor(i, j, d + 1)))
        else:
            realize(left, j, i, d + 1, descend(receiver_start, _donor(j, i, d + 1)))
            realize(right, i, j, d + 1, descend(donor_start, _donor(i, j, d + 1)))

    if tree.is_leaf(tree.root):
        gene = tree.root
        record(gene, [net.species_leaf(sigma[gene])], EXTANT)
    else:
        realize(tree.root, 1, 2, 0, [_donor(1, 2, 0)])
    return Reconciliation(alpha, events)


def decide_s_consistency(graph: RelationGraph, species_tree: LGTNetwork) -> bool:
    """A relation graph fits some highway network over S iff it has a DS-tree."""
    if len(species_tree.leaves()) < 2:
        raise ValueError("the species tree must have more than one leaf")
    try:
        build_least_resolved_dstree(graph)
        return True
    except NotRepresentableError:
        return False
