"""Independent validation of reconciliations, case by case.

The verifier re-derives every judgment from the network's arcs and the
event labels alone; it shares nothing with the solver.  A reconciliation is
valid when every path is a real directed path, every (node, step) pair
satisfies exactly the event named for it, and every internal tree node's
terminal event agrees with its S/D label (transfers are allowed for both).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .model import (
    DSTree,
    DUP,
    EXTANT,
    LGTNetwork,
    NO_EVENT,
    PRINCIPAL,
    Reconciliation,
    RelationGraph,
    SECONDARY,
    SPEC,
    SPEC_LOSS,
    TRANSFER,
    TRANSFER_LOSS,
)
from .relations import relation_graph_of


@dataclass(frozen=True)
class Finding:
    node: str
    index: Optional[int]  # 1-based step, None for node-level rules
    rule: str
    detail: str

    def __str__(self):
        where = "%s[%d]" % (self.node, self.index) if self.index is not None else self.node
        return "%s: %s (%s)" % (where, self.detail, self.rule)


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    transfer_count: int
    violations: tuple[Finding, ...]


def verify_reconciliation(
    refined: DSTree,
    net: LGTNetwork,
    recon: Reconciliation,
    sigma: Mapping[str, str],
) -> VerificationReport:
    bad: list[Finding] = []

    tree_nodes = set(refined.node_ids())
    mapped = set(recon.alpha)
    for node in sorted(tree_nodes - mapped):
        bad.append(Finding(node, None, "coverage", "tree node has no path"))
    for node in sorted(mapped - tree_nodes):
        bad.append(Finding(node, None, "coverage", "path for unknown tree node"))

    for node in refined.internal_nodes():
        if len(refined.children(node)) != 2:
            bad.append(Finding(node, None, "structure", "reconciled trees must be binary"))

    if bad:
        return VerificationReport(False, recon.transfer_count, tuple(bad))

    # paths must follow arcs; unknown network ids are structural errors
    broken: set[str] = set()
    for node in sorted(recon.alpha):
        path = recon.alpha[node]
        for x in path:
            if x not in net:
                bad.append(Finding(node, None, "structure", "unknown network node %r" % x))
                broken.add(node)
        if node in broken:
            continue
        for i in range(len(path) - 1):
            if net.arc_kind(path[i], path[i + 1]) is None:
                bad.append(Finding(node, i + 1, "path", "no arc %s -> %s" % (path[i], path[i + 1])))
                broken.add(node)

    for node in sorted(recon.alpha):
        if node in broken:
            continue
        path = recon.alpha[node]
        labels = recon.events[node]
        for i in range(len(path) - 1):
            x, y = path[i], path[i + 1]
            kind = net.arc_kind(x, y)
            ev = labels[i]
            if ev == TRANSFER_LOSS:
                if kind != SECONDARY:
                    bad.append(Finding(node, i + 1, "transfer-loss", "TL step must take a secondary arc"))
            elif ev == SPEC_LOSS:
                if kind != PRINCIPAL or len(net.principal_children(x)) != 2:
                    bad.append(Finding(node, i + 1, "spec-loss", "SL step needs two principal out-arcs at %s" % x))
            elif ev == NO_EVENT:
                if kind != PRINCIPAL or len(net.principal_children(x)) != 1:
                    bad.append(Finding(node, i + 1, "no-event", "bare step must take the only principal out-arc of %s" % x))
            else:
                bad.append(Finding(node, i + 1, "events", "%r cannot label a non-final step" % ev))

        x = path[-1]
        ev = labels[-1]
        last_index = len(path)
        if refined.is_leaf(node):
            if ev != EXTANT:
                bad.append(Finding(node, last_index, "extant leaf", "leaf must end in an extant event"))
            elif not net.is_leaf(x) or net.leaf_species.get(x) != sigma.get(node):
                bad.append(Finding(node, last_index, "extant leaf", "gene %r must end at the leaf of species %r" % (node, sigma.get(node))))
            continue
        if ev == EXTANT:
            bad.append(Finding(node, last_index, "events", "internal node cannot be extant"))
            continue
        left, right = refined.children(node)
        if left in broken or right in broken:
            continue
        first_left = recon.alpha[left][0]
        first_right = recon.alpha[right][0]
        if ev == SPEC:
            pch = net.principal_children(x)
            if len(pch) != 2 or len(net.out_arcs(x)) != 2:
                bad.append(Finding(node, last_index, "speciation", "S event needs two principal children at %s" % x))
            elif {first_left, first_right} != set(pch):
                bad.append(Finding(node, last_index, "speciation", "children must start at the two children of %s" % x))
        elif ev == DUP:
            if not (first_left == x and first_right == x):
                bad.append(Finding(node, last_index, "duplication", "both children must start at %s" % x))
        elif ev == TRANSFER:
            head = net.secondary_head(x)
            if head is None:
                bad.append(Finding(node, last_index, "transfer", "%s is not the tail of a secondary arc" % x))
            elif not (
                (first_left == x and first_right == head)
                or (first_right == x and first_left == head)
            ):
                bad.append(
                    Finding(node, last_index, "transfer", "one child must start at %s and the other at %s" % (x, head))
                )
        label = refined.label(node)
        if label == SPEC and ev not in (SPEC, TRANSFER):
            bad.append(Finding(node, last_index, "label compatibility", "speciation node ended with %r" % ev))
        elif label == DUP and ev not in (DUP, TRANSFER):
            bad.append(Finding(node, last_index, "label compatibility", "duplication node ended with %r" % ev))

    return VerificationReport(not bad, recon.transfer_count, tuple(bad))


def check_displays(refined: DSTree, recon: Reconciliation, graph: RelationGraph) -> bool:
    """Whether a label-respecting witness displays the relation graph.

    Once the witness respects the S/D labels (transfers reinterpreted to the
    label at their node), displaying reduces to the refined tree showing the
    same orthology edges as the graph.
    """
    if set(refined.leaves()) != set(graph.gene_ids()):
        return False
    return relation_graph_of(refined, graph.sigma).edges == graph.edges
