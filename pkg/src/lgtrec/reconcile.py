"""Exact minimum-transfer reconciliation of DS-trees with LGT networks.

The solver runs a dynamic program over (tree node, network node) pairs,
leaves to root.  At each multifurcation every local binary refinement is
costed; at a fixed network node a speciation can be realized either at a
node with two principal children or, for one extra transfer, at the tail of
a secondary arc, while a duplication keeps both children in the reachable
set of the current node.  Connection costs between a child anchor and the
child's landing node are minimum secondary-arc counts.

Witness extraction replays recorded argmins into a concrete binary
refinement plus a reconciliation whose paths are realized minimum-transfer
network paths.  Ties are resolved by smaller refinement index, then smaller
(s1, s2) node-id pair, then the unswapped child order, so witnesses are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .model import (
    DSTree,
    DUP,
    EXTANT,
    INF,
    LGTNetwork,
    Reconciliation,
    SECONDARY,
    SPEC,
    TRANSFER,
    TransferDistances,
    step_event,
)
from .netops import realize_path, transfer_distances
from .relations import binary_shapes


class DegreeTooLargeError(ValueError):
    def __init__(self, node: str, degree: int, limit: int):
        self.node = node
        self.degree = degree
        super().__init__(
            "node %r has degree %d, above the configured cap %d; "
            "the number of local binary refinements grows as 2^(2k)" % (node, degree, limit)
        )


class InfeasibleError(ValueError):
    """The DS-tree admits no reconciliation with the network."""


class LocalRefinement:
    """One rooted binary topology over a multifurcation's children.

    Stored as nested pairs of child handles plus a flattened postorder node
    list: leaves are handle strings, internal nodes are (left, right) index
    pairs, the root is the last entry.
    """

    def __init__(self, label: str, shape):
        self.label = label
        self.shape = shape
        self.nodes: list = []

        def walk(s) -> int:
            if isinstance(s, tuple):
                left = walk(s[0])
                right = walk(s[1])
                self.nodes.append((left, right))
            else:
                self.nodes.append(s)
            return len(self.nodes) - 1

        self.root_index = walk(shape)

    def is_handle(self, idx: int) -> bool:
        return isinstance(self.nodes[idx], str)

    def internal_indices(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if isinstance(n, tuple)]

    def __repr__(self):
        return "LocalRefinement(%s, %r)" % (self.label, self.shape)


def enumerate_lbrs(children, label: str) -> list[LocalRefinement]:
    """All local binary refinements over the given child handles, in a fixed order."""
    handles = tuple(children)
    if len(handles) < 2:
        raise ValueError("a local refinement needs at least 2 children")
    return [LocalRefinement(label, shape) for shape in binary_shapes(handles)]


def reconcile_lbr(
    refinement: LocalRefinement,
    net: LGTNetwork,
    s: str,
    leaf_costs: Mapping[str, Mapping[str, int]],
    dist: TransferDistances,
):
    """Minimum transfers to reconcile one local refinement with its root at s.

    leaf_costs maps each handle to its finite (network node -> cost) entries.
    This is the direct statement of the per-case minimization; the main
    solver computes the same quantities with a shared relaxation pass.
    """
    tables: dict[int, dict[str, int]] = {}

    def costs_of(idx: int) -> Mapping[str, int]:
        node = refinement.nodes[idx]
        return leaf_costs[node] if isinstance(node, str) else tables[idx]

    def anchored_min(costs: Mapping[str, int], anchor: str):
        best = INF
        for x, c in costs.items():
            v = c + dist.get(anchor, x)
            if v < best:
                best = v
        return best

    for idx in refinement.internal_indices():
        left, right = refinement.nodes[idx]
        cl, cr = costs_of(left), costs_of(right)
        table: dict[str, int] = {}
        for sp in net.nodes:
            if refinement.label == DUP:
                value = anchored_min(cl, sp) + anchored_min(cr, sp)
            else:
                pch = net.principal_children(sp)
                sec = net.secondary_head(sp)
                if len(pch) == 2:
                    a, b = pch
                    value = min(
                        anchored_min(cl, a) + anchored_min(cr, b),
                        anchored_min(cr, a) + anchored_min(cl, b),
                    )
                elif sec is not None:
                    value = 1 + min(
                        anchored_min(cl, sp) + anchored_min(cr, sec),
                        anchored_min(cr, sp) + anchored_min(cl, sec),
                    )
                else:
                    value = INF
            if value < INF:
                table[sp] = value
        tables[idx] = table
    return tables[refinement.root_index].get(s, INF)


# -- solver internals ----------------------------------------------------------


@dataclass(frozen=True)
class _Choice:
    case: str  # terminal event realized at this node: S, T or D
    parts: tuple  # ((child_idx_or_handle, anchor, target), (child_idx_or_handle, anchor, target))


def _relax(net: LGTNetwork, topo, base: Mapping[str, int]):
    """For every anchor a: min over x of base[x] + t(a, x), with smallest-id argmin.

    Computed as a min-plus relaxation over out-arcs in reverse topological
    order (principal arcs cost 0, secondary arcs cost 1).
    """
    mval: dict[str, float] = {}
    marg: dict[str, str] = {}
    for a in reversed(topo):
        bv = base.get(a, INF)
        ba = a
        for head, kind in net.out_arcs(a):
            cand = mval[head] + (1 if kind == SECONDARY else 0)
            if cand < bv or (cand == bv and marg[head] < ba):
                bv = cand
                ba = marg[head]
        mval[a] = bv
        marg[a] = ba
    return mval, marg


def _lbr_engine(refinement, net, topo, leaf_costs, record, handle_relaxations=None):
    """Cost table of one local refinement for every root placement at once.

    handle_relaxations may carry precomputed relaxations for the leaf
    handles; they only depend on the handle costs, so one refinement's
    results are reusable for every sibling refinement.
    """
    tables: dict[int, dict[str, int]] = {}
    choices: dict[int, dict[str, _Choice]] = {}
    relaxed: dict[int, tuple] = {}

    def relaxation(idx: int):
        got = relaxed.get(idx)
        if got is None:
            node = refinement.nodes[idx]
            if isinstance(node, str):
                if handle_relaxations is not None:
                    got = handle_relaxations.setdefault(node, _relax(net, topo, leaf_costs[node]))
                else:
                    got = _relax(net, topo, leaf_costs[node])
            else:
                got = _relax(net, topo, tables[idx])
            relaxed[idx] = got
        return got

    for idx in refinement.internal_indices():
        left, right = refinement.nodes[idx]
        lval, larg = relaxation(left)
        rval, rarg = relaxation(right)
        table: dict[str, int] = {}
        chosen: dict[str, _Choice] = {}
        for sp in net.nodes:
            if refinement.label == DUP:
                cost = lval[sp] + rval[sp]
                if cost < INF:
                    table[sp] = cost
                    if record:
                        chosen[sp] = _Choice(
                            DUP,
                            ((left, sp, larg[sp]), (right, sp, rarg[sp])),
                        )
                continue
            pch = net.principal_children(sp)
            sec = net.secondary_head(sp)
            if len(pch) == 2:
                case, a, b, extra = SPEC, pch[0], pch[1], 0
            elif sec is not None:
                case, a, b, extra = TRANSFER, sp, sec, 1
            else:
                continue
            best = None  # (cost, s1, s2, swap)
            for swap in (False, True):
                v1, g1, arg1 = (rval, right, rarg) if swap else (lval, left, larg)
                v2, g2, arg2 = (lval, left, larg) if swap else (rval, right, rarg)
                cost = extra + v1[a] + v2[b]
                if cost == INF:
                    continue
                key = (cost, arg1[a], arg2[b], swap)
                if best is None or key < best[0]:
                    best = (key, g1, g2)
            if best is not None:
                (cost, s1, s2, _swap), g1, g2 = best
                table[sp] = cost
                if record:
                    chosen[sp] = _Choice(case, ((g1, a, s1), (g2, b, s2)))
        tables[idx] = table
        if record:
            choices[idx] = chosen
    return tables, choices


def _check_inputs(tree: DSTree, net: LGTNetwork, sigma: Mapping[str, str], max_degree: int):
    for node in tree.internal_nodes():
        degree = len(tree.children(node))
        if degree > max_degree:
            raise DegreeTooLargeError(node, degree, max_degree)
    species = set(net.leaf_species.values())
    for leaf in tree.leaves():
        if leaf not in sigma:
            raise ValueError("gene %r has no species assignment" % leaf)
        if sigma[leaf] not in species:
            raise ValueError("species %r of gene %r is not a network leaf" % (sigma[leaf], leaf))


def _run_dp(tree, net, sigma, max_degree, record):
    _check_inputs(tree, net, sigma, max_degree)
    topo = net.topological_order()
    if topo is None:
        raise ValueError("network has a directed cycle")
    f: dict[str, dict[str, int]] = {}
    chosen_lbr: dict[str, dict[str, int]] = {}
    records: dict[tuple[str, int], tuple] = {}
    for g in tree.postorder():
        if tree.is_leaf(g):
            f[g] = {net.species_leaf(sigma[g]): 0}
            continue
        refinements = enumerate_lbrs(tree.children(g), tree.label(g))
        best: dict[str, tuple[int, int]] = {}
        shared_relaxations: dict[str, tuple] = {}
        for idx, refinement in enumerate(refinements):
            tables, choices = _lbr_engine(refinement, net, topo, f, record, shared_relaxations)
            if record:
                records[(g, idx)] = (refinement, choices)
            for sp, cost in tables[refinement.root_index].items():
                cur = best.get(sp)
                if cur is None or (cost, idx) < cur:
                    best[sp] = (cost, idx)
        f[g] = {sp: cost for sp, (cost, idx) in best.items()}
        chosen_lbr[g] = {sp: idx for sp, (cost, idx) in best.items()}
    return f, chosen_lbr, records


def min_transfer_cost(tree: DSTree, net: LGTNetwork, sigma: Mapping[str, str], max_degree: int = 8):
    """Minimum transfers over all binary refinements and reconciliations, or INF."""
    f, _, _ = _run_dp(tree, net, sigma, max_degree, record=False)
    return min(f[tree.root].values(), default=INF)


@dataclass(frozen=True)
class Witness:
    refined: DSTree
    reconciliation: Reconciliation
    cost: int


class _WitNode:
    __slots__ = ("label", "children", "path", "events")

    def __init__(self, label, children, path, events):
        self.label = label
        self.children = children
        self.path = path
        self.events = events


def extract_witness(tree: DSTree, net: LGTNetwork, sigma: Mapping[str, str], max_degree: int = 8) -> Witness:
    """A minimum-transfer witness: a binary refinement plus a valid reconciliation.

    Raises InfeasibleError when the tree is not reconcilable with the network.
    """
    f, chosen_lbr, records = _run_dp(tree, net, sigma, max_degree, record=True)
    root_costs = f[tree.root]
    if not root_costs:
        raise InfeasibleError("the DS-tree is not reconcilable with this network")
    cost, s_star = min((c, sp) for sp, c in root_costs.items())
    dist = transfer_distances(net)

    def events_for(path, terminal):
        labels = [step_event(net, path[i], path[i + 1]) for i in range(len(path) - 1)]
        labels.append(terminal)
        return tuple(labels)

    def realize(g: str, sp: str, anchor: str):
        path = realize_path(net, dist, anchor, sp)
        if tree.is_leaf(g):
            return _WitNode(None, [g], path, events_for(path, EXTANT))
        refinement, choices = records[(g, chosen_lbr[g][sp])]

        def realize_lbr(idx: int, s_here: str, anchor_here: str):
            node = refinement.nodes[idx]
            if isinstance(node, str):
                return realize(node, s_here, anchor_here)
            choice = choices[idx][s_here]
            kids = [realize_lbr(ci, target, anch) for ci, anch, target in choice.parts]
            p = realize_path(net, dist, anchor_here, s_here)
            return _WitNode(refinement.label, kids, p, events_for(p, choice.case))

        return realize_lbr(refinement.root_index, sp, anchor)

    root = realize(tree.root, s_star, s_star)

    # canonical ids: sort children by smallest leaf, then number internals in preorder
    def min_leaf(node) -> str:
        if node.label is None:
            return node.children[0]
        return min(min_leaf(c) for c in node.children)

    def sort_children(node):
        if node.label is not None:
            for c in node.children:
                sort_children(c)
            node.children.sort(key=min_leaf)

    sort_children(root)
    alpha: dict[str, tuple] = {}
    events: dict[str, tuple] = {}
    counter = [0]

    def emit(node) -> object:
        if node.label is None:
            gene = node.children[0]
            alpha[gene] = node.path
            events[gene] = node.events
            return gene
        node_id = "@%d" % counter[0]
        counter[0] += 1
        alpha[node_id] = node.path
        events[node_id] = node.events
        return (node.label, [emit(c) for c in node.children])

    structure = emit(root)
    refined = DSTree.from_structure(structure)
    return Witness(refined, Reconciliation(alpha, events), int(cost))
