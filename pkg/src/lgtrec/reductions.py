"""Hardness-reduction instance generators and their brute-force oracles.

Three pipelines: multicolored clique to antichain-on-trees, antichain-on-trees
to network consistency, and feedback arc set to species-tree consistency with
a transfer budget.  The generators emit real instances for the solvers and
the verifier; the oracles solve the source problems exhaustively so each
stage can be cross-checked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .formats import SemanticFormatError, _load_json
from .model import (
    DSTree,
    DUP,
    EXTANT,
    INF,
    LGTNetwork,
    NetworkBuilder,
    PRINCIPAL,
    Reconciliation,
    SECONDARY,
    SPEC,
    TRANSFER,
    step_event,
)


class BoundExceededError(ValueError):
    pass


class NotAFeedbackArcSetError(ValueError):
    pass


# -- plain rooted trees (for antichain instances) -------------------------------


class PlainTree:
    """A rooted tree given by a children map; nodes are arbitrary ids."""

    def __init__(self, root: str, children: Mapping[str, Sequence[str]]):
        self.root = root
        self._children = {node: tuple(kids) for node, kids in children.items()}
        self._parent: dict[str, str] = {}
        for node, kids in self._children.items():
            for kid in kids:
                if kid in self._parent:
                    raise ValueError("node %r has two parents" % kid)
                self._parent[kid] = node
        if root in self._parent:
            raise ValueError("root %r has a parent" % root)
        self._depth = {root: 0}
        order = [root]
        seen = {root}
        while order:
            node = order.pop()
            for kid in self._children.get(node, ()):
                if kid in seen:
                    raise ValueError("node %r reached twice" % kid)
                seen.add(kid)
                self._depth[kid] = self._depth[node] + 1
                order.append(kid)
        declared = set(self._children) | set(self._parent) | {root}
        if declared - seen:
            raise ValueError("nodes not reachable from the root: %s" % sorted(declared - seen))

    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self._depth))

    def children(self, node: str) -> tuple[str, ...]:
        return self._children.get(node, ())

    def parent(self, node: str) -> Optional[str]:
        return self._parent.get(node)

    def is_leaf(self, node: str) -> bool:
        return not self.children(node)

    def depth(self, node: str) -> int:
        return self._depth[node]

    def is_ancestor(self, a: str, b: str) -> bool:
        """True when a lies on the root path of b (including a == b)."""
        while self._depth[b] > self._depth[a]:
            b = self._parent[b]
        return a == b

    def comparable(self, a: str, b: str) -> bool:
        return self.is_ancestor(a, b) or self.is_ancestor(b, a)

    def __contains__(self, node: str) -> bool:
        return node in self._depth


# -- instance types --------------------------------------------------------------


@dataclass(frozen=True)
class MCCInstance:
    """A graph partitioned into color classes, asking for a rainbow clique."""

    classes: tuple[tuple[str, ...], ...]
    edges: frozenset  # of 2-element frozensets

    @staticmethod
    def create(classes: Iterable[Iterable[str]], edges: Iterable[tuple[str, str]]) -> "MCCInstance":
        cls = tuple(tuple(c) for c in classes)
        if not cls or any(not c for c in cls):
            raise ValueError("need at least one non-empty color class")
        seen: set[str] = set()
        for group in cls:
            for v in group:
                if v in seen:
                    raise ValueError("vertex %r appears twice" % v)
                seen.add(v)
        edge_set = set()
        for a, b in edges:
            if a == b:
                raise ValueError("self-loop on %r" % a)
            if a not in seen or b not in seen:
                raise ValueError("edge endpoint %r not a vertex" % (a if a not in seen else b))
            edge_set.add(frozenset((a, b)))
        return MCCInstance(cls, frozenset(edge_set))

    @property
    def k(self) -> int:
        return len(self.classes)

    def vertices(self) -> tuple[str, ...]:
        return tuple(v for group in self.classes for v in group)

    def adjacent(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.edges

    def class_index(self, v: str) -> int:
        for i, group in enumerate(self.classes):
            if v in group:
                return i
        raise KeyError(v)


@dataclass(frozen=True)
class ACTInstance:
    """Place each element on a tree node, pairwise incomparably, at finite cost."""

    tree: PlainTree
    elements: tuple[str, ...]
    weights: Mapping  # (element, node) -> finite cost; absent pairs cost INF

    @staticmethod
    def create(tree: PlainTree, elements: Iterable[str], weights: Mapping) -> "ACTInstance":
        elems = tuple(elements)
        if len(set(elems)) != len(elems):
            raise ValueError("duplicate element")
        table = {}
        for (x, v), cost in weights.items():
            if x not in elems:
                raise ValueError("weight for unknown element %r" % x)
            if v not in tree:
                raise ValueError("weight on unknown node %r" % v)
            if cost == INF:
                continue
            if not isinstance(cost, int) or cost < 0:
                raise ValueError("weights must be naturals or INF")
            table[(x, v)] = cost
        return ACTInstance(tree, elems, table)

    def weight(self, x: str, v: str):
        return self.weights.get((x, v), INF)

    def finite_nodes(self, x: str) -> list[tuple[str, int]]:
        out = [(v, c) for (y, v), c in self.weights.items() if y == x]
        out.sort(key=lambda pair: (pair[1], pair[0]))
        return out

    def restricted_violations(self) -> list[str]:
        """Empty when the instance satisfies the restricted form."""
        problems = []
        for (x, v), cost in sorted(self.weights.items()):
            if cost not in (0, 1):
                problems.append("w(%s, %s) = %d is not in {0, 1}" % (x, v, cost))
        zero_nodes: dict[str, list[str]] = {x: [] for x in self.elements}
        for (x, v), cost in self.weights.items():
            if cost == 0:
                zero_nodes[x].append(v)
        for x in self.elements:
            if len(zero_nodes[x]) != 1:
                problems.append("element %s has %d zero-cost nodes" % (x, len(zero_nodes[x])))
        zeros = {v: x for x, nodes in zero_nodes.items() for v in nodes}
        for (x, v), _cost in sorted(self.weights.items()):
            if v in zeros and zeros[v] != x:
                problems.append("node %s is zero-cost for %s but finite for %s" % (v, zeros[v], x))
        for x in self.elements:
            finite = [v for v, _ in self.finite_nodes(x)]
            for a, b in combinations(sorted(finite), 2):
                if self.tree.comparable(a, b):
                    problems.append("element %s has comparable options %s and %s" % (x, a, b))
        return problems


@dataclass(frozen=True)
class FASInstance:
    """A simple digraph with a feedback-arc budget."""

    vertices: tuple[str, ...]
    arcs: tuple[tuple[str, str], ...]
    k: int

    @staticmethod
    def create(vertices: Iterable[str], arcs: Iterable[tuple[str, str]], k: int) -> "FASInstance":
        verts = tuple(vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertex")
        arc_list = []
        seen = set()
        for a, b in arcs:
            if a == b:
                raise ValueError("self-loop on %r" % a)
            if a not in verts or b not in verts:
                raise ValueError("arc endpoint %r not a vertex" % (a if a not in verts else b))
            if (a, b) in seen:
                raise ValueError("parallel arc %s -> %s" % (a, b))
            seen.add((a, b))
            arc_list.append((a, b))
        if k < 0:
            raise ValueError("budget must be a natural")
        return FASInstance(verts, tuple(arc_list), k)


@dataclass(frozen=True)
class NCInstance:
    """A network-consistency instance: DS-tree, network and species assignment."""

    dstree: DSTree
    network: LGTNetwork
    sigma: Mapping[str, str]


@dataclass(frozen=True)
class TMSTCInstance:
    """A species-tree consistency instance with a transfer budget."""

    dstree: DSTree
    species_tree: LGTNetwork
    sigma: Mapping[str, str]
    transfer_budget: int


# -- multicolored clique -> antichain on trees -----------------------------------


def mcc_to_act(instance: MCCInstance) -> ACTInstance:
    """Gadget forest: Start, Choose_v and Cover_v subtrees plus class counters.

    Elements: one start element, one per class, one per vertex, one counter
    per vertex and one (vertex, other-class) pair element.  Every element has
    one zero-cost "in" node and unit-cost escape nodes; a finite-cost
    incomparable assignment exists exactly when a rainbow clique does.
    """
    k = instance.k
    children: dict[str, list[str]] = {"root": []}
    elements: list[str] = []
    weights: dict[tuple[str, str], int] = {}

    def subtree(root_name: str, kids: list[str]):
        children["root"].append(root_name)
        children[root_name] = kids

    subtree("s_in", ["class_%d_in" % (i + 1) for i in range(k)])
    elements.append("s")
    weights[("s", "s_in")] = 0
    for i in range(k):
        elements.append("class_%d" % (i + 1))
        weights[("class_%d" % (i + 1), "class_%d_in" % (i + 1))] = 0

    vertices = instance.vertices()
    for v in vertices:
        i = instance.class_index(v)
        choose = ["class_%d_out_%s" % (i + 1, v)]
        weights[("class_%d" % (i + 1), "class_%d_out_%s" % (i + 1, v))] = 1
        for u in vertices:
            if instance.class_index(u) != i and instance.adjacent(u, v):
                choose.append("%s_to_%d_out_%s" % (u, i + 1, v))
                weights[("%s_to_%d" % (u, i + 1), "%s_to_%d_out_%s" % (u, i + 1, v))] = 1
        subtree("%s_in" % v, choose)
        elements.append(v)
        weights[(v, "%s_in" % v)] = 0
        weights[(v, "%s_out" % v)] = 1

        cover = ["count_%s_in" % v]
        for j in range(k):
            if j != i:
                cover.append("%s_to_%d_in" % (v, j + 1))
        subtree("%s_out" % v, cover)
        elements.append("count_%s" % v)
        weights[("count_%s" % v, "count_%s_in" % v)] = 0
        weights[("count_%s" % v, "count_%d_out" % (i + 1))] = 1
        for j in range(k):
            if j != i:
                elements.append("%s_to_%d" % (v, j + 1))
                weights[("%s_to_%d" % (v, j + 1), "%s_to_%d_in" % (v, j + 1))] = 0

    for i in range(k):
        subtree("count_%d_out" % (i + 1), [])

    if len(set(elements)) != len(elements):
        raise ValueError("vertex names collide with generated element names")
    tree = PlainTree("root", children)
    return ACTInstance.create(tree, elements, weights)


def solve_act_bruteforce(instance: ACTInstance, max_elements: int = 12):
    """Minimum weight of an incomparable assignment, or INF; exhaustive search.

    Elements are placed one at a time over their finite-support nodes, in
    fewest-options-first order; a branch dies as soon as a placement is
    comparable with an earlier one or cannot beat the best complete
    assignment found so far.
    """
    if len(instance.elements) > max_elements:
        raise BoundExceededError(
            "instance has %d elements, above the bound %d" % (len(instance.elements), max_elements)
        )
    options = {x: instance.finite_nodes(x) for x in instance.elements}
    if any(not opts for opts in options.values()):
        return INF
    order = sorted(instance.elements, key=lambda x: (len(options[x]), x))
    tree = instance.tree
    chosen: list[str] = []
    best = [INF]

    def search(i: int, total: int):
        if total >= best[0]:
            return
        if i == len(order):
            best[0] = total
            return
        for node, cost in options[order[i]]:
            if any(tree.comparable(node, earlier) for earlier in chosen):
                continue
            chosen.append(node)
            search(i + 1, total + cost)
            chosen.pop()

    search(0, 0)
    return best[0]


# -- antichain on trees -> network consistency ------------------------------------


def act_to_nc(instance: ACTInstance) -> NCInstance:
    """Duplication cherries under a speciation root versus a doubled-leaf network.

    The tree is binarized, every node v grows leaf descendants spec_v_left
    and spec_v_right under different children, and each unit-cost pair
    (x, v) becomes two secondary arcs feeding the zero-cost node's leaves.
    Requires the restricted form.
    """
    problems = instance.restricted_violations()
    if problems:
        raise ValueError("instance is not in restricted form: " + "; ".join(problems))

    children = {node: list(instance.tree.children(node)) for node in instance.tree.nodes()}
    fresh = 0
    for node in sorted(instance.tree.nodes()):
        kids = children[node]
        if len(kids) == 1:
            pad = "pad_%s" % node
            if pad in children:
                raise ValueError("node name %r collides with a padding leaf" % pad)
            children[node] = [kids[0], pad]
            children[pad] = []
        elif len(kids) > 2:
            ordered = sorted(kids)
            spine = node
            while len(ordered) > 2:
                stem = "bin_%d_%s" % (fresh, node)
                fresh += 1
                if stem in children:
                    raise ValueError("node name %r collides with a binarization node" % stem)
                children[spine] = [ordered[0], stem]
                children[stem] = []
                spine = stem
                ordered = ordered[1:]
            children[spine] = ordered

    builder = NetworkBuilder()
    builder.add_node("spec_%s" % instance.tree.root)
    builder.root = "spec_%s" % instance.tree.root
    stack = [instance.tree.root]
    base_nodes = []
    while stack:
        node = stack.pop()
        base_nodes.append(node)
        for kid in children[node]:
            builder.add_node("spec_%s" % kid)
            builder.add_arc("spec_%s" % node, "spec_%s" % kid, PRINCIPAL)
            stack.append(kid)

    def leaves_below(start: str) -> list[str]:
        out = []
        frontier = [start]
        while frontier:
            cur = frontier.pop()
            heads = builder.out_neighbors(cur)
            if not heads:
                out.append(cur)
            else:
                frontier.extend(heads)
        return out

    for node in base_nodes:  # preorder of the binarized tree
        spec = "spec_%s" % node
        kids = children[node]
        if not kids:
            builder.add_leaf_child(spec, spec + "_left", spec + "_left")
            builder.add_leaf_child(spec, spec + "_right", spec + "_right")
            continue
        for side, child in (("_left", kids[0]), ("_right", kids[1])):
            target = min(leaves_below("spec_%s" % child))
            anchor = builder.subdivide_above(target, "anc%s_%s" % (side, node))
            builder.add_node(spec + side)
            builder.add_arc(anchor, spec + side, PRINCIPAL)
            builder.set_leaf(spec + side, spec + side)

    zero_node = {}
    for (x, v), cost in instance.weights.items():
        if cost == 0:
            zero_node[x] = v
    for x in sorted(instance.elements):
        ones = sorted(v for (y, v), c in instance.weights.items() if y == x and c == 1)
        for v in ones:
            for side in ("_left", "_right"):
                tail = "tail_%s_%s%s" % (x, v, side)
                head = "head_%s_%s%s" % (x, v, side)
                builder.subdivide_above("spec_%s%s" % (v, side), tail)
                builder.subdivide_above("spec_%s%s" % (zero_node[x], side), head)
                builder.add_arc(tail, head, SECONDARY)

    sigma = {}
    for x in instance.elements:
        sigma["%s_left" % x] = "spec_%s_left" % zero_node[x]
        sigma["%s_right" % x] = "spec_%s_right" % zero_node[x]
    cherries = [(DUP, ["%s_left" % x, "%s_right" % x]) for x in sorted(instance.elements)]
    structure = cherries[0] if len(cherries) == 1 else (SPEC, cherries)
    return NCInstance(DSTree.from_structure(structure), builder.build(), sigma)


# -- feedback arc set -> species-tree consistency ---------------------------------


def _arc_id(index: int) -> str:
    return "a%d" % (index + 1)


def fas_to_tmstc(instance: FASInstance) -> TMSTCInstance:
    """Caterpillar species tree and alternating DS-tree with budget 2|A| + k.

    Every vertex becomes a 2K-leaf caterpillar, every arc a two-leaf cherry
    plus a 4K+2-leaf gene caterpillar whose two bottom genes live in the
    target vertex's first two species.
    """
    if not instance.arcs:
        raise ValueError("need at least one arc")
    m, n = len(instance.arcs), len(instance.vertices)
    budget = 2 * m + instance.k
    two_k = 2 * budget

    builder = NetworkBuilder()
    spine_count = m + n - 1

    def subtree_root(idx: int) -> str:
        # subtrees in order: arcs first, then vertices
        if idx < m:
            aid = _arc_id(idx)
            root = "ra_%s" % aid
            builder.add_node(root)
            builder.add_leaf_child(root, "p_%s" % aid, "p_%s" % aid)
            builder.add_leaf_child(root, "q_%s" % aid, "q_%s" % aid)
            return root
        v = instance.vertices[idx - m]
        top = "z_%s_1" % v
        builder.add_node(top)
        for h in range(1, two_k - 1):
            nxt = "z_%s_%d" % (v, h + 1)
            builder.add_node(nxt)
            builder.add_leaf_child("z_%s_%d" % (v, h), "%s_%d" % (v, h), "%s_%d" % (v, h))
            builder.add_arc("z_%s_%d" % (v, h), nxt, PRINCIPAL)
        bottom = "z_%s_%d" % (v, two_k - 1)
        builder.add_leaf_child(bottom, "%s_%d" % (v, two_k - 1), "%s_%d" % (v, two_k - 1))
        builder.add_leaf_child(bottom, "%s_%d" % (v, two_k), "%s_%d" % (v, two_k))
        return top

    for c in range(1, spine_count + 1):
        builder.add_node("t%d" % c)
        if c > 1:
            builder.add_arc("t%d" % (c - 1), "t%d" % c, PRINCIPAL)
    builder.root = "t1"
    for idx in range(m + n):
        root = subtree_root(idx)
        builder.add_arc("t%d" % min(idx + 1, spine_count), root, PRINCIPAL)
    species_tree = builder.build()

    sigma: dict[str, str] = {}

    def arc_subtree(idx: int):
        aid = _arc_id(idx)
        u, v = instance.arcs[idx]
        w1, w2 = "%s_w1" % aid, "%s_w2" % aid
        sigma[w1] = "%s_1" % v
        sigma[w2] = "%s_2" % v
        cur = (DUP, [w1, w2])
        for h in range(two_k, 0, -1):
            g2 = "%s_%s_%d_2" % (aid, u, h)
            g1 = "%s_%s_%d_1" % (aid, u, h)
            sigma[g1] = sigma[g2] = "%s_%d" % (u, h)
            cur = (SPEC, [g2, cur])
            cur = (DUP, [g1, cur])
        for leaf, label in (("q", SPEC), ("q", DUP), ("p", SPEC), ("p", DUP)):
            copy = 2 if label == SPEC else 1
            gene = "%s_%s%d" % (aid, leaf, copy)
            sigma[gene] = "%s_%s" % (leaf, aid)
            cur = (label, [gene, cur])
        return cur

    if m == 1:
        structure = arc_subtree(0)
    else:
        structure = (SPEC, [arc_subtree(m - 2), arc_subtree(m - 1)])
        for idx in range(m - 3, -1, -1):
            p3 = "%s_p3" % _arc_id(idx + 1)
            sigma[p3] = "p_%s" % _arc_id(idx + 1)
            structure = (DUP, [p3, structure])
            structure = (SPEC, [arc_subtree(idx), structure])
    tree = DSTree.from_structure(structure)
    return TMSTCInstance(tree, species_tree, sigma, budget)


def solve_fas_bruteforce(instance: FASInstance, max_arcs: int = 16) -> int:
    return len(minimum_feedback_arc_set(instance, max_arcs))


def minimum_feedback_arc_set(instance: FASInstance, max_arcs: int = 16) -> tuple[tuple[str, str], ...]:
    """Smallest arc subset whose removal leaves the digraph acyclic."""
    if len(instance.arcs) > max_arcs:
        raise BoundExceededError("instance has %d arcs, above the bound %d" % (len(instance.arcs), max_arcs))
    for size in range(len(instance.arcs) + 1):
        for subset in combinations(instance.arcs, size):
            if _is_acyclic(instance.vertices, [a for a in instance.arcs if a not in set(subset)]):
                return subset
    raise AssertionError("removing all arcs always leaves an acyclic graph")


def _is_acyclic(vertices, arcs) -> bool:
    indeg = {v: 0 for v in vertices}
    out: dict[str, list[str]] = {v: [] for v in vertices}
    for a, b in arcs:
        out[a].append(b)
        indeg[b] += 1
    ready = [v for v in vertices if indeg[v] == 0]
    seen = 0
    while ready:
        node = ready.pop()
        seen += 1
        for nxt in out[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
    return seen == len(vertices)


def _topological_order(vertices, arcs) -> list[str]:
    import heapq

    indeg = {v: 0 for v in vertices}
    out: dict[str, list[str]] = {v: [] for v in vertices}
    for a, b in arcs:
        out[a].append(b)
        indeg[b] += 1
    ready = [v for v in vertices if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for nxt in out[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(ready, nxt)
    return order


def fas_witness(
    instance: FASInstance,
    aprime: Iterable[tuple[str, str]],
    tmstc: TMSTCInstance,
) -> tuple[LGTNetwork, Reconciliation]:
    """Witness network and reconciliation for a given feedback arc set.

    The network stacks three layers of highways onto the species tree:
    per-arc transfers from the q leaves into the source caterpillars,
    forward transfers along a topological order of the kept arcs, and
    backward escape routes (bottom-of-caterpillar to top, then first leaf
    to second leaf).  Arcs outside A' spend 2 transfers, arcs inside 3.
    """
    removed = {tuple(a) for a in aprime}
    if not removed <= set(instance.arcs):
        raise NotAFeedbackArcSetError("A' contains arcs not in the instance")
    kept = [a for a in instance.arcs if a not in removed]
    if not _is_acyclic(instance.vertices, kept):
        raise NotAFeedbackArcSetError("removing A' leaves a directed cycle")

    m = len(instance.arcs)
    two_k = 2 * tmstc.transfer_budget
    builder = NetworkBuilder.from_network(tmstc.species_tree)

    # step 1: q_{a} into the source caterpillar of a
    for idx, (u, _v) in enumerate(instance.arcs):
        aid = _arc_id(idx)
        builder.subdivide_above("q_%s" % aid, "send_q_%s_to_%s" % (aid, u))
        builder.subdivide_above("z_%s_1" % u, "recv_%s_from_q_%s" % (u, aid))
        builder.add_arc("send_q_%s_to_%s" % (aid, u), "recv_%s_from_q_%s" % (u, aid), SECONDARY)

    # step 2: forward highways along a topological order of the kept arcs
    topo = _topological_order(instance.vertices, kept)
    pos = {v: i for i, v in enumerate(topo)}
    for i, v in enumerate(topo):
        for j in range(i):
            builder.subdivide_above("z_%s_1" % v, "recv_%s_from_%s" % (v, topo[j]))
        for j in range(i + 1, len(topo)):
            builder.subdivide_above("%s_%d" % (v, two_k), "send_%s_to_%s" % (v, topo[j]))
    for v in topo:
        for w in topo:
            if pos[v] < pos[w]:
                builder.add_arc("send_%s_to_%s" % (v, w), "recv_%s_from_%s" % (w, v), SECONDARY)

    # step 3: backward escape routes, then first-to-second leaf transfers
    for i, v in enumerate(topo):
        for j in range(i):
            builder.subdivide_above("%s_%d" % (v, two_k), "backsend_%s_to_%s" % (v, topo[j]))
        for j in range(i + 1, len(topo)):
            builder.subdivide_above("%s_1" % v, "backrecv_%s_from_%s" % (v, topo[j]))
    for v in topo:
        for w in topo:
            if pos[v] > pos[w]:
                builder.add_arc("backsend_%s_to_%s" % (v, w), "backrecv_%s_from_%s" % (w, v), SECONDARY)
    for v in instance.vertices:
        builder.subdivide_above("%s_1" % v, "send12_%s" % v)
        builder.subdivide_above("%s_2" % v, "recv12_%s" % v)
        builder.add_arc("send12_%s" % v, "recv12_%s" % v, SECONDARY)

    net = builder.build()
    tree = tmstc.dstree

    def descend(top: str, bottom: str) -> list[str]:
        path = [bottom]
        node = bottom
        while node != top:
            node = net.principal_parent(node)
            if node is None:
                raise AssertionError("%s is not a principal ancestor of %s" % (top, bottom))
            path.append(node)
        path.reverse()
        return path

    alpha: dict[str, tuple] = {}
    events: dict[str, tuple] = {}

    def record(node: str, path: list[str], terminal: str):
        alpha[node] = tuple(path)
        labels = [step_event(net, path[a], path[a + 1]) for a in range(len(path) - 1)]
        labels.append(terminal)
        events[node] = tuple(labels)

    for idx, (u, v) in enumerate(instance.arcs):
        aid = _arc_id(idx)
        # a removed arc takes the 3-transfer escape route only when it runs
        # backwards in the topological order; a minimal A' always does, but a
        # wasteful A' may remove a forward arc, which keeps its 2-transfer highway
        escape = (u, v) in removed and pos[u] > pos[v]
        target = ("backsend_%s_to_%s" if escape else "send_%s_to_%s") % (u, v)

        # upper block: p and q cherries around the transfer into the caterpillar
        r1 = tree.parent("%s_p1" % aid)
        r2 = tree.parent("%s_p2" % aid)
        r3 = tree.parent("%s_q1" % aid)
        r4 = tree.parent("%s_q2" % aid)
        send_q = "send_q_%s_to_%s" % (aid, u)
        record(r1, ["ra_%s" % aid], DUP)
        record("%s_p1" % aid, descend("ra_%s" % aid, "p_%s" % aid), EXTANT)
        record(r2, ["ra_%s" % aid], SPEC)
        record("%s_p2" % aid, ["p_%s" % aid], EXTANT)
        record(r3, [send_q], DUP)
        record("%s_q1" % aid, descend(send_q, "q_%s" % aid), EXTANT)
        record(r4, [send_q], TRANSFER)
        record("%s_q2" % aid, descend(send_q, "q_%s" % aid), EXTANT)

        # the 2K duplication/speciation rungs of the source caterpillar
        first = tree.parent("%s_%s_1_1" % (aid, u))
        record(first, descend("recv_%s_from_q_%s" % (u, aid), "z_%s_1" % u), DUP)
        for h in range(1, two_k):
            rung_d = tree.parent("%s_%s_%d_1" % (aid, u, h))
            rung_s = tree.parent("%s_%s_%d_2" % (aid, u, h))
            z = "z_%s_%d" % (u, h)
            if h > 1:
                record(rung_d, [z], DUP)
            record(rung_s, [z], SPEC)
            record("%s_%s_%d_1" % (aid, u, h), descend(z, "%s_%d" % (u, h)), EXTANT)
            # the second copy starts below z: at the top of whatever stack the
            # pendant arc carries (first and second leaves hold escape nodes)
            record("%s_%s_%d_2" % (aid, u, h), descend(z, "%s_%d" % (u, h))[1:], EXTANT)

        bottom_d = tree.parent("%s_%s_%d_1" % (aid, u, two_k))
        bottom_s = tree.parent("%s_%s_%d_2" % (aid, u, two_k))
        z_last = "z_%s_%d" % (u, two_k - 1)
        record(bottom_d, descend(z_last, target)[1:], DUP)
        record(bottom_s, [target], TRANSFER)
        record("%s_%s_%d_1" % (aid, u, two_k), descend(target, "%s_%d" % (u, two_k)), EXTANT)
        record("%s_%s_%d_2" % (aid, u, two_k), descend(target, "%s_%d" % (u, two_k)), EXTANT)

        # the two bottom genes living in the target caterpillar
        w_par = tree.parent("%s_w1" % aid)
        if escape:
            record(w_par, descend("backrecv_%s_from_%s" % (v, u), "send12_%s" % v), TRANSFER)
            record("%s_w1" % aid, descend("send12_%s" % v, "%s_1" % v), EXTANT)
            record("%s_w2" % aid, descend("recv12_%s" % v, "%s_2" % v), EXTANT)
        else:
            record(w_par, descend("recv_%s_from_%s" % (v, u), "z_%s_1" % v), DUP)
            record("%s_w1" % aid, descend("z_%s_1" % v, "%s_1" % v), EXTANT)
            record("%s_w2" % aid, descend("z_%s_1" % v, "%s_2" % v), EXTANT)

    # the spine above the per-arc blocks
    if m > 1:
        for h in range(1, m):
            spine_s = tree.parent(tree.parent("%s_p1" % _arc_id(h - 1)))
            record(spine_s, ["t%d" % h], SPEC)
        for h in range(1, m - 1):
            p3 = "%s_p3" % _arc_id(h)
            spine_d = tree.parent(p3)
            record(spine_d, ["t%d" % (h + 1)], DUP)
            record(p3, descend("t%d" % (h + 1), "p_%s" % _arc_id(h)), EXTANT)
        last_r1 = tree.parent("%s_p1" % _arc_id(m - 1))
        record(last_r1, descend("t%d" % m, "ra_%s" % _arc_id(m - 1)), DUP)

    return net, Reconciliation(alpha, events)


# -- instance files ---------------------------------------------------------------


def parse_mcc(text: str) -> MCCInstance:
    data = _load_json(text)
    if not isinstance(data, dict) or set(data) != {"classes", "edges"}:
        raise SemanticFormatError("multicolored clique file needs exactly the keys 'classes' and 'edges'")
    try:
        return MCCInstance.create(data["classes"], [tuple(e) for e in data["edges"]])
    except (ValueError, TypeError) as exc:
        raise SemanticFormatError(str(exc)) from exc


def write_mcc(instance: MCCInstance) -> str:
    payload = {
        "classes": [list(c) for c in instance.classes],
        "edges": sorted(sorted(e) for e in instance.edges),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_act(text: str) -> ACTInstance:
    data = _load_json(text)
    needed = {"root", "children", "elements", "weights"}
    if not isinstance(data, dict) or set(data) != needed:
        raise SemanticFormatError("antichain file needs exactly the keys %s" % sorted(needed))
    try:
        tree = PlainTree(data["root"], data["children"])
        weights = {}
        for entry in data["weights"]:
            x, v, cost = entry
            weights[(x, v)] = cost
        return ACTInstance.create(tree, data["elements"], weights)
    except (ValueError, TypeError) as exc:
        raise SemanticFormatError(str(exc)) from exc


def write_act(instance: ACTInstance) -> str:
    children = {n: list(instance.tree.children(n)) for n in instance.tree.nodes() if instance.tree.children(n)}
    payload = {
        "root": instance.tree.root,
        "children": children,
        "elements": sorted(instance.elements),
        "weights": [[x, v, c] for (x, v), c in sorted(instance.weights.items())],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_fas(text: str) -> FASInstance:
    data = _load_json(text)
    if not isinstance(data, dict) or set(data) != {"vertices", "arcs", "k"}:
        raise SemanticFormatError("feedback arc set file needs exactly the keys 'vertices', 'arcs', 'k'")
    try:
        return FASInstance.create(data["vertices"], [tuple(a) for a in data["arcs"]], data["k"])
    except (ValueError, TypeError) as exc:
        raise SemanticFormatError(str(exc)) from exc


def write_fas(instance: FASInstance) -> str:
    payload = {
        "vertices": list(instance.vertices),
        "arcs": [list(a) for a in instance.arcs],
        "k": instance.k,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
