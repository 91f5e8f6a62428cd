"""Core domain types: genes, relation graphs, DS-trees, LGT networks, reconciliations.

All types are immutable after construction and safe for concurrent reads.
Costs live in the naturals extended with INF; arithmetic on INF saturates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

INF = float("inf")

# internal-node labels of a DS-tree
SPEC = "S"
DUP = "D"

# reconciliation event labels
TRANSFER = "T"
SPEC_LOSS = "SL"
TRANSFER_LOSS = "TL"
NO_EVENT = "none"
EXTANT = "extant"

TERMINAL_EVENTS = frozenset({EXTANT, SPEC, DUP, TRANSFER})
PATH_EVENTS = frozenset({SPEC_LOSS, TRANSFER_LOSS, NO_EVENT})

# arc kinds of an LGT network
PRINCIPAL = "principal"
SECONDARY = "secondary"


@dataclass(frozen=True)
class Gene:
    """A gene together with the species it belongs to."""

    id: str
    species: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("gene id must be non-empty")
        if not self.species:
            raise ValueError("species id must be non-empty")


class RelationGraph:
    """Genes with a species assignment plus an undirected orthology edge set."""

    def __init__(self, genes: Iterable[Gene], edges: Iterable[tuple[str, str]]):
        self.sigma: dict[str, str] = {}
        for gene in genes:
            if gene.id in self.sigma:
                raise ValueError("duplicate gene id %r" % gene.id)
            self.sigma[gene.id] = gene.species
        self.edges: set[tuple[str, str]] = set()
        for a, b in edges:
            if a == b:
                raise ValueError("self-loop on gene %r" % a)
            if a not in self.sigma or b not in self.sigma:
                raise ValueError("edge endpoint %r not a declared gene" % (a if a not in self.sigma else b))
            self.edges.add((a, b) if a < b else (b, a))

    def gene_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.sigma))

    def has_edge(self, a: str, b: str) -> bool:
        return ((a, b) if a < b else (b, a)) in self.edges

    def neighbors(self, a: str) -> set[str]:
        out = set()
        for x, y in self.edges:
            if x == a:
                out.add(y)
            elif y == a:
                out.add(x)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RelationGraph):
            return NotImplemented
        return self.sigma == other.sigma and self.edges == other.edges

    def __hash__(self):
        return hash((frozenset(self.sigma.items()), frozenset(self.edges)))

    def __repr__(self):
        return "RelationGraph(%d genes, %d edges)" % (len(self.sigma), len(self.edges))


class _DSNode:
    __slots__ = ("id", "parent", "children", "label")

    def __init__(self, id: str, parent: Optional[str], children: tuple[str, ...], label: Optional[str]):
        self.id = id
        self.parent = parent
        self.children = children
        self.label = label


# nested structure spec for building DS-trees: a leaf is a gene id string,
# an internal node is a pair (label, [child structures])
Structure = "str | tuple[str, list]"

INTERNAL_ID_PREFIX = "@"


class DSTree:
    """Rooted tree with gene-labeled leaves and S/D-labeled internal nodes.

    Internal nodes always have at least two children.  Children are kept in
    canonical order (sorted by the smallest leaf id in the subtree) and
    internal nodes carry ids "@0", "@1", ... assigned in preorder, so two
    structurally equal trees compare equal.
    """

    def __init__(self, structure):
        self._nodes: dict[str, _DSNode] = {}
        self._counter = 0
        self.root = self._build(structure, None)[0]
        self._min_leaf_cache: dict[str, str] = {}

    def _build(self, structure, parent):
        if isinstance(structure, str):
            if structure.startswith(INTERNAL_ID_PREFIX):
                raise ValueError("gene id %r uses the reserved internal prefix" % structure)
            if structure in self._nodes:
                raise ValueError("duplicate leaf %r" % structure)
            self._nodes[structure] = _DSNode(structure, parent, (), None)
            return structure, structure
        label, children = structure
        if label not in (SPEC, DUP):
            raise ValueError("internal label must be S or D, got %r" % (label,))
        if len(children) < 2:
            raise ValueError("internal node must have at least 2 children")
        node_id = INTERNAL_ID_PREFIX + str(self._counter)
        self._counter += 1
        self._nodes[node_id] = _DSNode(node_id, parent, (), label)
        built = [self._build(child, node_id) for child in children]
        # canonical child order: by smallest leaf id in the subtree
        built.sort(key=lambda pair: pair[1])
        self._nodes[node_id].children = tuple(cid for cid, _ in built)
        return node_id, built[0][1]

    @classmethod
    def from_structure(cls, structure) -> "DSTree":
        tree = cls(structure)
        return tree._renumbered()

    def _renumbered(self) -> "DSTree":
        # reassign internal ids in preorder so ids are independent of build order
        mapping = {}
        count = 0
        for node in self.preorder():
            if self.is_leaf(node):
                mapping[node] = node
            else:
                mapping[node] = INTERNAL_ID_PREFIX + str(count)
                count += 1
        if all(old == new for old, new in mapping.items()):
            return self
        fresh = DSTree.__new__(DSTree)
        fresh._nodes = {}
        fresh._counter = count
        fresh._min_leaf_cache = {}
        for old, node in self._nodes.items():
            fresh._nodes[mapping[old]] = _DSNode(
                mapping[old],
                mapping[node.parent] if node.parent is not None else None,
                tuple(mapping[c] for c in node.children),
                node.label,
            )
        fresh.root = mapping[self.root]
        return fresh

    # -- basic accessors ---------------------------------------------------

    def node_ids(self) -> tuple[str, ...]:
        return tuple(self.preorder())

    def is_leaf(self, node: str) -> bool:
        return not self._nodes[node].children

    def children(self, node: str) -> tuple[str, ...]:
        return self._nodes[node].children

    def parent(self, node: str) -> Optional[str]:
        return self._nodes[node].parent

    def label(self, node: str) -> Optional[str]:
        return self._nodes[node].label

    def leaves(self) -> tuple[str, ...]:
        return tuple(n for n in self.preorder() if self.is_leaf(n))

    def internal_nodes(self) -> tuple[str, ...]:
        return tuple(n for n in self.preorder() if not self.is_leaf(n))

    def preorder(self) -> Iterator[str]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(self._nodes[node].children))

    def postorder(self) -> Iterator[str]:
        out = list(self.preorder())
        return iter(reversed(out))

    def __contains__(self, node: str) -> bool:
        return node in self._nodes

    def min_leaf(self, node: str) -> str:
        cached = self._min_leaf_cache.get(node)
        if cached is None:
            if self.is_leaf(node):
                cached = node
            else:
                cached = min(self.min_leaf(c) for c in self.children(node))
            self._min_leaf_cache[node] = cached
        return cached

    def depth(self, node: str) -> int:
        d = 0
        while self._nodes[node].parent is not None:
            node = self._nodes[node].parent
            d += 1
        return d

    def height(self) -> int:
        depths = {self.root: 0}
        best = 0
        for node in self.preorder():
            if node != self.root:
                depths[node] = depths[self.parent(node)] + 1
                best = max(best, depths[node])
        return best

    def subtree_leaves(self, node: str) -> tuple[str, ...]:
        if self.is_leaf(node):
            return (node,)
        out = []
        stack = [node]
        while stack:
            n = stack.pop()
            if self.is_leaf(n):
                out.append(n)
            else:
                stack.extend(self.children(n))
        return tuple(sorted(out))

    def max_degree(self) -> int:
        return max((len(self.children(n)) for n in self.internal_nodes()), default=0)

    def is_binary(self) -> bool:
        return all(len(self.children(n)) == 2 for n in self.internal_nodes())

    def is_least_resolved(self) -> bool:
        """True when no arc joins two internal nodes with the same label."""
        for node in self.internal_nodes():
            for child in self.children(node):
                if not self.is_leaf(child) and self.label(child) == self.label(node):
                    return False
        return True

    def lca(self, a: str, b: str) -> str:
        ancestors = set()
        x = a
        while x is not None:
            ancestors.add(x)
            x = self.parent(x)
        x = b
        while x not in ancestors:
            x = self.parent(x)
        return x

    def to_structure(self, node: Optional[str] = None):
        node = self.root if node is None else node
        if self.is_leaf(node):
            return node
        return (self.label(node), [self.to_structure(c) for c in self.children(node)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DSTree):
            return NotImplemented
        return self.to_structure() == other.to_structure()

    def __hash__(self):
        def freeze(s):
            return s if isinstance(s, str) else (s[0], tuple(freeze(c) for c in s[1]))

        return hash(freeze(self.to_structure()))

    def __repr__(self):
        return "DSTree(%d leaves, %d internal)" % (len(self.leaves()), len(self.internal_nodes()))


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    detail: str

    def __str__(self):
        return "[%s] %s: %s" % (self.rule, self.subject, self.detail)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


class LGTNetwork:
    """Binary rooted DAG whose arcs split into principal and secondary sets.

    The container itself is lenient: it stores whatever node/arc data it is
    given (endpoints must be declared and arcs must not repeat), and
    validate_network reports rule violations as data.
    """

    def __init__(
        self,
        nodes: Iterable[str],
        root: str,
        arcs: Iterable[tuple[str, str, str]],
        leaf_species: Mapping[str, str],
    ):
        self.nodes: tuple[str, ...] = tuple(nodes)
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValueError("duplicate node id")
        if root not in node_set:
            raise ValueError("root %r is not a declared node" % root)
        self.root = root
        self._arcs: dict[tuple[str, str], str] = {}
        for tail, head, kind in arcs:
            if tail not in node_set or head not in node_set:
                raise ValueError("arc endpoint %r not declared" % (tail if tail not in node_set else head))
            if kind not in (PRINCIPAL, SECONDARY):
                raise ValueError("arc kind must be principal or secondary, got %r" % kind)
            if (tail, head) in self._arcs:
                raise ValueError("parallel arc %s -> %s" % (tail, head))
            self._arcs[(tail, head)] = kind
        self.leaf_species: dict[str, str] = dict(leaf_species)
        for node in self.leaf_species:
            if node not in node_set:
                raise ValueError("leaf %r not declared" % node)
        self._out: dict[str, list[tuple[str, str]]] = {n: [] for n in self.nodes}
        self._in: dict[str, list[tuple[str, str]]] = {n: [] for n in self.nodes}
        for (tail, head), kind in self._arcs.items():
            self._out[tail].append((head, kind))
            self._in[head].append((tail, kind))
        for adj in self._out.values():
            adj.sort()
        for adj in self._in.values():
            adj.sort()
        self._species_leaf = {sp: n for n, sp in self.leaf_species.items()}
        self._topo: Optional[tuple[str, ...]] = None

    # -- arcs and adjacency --------------------------------------------------

    def arcs(self) -> tuple[tuple[str, str, str], ...]:
        return tuple(sorted((t, h, k) for (t, h), k in self._arcs.items()))

    def arc_kind(self, tail: str, head: str) -> Optional[str]:
        return self._arcs.get((tail, head))

    def out_arcs(self, node: str) -> list[tuple[str, str]]:
        """Outgoing (head, kind) pairs sorted by head id."""
        return self._out[node]

    def in_arcs(self, node: str) -> list[tuple[str, str]]:
        return self._in[node]

    def out_degree(self, node: str) -> int:
        return len(self._out[node])

    def in_degree(self, node: str) -> int:
        return len(self._in[node])

    def principal_children(self, node: str) -> list[str]:
        return [h for h, k in self._out[node] if k == PRINCIPAL]

    def secondary_head(self, node: str) -> Optional[str]:
        for h, k in self._out[node]:
            if k == SECONDARY:
                return h
        return None

    def principal_parent(self, node: str) -> Optional[str]:
        for t, k in self._in[node]:
            if k == PRINCIPAL:
                return t
        return None

    def secondary_arcs(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted((t, h) for (t, h), k in self._arcs.items() if k == SECONDARY))

    def is_leaf(self, node: str) -> bool:
        return not self._out[node]

    def __contains__(self, node: str) -> bool:
        return node in self._out

    def leaves(self) -> tuple[str, ...]:
        return tuple(sorted(n for n in self.nodes if self.is_leaf(n)))

    def species_leaf(self, species: str) -> str:
        return self._species_leaf[species]

    def species(self) -> tuple[str, ...]:
        return tuple(sorted(self._species_leaf))

    def topological_order(self) -> Optional[tuple[str, ...]]:
        """Nodes in topological order, or None when the arc set has a cycle."""
        if self._topo is None:
            indeg = {n: self.in_degree(n) for n in self.nodes}
            ready = sorted(n for n in self.nodes if indeg[n] == 0)
            order = []
            import heapq

            heapq.heapify(ready)
            while ready:
                node = heapq.heappop(ready)
                order.append(node)
                for head, _ in self._out[node]:
                    indeg[head] -= 1
                    if indeg[head] == 0:
                        heapq.heappush(ready, head)
            if len(order) != len(self.nodes):
                return None
            self._topo = tuple(order)
        return self._topo

    def __repr__(self):
        return "LGTNetwork(%d nodes, %d principal, %d secondary)" % (
            len(self.nodes),
            sum(1 for k in self._arcs.values() if k == PRINCIPAL),
            sum(1 for k in self._arcs.values() if k == SECONDARY),
        )


def step_event(net: LGTNetwork, tail: str, head: str) -> str:
    """Event label forced on a path step over the arc (tail, head).

    Secondary arcs are transfer-losses.  A principal step is a
    speciation-loss when the tail has two principal out-arcs, and a no-event
    when the taken arc is the tail's only principal out-arc.
    """
    kind = net.arc_kind(tail, head)
    if kind is None:
        raise ValueError("no arc %s -> %s" % (tail, head))
    if kind == SECONDARY:
        return TRANSFER_LOSS
    return SPEC_LOSS if len(net.principal_children(tail)) == 2 else NO_EVENT


def validate_network(net: LGTNetwork) -> ValidationReport:
    """Check all structural rules of an LGT network; violations are data."""
    bad: list[Violation] = []
    n = len(net.nodes)
    for node in net.nodes:
        indeg, outdeg = net.in_degree(node), net.out_degree(node)
        if node == net.root:
            if indeg != 0:
                bad.append(Violation("root", node, "root has indegree %d" % indeg))
            if outdeg != 2 and n > 1:
                bad.append(Violation("degree", node, "root must have outdegree 2, has %d" % outdeg))
        elif outdeg == 0:
            if indeg != 1:
                bad.append(Violation("degree", node, "leaf must have indegree 1, has %d" % indeg))
        elif (indeg, outdeg) not in ((1, 2), (2, 1)):
            bad.append(Violation("degree", node, "internal node has (in, out) = (%d, %d)" % (indeg, outdeg)))
        if indeg == 0 and node != net.root:
            bad.append(Violation("root", node, "second indegree-0 node"))
        sec_out = sum(1 for _, k in net.out_arcs(node) if k == SECONDARY)
        sec_in = sum(1 for _, k in net.in_arcs(node) if k == SECONDARY)
        if sec_out > 1:
            bad.append(Violation("secondary-multiplicity", node, "tail of %d secondary arcs" % sec_out))
        if sec_in > 1:
            bad.append(Violation("secondary-multiplicity", node, "head of %d secondary arcs" % sec_in))

    if net.topological_order() is None:
        bad.append(Violation("acyclic", _find_cycle(net), "directed cycle"))

    # (V, E_p) must be a tree after contracting unary nodes: equivalently the
    # root has no principal in-arc and every other node has exactly one
    for node in net.nodes:
        p_in = sum(1 for _, k in net.in_arcs(node) if k == PRINCIPAL)
        if node == net.root:
            if p_in != 0:
                bad.append(Violation("base-tree", node, "root has a principal in-arc"))
        elif p_in != 1:
            bad.append(Violation("base-tree", node, "%d principal in-arcs" % p_in))

    declared = set(net.leaf_species)
    actual = {node for node in net.nodes if net.is_leaf(node)}
    for node in sorted(actual - declared):
        bad.append(Violation("leaves", node, "outdegree-0 node carries no species"))
    for node in sorted(declared - actual):
        bad.append(Violation("leaves", node, "species declared on a non-leaf node"))
    seen: dict[str, str] = {}
    for node in sorted(declared):
        sp = net.leaf_species[node]
        if sp in seen:
            bad.append(Violation("leaves", node, "species %r already labels leaf %r" % (sp, seen[sp])))
        else:
            seen[sp] = node
    return ValidationReport(tuple(bad))


def _find_cycle(net: LGTNetwork) -> str:
    color: dict[str, int] = {}
    stack_path: list[str] = []

    def visit(node: str) -> Optional[list[str]]:
        color[node] = 1
        stack_path.append(node)
        for head, _ in net.out_arcs(node):
            if color.get(head, 0) == 1:
                return stack_path[stack_path.index(head):] + [head]
            if color.get(head, 0) == 0:
                found = visit(head)
                if found:
                    return found
        stack_path.pop()
        color[node] = 2
        return None

    for node in net.nodes:
        if color.get(node, 0) == 0:
            cyc = visit(node)
            if cyc:
                return " -> ".join(cyc)
    return ""


class NetworkBuilder:
    """Mutable helper for assembling LGT networks by subdivision."""

    def __init__(self):
        self._nodes: list[str] = []
        self._node_set: set[str] = set()
        self._arcs: dict[tuple[str, str], str] = {}
        self._pparent: dict[str, str] = {}  # head -> tail of its principal in-arc
        self._out: dict[str, set[str]] = {}
        self._leaf_species: dict[str, str] = {}
        self.root: Optional[str] = None

    @classmethod
    def from_network(cls, net: LGTNetwork) -> "NetworkBuilder":
        builder = cls()
        for node in net.nodes:
            builder.add_node(node)
        for tail, head, kind in net.arcs():
            builder.add_arc(tail, head, kind)
        for node, sp in net.leaf_species.items():
            builder.set_leaf(node, sp)
        builder.root = net.root
        return builder

    def add_node(self, node: str) -> str:
        if node in self._node_set:
            raise ValueError("duplicate node id %r" % node)
        self._nodes.append(node)
        self._node_set.add(node)
        self._out[node] = set()
        return node

    def add_arc(self, tail: str, head: str, kind: str = PRINCIPAL):
        if (tail, head) in self._arcs:
            raise ValueError("parallel arc %s -> %s" % (tail, head))
        self._arcs[(tail, head)] = kind
        self._out[tail].add(head)
        if kind == PRINCIPAL:
            if head in self._pparent:
                raise ValueError("node %r already has a principal parent" % head)
            self._pparent[head] = tail

    def parent_arc(self, node: str) -> tuple[str, str]:
        """The unique principal arc into node (the head must have one)."""
        if node not in self._pparent:
            raise ValueError("node %r has no principal in-arc" % node)
        return self._pparent[node], node

    def out_neighbors(self, node: str) -> list[str]:
        return sorted(self._out[node])

    def subdivide(self, tail: str, head: str, new_id: str) -> str:
        """Replace the arc tail->head by tail->new and new->head, keeping its kind."""
        kind = self._arcs.pop((tail, head))
        self._out[tail].discard(head)
        if kind == PRINCIPAL:
            del self._pparent[head]
        self.add_node(new_id)
        self.add_arc(tail, new_id, kind)
        self.add_arc(new_id, head, kind)
        return new_id

    def subdivide_above(self, node: str, new_id: str) -> str:
        """Subdivide the principal arc from node's current parent to node."""
        tail, head = self.parent_arc(node)
        return self.subdivide(tail, head, new_id)

    def add_secondary_between(self, src_node: str, dst_node: str, tail_id: str, head_id: str):
        """Subdivide the parent arcs of two nodes and join them by a secondary arc."""
        self.subdivide_above(src_node, tail_id)
        self.subdivide_above(dst_node, head_id)
        self.add_arc(tail_id, head_id, SECONDARY)

    def set_leaf(self, node: str, species: str):
        self._leaf_species[node] = species

    def add_leaf_child(self, parent: str, node: str, species: str):
        self.add_node(node)
        self.add_arc(parent, node, PRINCIPAL)
        self.set_leaf(node, species)

    def build(self) -> LGTNetwork:
        if self.root is None:
            raise ValueError("root not set")
        arcs = [(t, h, k) for (t, h), k in self._arcs.items()]
        return LGTNetwork(self._nodes, self.root, arcs, self._leaf_species)


class Reconciliation:
    """Per-node network paths with per-step event labels."""

    def __init__(self, alpha: Mapping[str, Sequence[str]], events: Mapping[str, Sequence[str]]):
        if set(alpha) != set(events):
            raise ValueError("alpha and events must cover the same nodes")
        self.alpha: dict[str, tuple[str, ...]] = {}
        self.events: dict[str, tuple[str, ...]] = {}
        for node in alpha:
            path = tuple(alpha[node])
            labels = tuple(events[node])
            if not path:
                raise ValueError("empty path for node %r" % node)
            if len(path) != len(labels):
                raise ValueError("node %r has %d path nodes but %d events" % (node, len(path), len(labels)))
            for i, ev in enumerate(labels):
                terminal = i == len(labels) - 1
                if terminal and ev not in TERMINAL_EVENTS:
                    raise ValueError("node %r: %r cannot terminate a path" % (node, ev))
                if not terminal and ev not in PATH_EVENTS:
                    raise ValueError("node %r: %r is only valid as the last event" % (node, ev))
            self.alpha[node] = path
            self.events[node] = labels

    def last(self, node: str) -> str:
        return self.alpha[node][-1]

    def first(self, node: str) -> str:
        return self.alpha[node][0]

    def terminal_event(self, node: str) -> str:
        return self.events[node][-1]

    @property
    def transfer_count(self) -> int:
        return sum(ev in (TRANSFER, TRANSFER_LOSS) for labels in self.events.values() for ev in labels)

    def __eq__(self, other):
        if not isinstance(other, Reconciliation):
            return NotImplemented
        return self.alpha == other.alpha and self.events == other.events

    def __repr__(self):
        return "Reconciliation(%d nodes, %d transfers)" % (len(self.alpha), self.transfer_count)


class TransferDistances:
    """Minimum number of secondary arcs needed to travel between node pairs."""

    def __init__(self, nodes: Iterable[str], finite: Mapping[str, Mapping[str, int]]):
        self.nodes = tuple(nodes)
        self._dist = {s: dict(row) for s, row in finite.items()}

    def get(self, s: str, t: str):
        return self._dist.get(s, {}).get(t, INF)

    def finite_from(self, s: str) -> Mapping[str, int]:
        return self._dist.get(s, {})

    def __repr__(self):
        return "TransferDistances(%d nodes)" % len(self.nodes)
