"""Parsers and writers for the on-disk formats.

Every pair satisfies parse(write(x)) == x structurally.  Syntax problems
raise SyntaxFormatError with a character position; semantic problems
(unknown ids, duplicate declarations, bad labels) raise SemanticFormatError.
"""

from __future__ import annotations

import json
import re
from typing import Optional

from .model import (
    DSTree,
    Gene,
    LGTNetwork,
    PRINCIPAL,
    Reconciliation,
    RelationGraph,
    SECONDARY,
    SPEC,
    DUP,
)

IDENT_RE = re.compile(r"[A-Za-z0-9_.+-]+")


class FormatError(ValueError):
    pass


class SyntaxFormatError(FormatError):
    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = "%s (at position %d)" % (message, position)
        super().__init__(message)


class SemanticFormatError(FormatError):
    pass


# -- generic Newick machinery -------------------------------------------------


def _parse_newick(text: str):
    """Parse a Newick string into (children-or-None, name) nested tuples.

    Leaves become (None, name); internal nodes become ([subtree, ...], label)
    where label may be "".
    """
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def parse_name(required: bool) -> str:
        nonlocal pos
        match = IDENT_RE.match(text, pos)
        if not match:
            if required:
                raise SyntaxFormatError("expected a name", pos)
            return ""
        pos = match.end()
        return match.group()

    def parse_subtree():
        nonlocal pos
        skip_ws()
        if pos < n and text[pos] == "(":
            pos += 1
            children = [parse_subtree()]
            skip_ws()
            while pos < n and text[pos] == ",":
                pos += 1
                children.append(parse_subtree())
                skip_ws()
            if pos >= n or text[pos] != ")":
                raise SyntaxFormatError("expected ')' or ','", pos)
            pos += 1
            label = parse_name(required=False)
            return (children, label)
        return (None, parse_name(required=True))

    tree = parse_subtree()
    skip_ws()
    if pos >= n or text[pos] != ";":
        raise SyntaxFormatError("expected ';'", pos)
    pos += 1
    skip_ws()
    if pos != n:
        raise SyntaxFormatError("trailing characters after ';'", pos)
    return tree


# -- DS-trees ------------------------------------------------------------------


def parse_dstree(text: str) -> DSTree:
    """Read a DS-tree: leaves are gene ids, internal nodes carry S or D."""
    raw = _parse_newick(text)

    def convert(node):
        children, name = node
        if children is None:
            return name
        if name not in (SPEC, DUP):
            raise SemanticFormatError("internal node label must be S or D, got %r" % name)
        return (name, [convert(c) for c in children])

    try:
        return DSTree.from_structure(convert(raw))
    except ValueError as exc:
        raise SemanticFormatError(str(exc)) from exc


def write_dstree(tree: DSTree) -> str:
    def emit(node: str) -> str:
        if tree.is_leaf(node):
            return node
        inner = ",".join(emit(c) for c in tree.children(node))
        return "(%s)%s" % (inner, tree.label(node))

    return emit(tree.root) + ";"


def parse_species_tree(text: str) -> LGTNetwork:
    """Read a plain Newick species tree as a secondary-arc-free network.

    Leaf names double as node ids and species ids.  Internal nodes must be
    unlabeled and binary.
    """
    raw = _parse_newick(text)
    nodes: list[str] = []
    arcs: list[tuple[str, str, str]] = []
    leaf_species: dict[str, str] = {}
    counter = [0]

    def convert(node) -> str:
        children, name = node
        if children is None:
            if name in leaf_species:
                raise SemanticFormatError("duplicate species %r" % name)
            nodes.append(name)
            leaf_species[name] = name
            return name
        if name:
            raise SemanticFormatError("species tree internal nodes must be unlabeled, got %r" % name)
        if len(children) != 2:
            raise SemanticFormatError("species tree must be binary")
        node_id = "t%d" % counter[0]
        counter[0] += 1
        nodes.append(node_id)
        for child in children:
            arcs.append((node_id, convert(child), PRINCIPAL))
        return node_id

    root = convert(raw)
    try:
        return LGTNetwork(nodes, root, arcs, leaf_species)
    except ValueError as exc:
        raise SemanticFormatError(str(exc)) from exc


def write_species_tree(net: LGTNetwork) -> str:
    if net.secondary_arcs():
        raise SemanticFormatError("species tree writer requires a network without secondary arcs")

    def emit(node: str) -> str:
        if net.is_leaf(node):
            return net.leaf_species[node]
        return "(%s)" % ",".join(sorted(emit(c) for c in net.principal_children(node)))

    return emit(net.root) + ";"


# -- relation graphs -----------------------------------------------------------


def parse_relation_graph(text: str) -> RelationGraph:
    data = _load_json(text)
    if not isinstance(data, dict) or set(data) != {"genes", "edges"}:
        raise SemanticFormatError("relation graph file must have exactly the keys 'genes' and 'edges'")
    genes = data["genes"]
    if not isinstance(genes, dict):
        raise SemanticFormatError("'genes' must map gene ids to species ids")
    gene_objs = []
    for gid, species in genes.items():
        _check_ident(gid, "gene id")
        _check_ident(species, "species id")
        gene_objs.append(Gene(gid, species))
    edges = []
    seen = set()
    for pair in data["edges"]:
        if not isinstance(pair, list) or len(pair) != 2:
            raise SemanticFormatError("each edge must be a two-element list")
        a, b = pair
        if a not in genes or b not in genes:
            raise SemanticFormatError("edge endpoint %r is not a declared gene" % (a if a not in genes else b))
        if a == b:
            raise SemanticFormatError("self-loop on gene %r" % a)
        if not a < b:
            raise SemanticFormatError("edge [%s, %s] must list the smaller id first" % (a, b))
        if (a, b) in seen:
            raise SemanticFormatError("duplicate edge [%s, %s]" % (a, b))
        seen.add((a, b))
        edges.append((a, b))
    return RelationGraph(gene_objs, edges)


def write_relation_graph(graph: RelationGraph) -> str:
    payload = {
        "genes": {g: graph.sigma[g] for g in sorted(graph.sigma)},
        "edges": [list(e) for e in sorted(graph.edges)],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# -- networks ------------------------------------------------------------------


def parse_network(text: str) -> LGTNetwork:
    data = _load_json(text)
    if not isinstance(data, dict) or set(data) != {"nodes", "root", "arcs", "leaves"}:
        raise SemanticFormatError("network file must have exactly the keys 'nodes', 'root', 'arcs', 'leaves'")
    nodes = data["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(x, str) for x in nodes):
        raise SemanticFormatError("'nodes' must be a list of node ids")
    for node in nodes:
        _check_ident(node, "node id")
    node_set = set(nodes)
    if len(node_set) != len(nodes):
        raise SemanticFormatError("duplicate node id in 'nodes'")
    if data["root"] not in node_set:
        raise SemanticFormatError("root %r is not a declared node" % data["root"])
    arcs = []
    for arc in data["arcs"]:
        if not isinstance(arc, dict) or set(arc) != {"from", "to", "kind"}:
            raise SemanticFormatError("each arc needs exactly the keys 'from', 'to', 'kind'")
        if arc["from"] not in node_set or arc["to"] not in node_set:
            missing = arc["from"] if arc["from"] not in node_set else arc["to"]
            raise SemanticFormatError("arc endpoint %r is not a declared node" % missing)
        if arc["kind"] not in (PRINCIPAL, SECONDARY):
            raise SemanticFormatError("arc kind must be 'principal' or 'secondary', got %r" % arc["kind"])
        arcs.append((arc["from"], arc["to"], arc["kind"]))
    leaves = data["leaves"]
    if not isinstance(leaves, dict):
        raise SemanticFormatError("'leaves' must map node ids to species ids")
    for node, species in leaves.items():
        if node not in node_set:
            raise SemanticFormatError("leaf %r is not a declared node" % node)
        _check_ident(species, "species id")
    try:
        return LGTNetwork(nodes, data["root"], arcs, leaves)
    except ValueError as exc:
        raise SemanticFormatError(str(exc)) from exc


def write_network(net: LGTNetwork) -> str:
    payload = {
        "nodes": sorted(net.nodes),
        "root": net.root,
        "arcs": [
            {"from": t, "to": h, "kind": k}
            for t, h, k in net.arcs()
        ],
        "leaves": {n: net.leaf_species[n] for n in sorted(net.leaf_species)},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# -- reconciliations -----------------------------------------------------------


def parse_reconciliation(text: str) -> Reconciliation:
    data = _load_json(text)
    if not isinstance(data, dict) or set(data) != {"alpha", "events"}:
        raise SemanticFormatError("reconciliation file must have exactly the keys 'alpha' and 'events'")
    alpha, events = data["alpha"], data["events"]
    if not isinstance(alpha, dict) or not isinstance(events, dict):
        raise SemanticFormatError("'alpha' and 'events' must be objects keyed by node id")
    if set(alpha) != set(events):
        raise SemanticFormatError("'alpha' and 'events' must cover the same node ids")
    try:
        return Reconciliation(alpha, events)
    except ValueError as exc:
        raise SemanticFormatError(str(exc)) from exc


def write_reconciliation(recon: Reconciliation) -> str:
    payload = {
        "alpha": {n: list(recon.alpha[n]) for n in sorted(recon.alpha)},
        "events": {n: list(recon.events[n]) for n in sorted(recon.events)},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# -- gene -> species maps ------------------------------------------------------


def parse_gene_map(text: str) -> dict[str, str]:
    """Read a gene->species map, either flat or under a 'genes' key."""
    data = _load_json(text)
    if isinstance(data, dict) and "genes" in data and isinstance(data["genes"], dict):
        data = data["genes"]
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise SemanticFormatError("gene map must be a JSON object of gene id -> species id")
    return dict(data)


# -- helpers -------------------------------------------------------------------


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SyntaxFormatError(exc.msg, exc.pos) from exc


def _check_ident(value, what: str):
    if not isinstance(value, str) or not IDENT_RE.fullmatch(value):
        raise SemanticFormatError("%s %r is not a valid identifier" % (what, value))
