"""Orthology/paralogy relation graphs on lateral-gene-transfer networks.

Decide consistency of relation graphs with LGT networks, compute exact
minimum-transfer reconciliations with witnesses, build transfer highways on
bare species trees, and generate the hardness-reduction instances used to
probe all of it.
"""

from .model import (
    DSTree,
    DUP,
    Gene,
    INF,
    LGTNetwork,
    NetworkBuilder,
    PRINCIPAL,
    Reconciliation,
    RelationGraph,
    SECONDARY,
    SPEC,
    TransferDistances,
    validate_network,
)
from .netops import TimeAssignment, TimeInconsistency, check_time_consistency, reachable_set, transfer_distances
from .reconcile import (
    DegreeTooLargeError,
    InfeasibleError,
    Witness,
    enumerate_lbrs,
    extract_witness,
    min_transfer_cost,
    reconcile_lbr,
)
from .relations import (
    NotRepresentableError,
    build_least_resolved_dstree,
    enumerate_binary_refinements,
    l_contract,
    relation_graph_of,
)
from .highways import build_s_witness, construct_network, decide_s_consistency
from .verify import VerificationReport, check_displays, verify_reconciliation

__all__ = [
    "DSTree",
    "DUP",
    "Gene",
    "INF",
    "LGTNetwork",
    "NetworkBuilder",
    "PRINCIPAL",
    "Reconciliation",
    "RelationGraph",
    "SECONDARY",
    "SPEC",
    "TimeAssignment",
    "TimeInconsistency",
    "TransferDistances",
    "VerificationReport",
    "Witness",
    "DegreeTooLargeError",
    "InfeasibleError",
    "NotRepresentableError",
    "build_least_resolved_dstree",
    "build_s_witness",
    "check_displays",
    "check_time_consistency",
    "construct_network",
    "decide_s_consistency",
    "enumerate_binary_refinements",
    "enumerate_lbrs",
    "extract_witness",
    "l_contract",
    "min_transfer_cost",
    "reachable_set",
    "reconcile_lbr",
    "relation_graph_of",
    "transfer_distances",
    "validate_network",
    "verify_reconciliation",
]
