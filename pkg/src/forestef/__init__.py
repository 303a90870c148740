"""Compact extended formulations of forest and spanning tree polytopes via
balanced-separator recursion, verified with exact rational arithmetic."""

from .graphs import (Graph, GraphError, CapExceeded, parse_graph, blocks,
                     enumerate_forests, enumerate_spanning_trees,
                     connected_vertex_subsets, contract, slack_oracle)
from .separators import (SeparatorResult, SeparatorTree, SeparatorError,
                         find_separator_exact, find_separator_heuristic,
                         halve_separator, build_separator_tree)
from .formulations import (LinearSystem, SizeLedger, edmonds_system, martin_q,
                           forest_witness, product_compose, recursive_ef,
                           stp_from_fp, parse_linear_system)
from .exactlp import LPResult, simplex_max, max_weight_forest, verify_ef, Report
from .protocols import (ProtocolRun, BitBudget, classical_protocol,
                        separator_protocol, protocol_sweep)
from .planar import (PlanarEmbedding, DualStructure, trace_faces, build_dual,
                     dual_tree, facet_condition, u_star, lemma6_check,
                     williams_protocol, williams_sweep, parse_rotation_file)

__version__ = "0.1.0"
