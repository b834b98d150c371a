"""Tie strength labeling, strong triadic closure, and tie classification benchmarks."""
from .graph import (
    DirectedWeightedGraph, GraphError, SnapshotSeries, TieGraph, build_graph, build_snapshot_series,
    build_tie_graph,
)
from .labeling import (
    DEFINITIONS, DefinitionId, LabelSet, ThresholdConfig, assign_labels, label_all_definitions,
    label_definition,
)
from .metrics import EvalResult, evaluate
from .splits import Split, balanced_hub_split, node_centric_split, random_split, unsupervised_split
from .stc import enumerate_wedges, stc_greedy, verify_stc

__version__ = "0.1.0"

__all__ = [
    "DEFINITIONS", "DefinitionId", "DirectedWeightedGraph", "EvalResult", "GraphError", "LabelSet",
    "SnapshotSeries", "Split", "ThresholdConfig", "TieGraph", "assign_labels", "balanced_hub_split",
    "build_graph", "build_snapshot_series", "build_tie_graph", "enumerate_wedges", "evaluate",
    "label_all_definitions", "label_definition", "node_centric_split", "random_split", "stc_greedy",
    "unsupervised_split", "verify_stc",
]
