"""Community detection by random walks on planted-partition graphs."""

from .cdst import CdstConfig, MutableGraphState, edge_strength, minhash_jaccard, minhash_strength, run_cdst
from .congest import (
    BfsTree,
    CostLedger,
    build_bfs,
    detect_all_congest,
    distributed_select,
    flood_step_cost,
    run_cdrw_congest,
    simulate_cdrw,
)
from .detect import CdrwConfig, CommunityAssignment, CommunityResult, detect_all, detect_community
from .graph import (
    Graph,
    GroundTruth,
    PpmParams,
    bfs_ball,
    conductance_of_set,
    connected_components,
    generate_gnp,
    generate_gnpq,
    ppm_analytic_conductance,
    read_edgelist,
    read_labels,
    write_edgelist,
    write_labels,
)
from .kmachine import KMachineEstimate, RvpPartition, conversion_estimate, cross_machine_messages, rvp_partition
from .metrics import ScoreReport, evaluate_assignment, f_score, jaccard, precision_recall
from .mixing import MixingSearchConfig, MixingSetResult, deviation_scores, largest_mixing_set, select_smallest
from .walk import ProbVector, estimate_lambda2, l1_to_stationary, mixing_time, restrict, stationary, walk_step

__version__ = "0.1.0"

__all__ = [
    "BfsTree",
    "CdrwConfig",
    "CdstConfig",
    "CommunityAssignment",
    "CommunityResult",
    "CostLedger",
    "Graph",
    "GroundTruth",
    "KMachineEstimate",
    "MixingSearchConfig",
    "MixingSetResult",
    "MutableGraphState",
    "PpmParams",
    "ProbVector",
    "RvpPartition",
    "ScoreReport",
    "bfs_ball",
    "build_bfs",
    "conductance_of_set",
    "connected_components",
    "conversion_estimate",
    "cross_machine_messages",
    "detect_all",
    "detect_all_congest",
    "detect_community",
    "deviation_scores",
    "distributed_select",
    "edge_strength",
    "estimate_lambda2",
    "evaluate_assignment",
    "f_score",
    "flood_step_cost",
    "generate_gnp",
    "generate_gnpq",
    "jaccard",
    "l1_to_stationary",
    "largest_mixing_set",
    "minhash_jaccard",
    "minhash_strength",
    "mixing_time",
    "ppm_analytic_conductance",
    "precision_recall",
    "read_edgelist",
    "read_labels",
    "restrict",
    "run_cdrw_congest",
    "run_cdst",
    "rvp_partition",
    "select_smallest",
    "simulate_cdrw",
    "stationary",
    "walk_step",
    "write_edgelist",
    "write_labels",
]
