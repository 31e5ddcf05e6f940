"""Ranked phylogenetic trees: strongly and weakly increasing Schröder trees.

Exact enumeration, uniform sampling, ranking/unranking, bijections with
permutations and ordered set partitions, and an empirical statistics
harness.
"""

from ._accel import USE_NUMBA
from .bijections import (
    ClassMembershipError,
    normalize,
    partition_to_tree,
    perm_to_tree,
    runs,
    tree_to_partition,
    tree_to_perm,
)
from .combinat import binomial, factorial, harmonic, stirling_partition
from .exact import (
    BivariateTruncation,
    DistRow,
    check_cycle_identity,
    stirling_cycle_row,
    strong_binary_nodes_dist,
    strong_count,
    strong_internal_mean,
    strong_internal_nodes_dist,
    strong_internal_variance,
    strong_root_arity_dist,
    strong_root_leaves_dist,
    weak_count,
    weak_count_asymptotic,
    weak_internal_nodes_dist,
    weak_steps_dist,
)
from .formats import from_json, parse_newick, to_json, to_newick
from .oracle import exhaustive_strong, exhaustive_weak
from .rng import RngHandle
from .samplers import (
    RankError,
    rank_composition,
    rank_weak,
    sample_strong,
    sample_weak,
    unrank_composition,
    unrank_weak,
)
from .stats import GofResult, ParamKind, SampleReport, measure_param, normality_check, run_cohort
from .tree import (
    LabeledTree,
    ModelKind,
    ValidityReport,
    canonical_equal,
    leaves_in_order,
    max_label,
    num_internal,
    size,
    validate,
)

__version__ = "0.1.0"
