# Clustering Package
from .stats import ClusterStats, EmptyIntervalError, stats_of_interval, delta_e_merge
from .splitters import (
    SPLITTERS,
    Splitter,
    UniformClusterError,
    MergeStep,
    get_splitter,
    merge_sequence,
    split_balanced,
    split_merge,
    split_otsu,
)
from .hierarchy import Hierarchy, HierarchyNode, Split, build_hierarchy
from .optimal import OptimalQuantizer, PartitionError, optimal_partition
