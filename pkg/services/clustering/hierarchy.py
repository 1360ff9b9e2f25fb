"""
Binary hierarchy of intensity clusters.

The root covers all occupied levels; every non-uniform node is split at a
threshold t into [lo, t] and [t+1, hi] by the chosen splitter, down to
uniform leaves (one occupied level each). Nodes are immutable and compared
by identity.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple, Union

from image_io import Histogram

from .splitters import Splitter, get_splitter
from .stats import ClusterStats, delta_e_merge, stats_of_interval

logger = logging.getLogger("PixInfoHierarchy")


@dataclass(frozen=True, eq=False)
class Split:
    threshold: int
    low: "HierarchyNode"
    high: "HierarchyNode"
    delta_e: Fraction


@dataclass(frozen=True, eq=False)
class HierarchyNode:
    stats: ClusterStats
    split: Optional[Split] = None
    depth: int = 0

    @property
    def is_uniform(self) -> bool:
        return self.split is None

    @property
    def squared_error(self) -> Fraction:
        return self.stats.squared_error

    def __repr__(self) -> str:
        kind = "leaf" if self.split is None else f"split@{self.split.threshold}"
        return f"HierarchyNode([{self.stats.lo}, {self.stats.hi}] n={self.stats.n} {kind})"


@dataclass(frozen=True, eq=False)
class Hierarchy:
    root: HierarchyNode
    splitter: str
    depth: int
    histogram: Histogram
    _leaf_by_level: Dict[int, HierarchyNode] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        leaves = {}
        for node in self.leaves():
            for level in self.histogram.levels_between(node.stats.lo, node.stats.hi):
                leaves[level] = node
        object.__setattr__(self, "_leaf_by_level", leaves)

    def nodes(self) -> Iterator[HierarchyNode]:
        """Pre-order walk, low child before high child."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.split is not None:
                stack.append(node.split.high)
                stack.append(node.split.low)

    def leaves(self) -> List[HierarchyNode]:
        return [node for node in self.nodes() if node.split is None]

    def leaf_for_level(self, level: int) -> HierarchyNode:
        return self._leaf_by_level[level]

    def levels_of(self, node: HierarchyNode) -> Tuple[int, ...]:
        return self.histogram.levels_between(node.stats.lo, node.stats.hi)

    def non_uniform_ancestors(self, level: int) -> int:
        """Count the non-uniform clusters containing *level* by walking thresholds from the root."""
        count = 0
        node = self.root
        while node.split is not None:
            count += 1
            node = node.split.low if level <= node.split.threshold else node.split.high
        return count

    def level_cut(self, depth: int) -> List[HierarchyNode]:
        """Nodes at *depth* plus the shallower leaves, ordered by level."""
        return [
            node for node in self.nodes()
            if node.depth == depth or (node.split is None and node.depth < depth)
        ]


def build_hierarchy(h: Histogram, splitter: Union[str, Splitter]) -> Hierarchy:
    """Split top-down until every cluster is uniform."""
    rule = get_splitter(splitter)
    node_rule = rule.prepare(h)

    order: List[Tuple[int, int, ClusterStats, int]] = []
    thresholds: Dict[Tuple[int, int], int] = {}
    pending = [(h.levels[0], h.levels[-1], 0)]
    while pending:
        lo, hi, depth = pending.pop()
        stats = stats_of_interval(h, lo, hi)
        order.append((lo, hi, stats, depth))
        if not stats.is_uniform:
            t = node_rule.threshold(h, stats)
            thresholds[(lo, hi)] = t
            pending.append((t + 1, hi, depth + 1))
            pending.append((lo, t, depth + 1))

    # children are always recorded after their parent
    built: Dict[Tuple[int, int], HierarchyNode] = {}
    max_depth = 0
    for lo, hi, stats, depth in reversed(order):
        max_depth = max(max_depth, depth)
        t = thresholds.get((lo, hi))
        if t is None:
            built[(lo, hi)] = HierarchyNode(stats=stats, depth=depth)
            continue
        low = built.pop((lo, t))
        high = built.pop((t + 1, hi))
        split = Split(threshold=t, low=low, high=high, delta_e=delta_e_merge(low.stats, high.stats))
        built[(lo, hi)] = HierarchyNode(stats=stats, split=split, depth=depth)

    root = built.pop((h.levels[0], h.levels[-1]))
    hier = Hierarchy(root=root, splitter=rule.name, depth=max_depth, histogram=h)
    logger.info(
        "Built %s hierarchy: g=%d levels, depth T=%d, E_root=%s",
        rule.name, h.g, max_depth, float(root.squared_error),
    )
    return hier
