import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from image_io import Histogram

from ..stats import ClusterStats, delta_e_merge, stats_of_interval
from .base import Splitter, UniformClusterError

logger = logging.getLogger("PixInfoMerge")


@dataclass(frozen=True)
class MergeStep:
    """One agglomeration: clusters *left* and *right* (adjacent, left below right) become *merged*.

    Ids 0..g-1 are the uniform clusters in level order; merged clusters get g, g+1, ...
    """

    left: int
    right: int
    merged: int
    delta_e: Fraction
    stats: ClusterStats


def merge_sequence(h: Histogram) -> List[MergeStep]:
    """
    Ward agglomeration restricted to adjacent intervals on the intensity axis.
    Repeatedly merges the adjacent pair with the smallest increase of the total
    squared error (ties: leftmost pair) until one cluster remains.
    """
    g = h.g
    clusters: Dict[int, ClusterStats] = {
        idx: stats_of_interval(h, level, level) for idx, level in enumerate(h.levels)
    }
    right_of: Dict[int, int] = {idx: idx + 1 for idx in range(g - 1)}
    left_of: Dict[int, int] = {idx + 1: idx for idx in range(g - 1)}

    # (cost, lo of left cluster, left id, right id); stale entries are skipped on pop.
    heap: List[Tuple[Fraction, int, int, int]] = [
        (delta_e_merge(clusters[idx], clusters[idx + 1]), clusters[idx].lo, idx, idx + 1)
        for idx in range(g - 1)
    ]
    heapq.heapify(heap)

    steps: List[MergeStep] = []
    next_id = g
    while heap:
        cost, _, a, b = heapq.heappop(heap)
        if a not in clusters or b not in clusters:
            continue
        merged = clusters.pop(a).merged(clusters.pop(b))
        m = next_id
        next_id += 1
        clusters[m] = merged
        steps.append(MergeStep(left=a, right=b, merged=m, delta_e=cost, stats=merged))

        right_of.pop(a, None)
        left_of.pop(b, None)
        la = left_of.pop(a, None)
        rb = right_of.pop(b, None)
        if la is not None:
            right_of[la] = m
            left_of[m] = la
            heapq.heappush(heap, (delta_e_merge(clusters[la], merged), clusters[la].lo, la, m))
        if rb is not None:
            left_of[rb] = m
            right_of[m] = rb
            heapq.heappush(heap, (delta_e_merge(merged, clusters[rb]), merged.lo, m, rb))

    logger.debug("Merged %d levels in %d steps", g, len(steps))
    return steps


class MergeSplitter(Splitter):
    """
    Split as the reversal of the last merge.
    ``threshold`` re-runs the agglomeration on the cluster's own sub-histogram;
    ``prepare`` runs it once on the whole histogram and reads the dendrogram
    backward, which yields the same splits.
    """

    name = "merge"

    def prepare(self, h: Histogram) -> Splitter:
        return _DendrogramSplitter(h, merge_sequence(h))

    def threshold(self, h: Histogram, c: ClusterStats) -> int:
        if c.is_uniform:
            raise UniformClusterError(f"cluster [{c.lo}, {c.hi}] is uniform and cannot be split")
        sub = h.restrict(c.lo, c.hi)
        steps = merge_sequence(sub)
        return _left_top(sub, steps, steps[-1].left)

    def scores(self, h: Histogram, c: ClusterStats) -> List[Tuple[int, Fraction]]:
        return [(self.threshold(h, c), Fraction(1))]


def _left_top(h: Histogram, steps: List[MergeStep], cluster_id: int) -> int:
    """Largest occupied level of *cluster_id*."""
    if cluster_id < h.g:
        return h.levels[cluster_id]
    return steps[cluster_id - h.g].stats.hi


class _DendrogramSplitter(Splitter):
    """Looks up each node's threshold in a precomputed merge dendrogram."""

    name = "merge"

    def __init__(self, h: Histogram, steps: List[MergeStep]):
        # occupied bounds of every merged cluster -> largest level of its left part
        self._thresholds: Dict[Tuple[int, int], int] = {
            (step.stats.lo, step.stats.hi): _left_top(h, steps, step.left) for step in steps
        }

    def threshold(self, h: Histogram, c: ClusterStats) -> int:
        levels = h.levels_between(c.lo, c.hi)
        if len(levels) < 2:
            raise UniformClusterError(f"cluster [{c.lo}, {c.hi}] is uniform and cannot be split")
        return self._thresholds[(levels[0], levels[-1])]

    def scores(self, h: Histogram, c: ClusterStats) -> List[Tuple[int, Fraction]]:
        return [(self.threshold(h, c), Fraction(1))]


def split_merge(h: Histogram, c: ClusterStats) -> int:
    return MergeSplitter().threshold(h, c)
